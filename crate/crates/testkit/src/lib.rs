//! Reference oracles for the phenotopo test suites.
//!
//! Everything here is deliberately naive and shares no code with the
//! production crates: the Rips oracle enumerates every simplex up to
//! dimension 2 and runs the textbook column reduction with no shortcuts,
//! and the matching oracle enumerates every partial matching.

use std::collections::BTreeSet;

/// Birth/death intervals split by homological dimension. Essential classes
/// have `f64::INFINITY` as death.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleDiagram {
    pub dim0: Vec<(f64, f64)>,
    pub dim1: Vec<(f64, f64)>,
}

impl OracleDiagram {
    /// Both dimensions sorted by (birth, death) with a total order on floats.
    pub fn sorted(mut self) -> Self {
        let key = |a: &(f64, f64), b: &(f64, f64)| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1));
        self.dim0.sort_by(key);
        self.dim1.sort_by(key);
        self
    }
}

pub fn euclidean_matrix(points: &[(f64, f64)]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|&(xa, ya)| {
            points
                .iter()
                .map(|&(xb, yb)| {
                    let (dx, dy) = (xa - xb, ya - yb);
                    (dx * dx + dy * dy).sqrt()
                })
                .collect()
        })
        .collect()
}

/// Naive Vietoris-Rips persistence in dimensions 0 and 1.
///
/// All simplices with filtration value `<= threshold` are enumerated, sorted
/// by (value, dimension, vertex tuple) and the full boundary matrix is reduced
/// column by column. Zero-persistence pairs are dropped.
pub fn rips_oracle(dist: &[Vec<f64>], threshold: f64) -> OracleDiagram {
    let n = dist.len();
    let mut simplices: Vec<(f64, Vec<usize>)> = (0..n).map(|v| (0.0, vec![v])).collect();
    for i in 0..n {
        for j in i + 1..n {
            if dist[i][j] <= threshold {
                simplices.push((dist[i][j], vec![i, j]));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let diam = dist[i][j].max(dist[i][k]).max(dist[j][k]);
                if diam <= threshold {
                    simplices.push((diam, vec![i, j, k]));
                }
            }
        }
    }
    simplices.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.len().cmp(&b.1.len()))
            .then(a.1.cmp(&b.1))
    });

    let position = |s: &[usize]| simplices.iter().position(|(_, v)| v == s).expect("face present");
    let mut columns: Vec<BTreeSet<usize>> = simplices
        .iter()
        .map(|(_, verts)| {
            if verts.len() == 1 {
                return BTreeSet::new();
            }
            (0..verts.len())
                .map(|skip| {
                    let face: Vec<usize> = verts
                        .iter()
                        .enumerate()
                        .filter(|&(idx, _)| idx != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    position(&face)
                })
                .collect()
        })
        .collect();

    let total = simplices.len();
    let mut owner_of_low: Vec<Option<usize>> = vec![None; total];
    let mut paired = vec![false; total];
    let mut out = OracleDiagram { dim0: Vec::new(), dim1: Vec::new() };
    for j in 0..total {
        while let Some(&low) = columns[j].iter().next_back() {
            match owner_of_low[low] {
                Some(other) => {
                    let other_col = columns[other].clone();
                    let col = &mut columns[j];
                    for r in other_col {
                        if !col.remove(&r) {
                            col.insert(r);
                        }
                    }
                }
                None => break,
            }
        }
        if let Some(&low) = columns[j].iter().next_back() {
            owner_of_low[low] = Some(j);
            paired[low] = true;
            paired[j] = true;
            let (birth, death) = (simplices[low].0, simplices[j].0);
            if death > birth {
                match simplices[low].1.len() {
                    1 => out.dim0.push((birth, death)),
                    2 => out.dim1.push((birth, death)),
                    _ => {}
                }
            }
        }
    }
    for (idx, (value, verts)) in simplices.iter().enumerate() {
        if !paired[idx] && columns[idx].is_empty() {
            match verts.len() {
                1 => out.dim0.push((*value, f64::INFINITY)),
                2 => out.dim1.push((*value, f64::INFINITY)),
                _ => {}
            }
        }
    }
    out.sorted()
}

/// Plane metric used by the matching oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleGround {
    LInf,
    L2,
}

fn ground(a: (f64, f64), b: (f64, f64), g: OracleGround) -> f64 {
    let (db, dd) = ((a.0 - b.0).abs(), (a.1 - b.1).abs());
    match g {
        OracleGround::LInf => db.max(dd),
        OracleGround::L2 => (db * db + dd * dd).sqrt(),
    }
}

fn to_diagonal(a: (f64, f64), g: OracleGround) -> f64 {
    match g {
        OracleGround::LInf => (a.1 - a.0) / 2.0,
        OracleGround::L2 => (a.1 - a.0) / std::f64::consts::SQRT_2,
    }
}

/// p-Wasserstein distance by exhaustive enumeration of every partial
/// matching between `a` and `b`; unmatched points go to the diagonal.
pub fn wasserstein_oracle(a: &[(f64, f64)], b: &[(f64, f64)], p: f64, g: OracleGround) -> f64 {
    fn recurse(
        i: usize,
        a: &[(f64, f64)],
        b: &[(f64, f64)],
        used: &mut Vec<bool>,
        acc: f64,
        p: f64,
        g: OracleGround,
        best: &mut f64,
    ) {
        if i == a.len() {
            let rest: f64 = b
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(&q, _)| to_diagonal(q, g).powf(p))
                .sum();
            if acc + rest < *best {
                *best = acc + rest;
            }
            return;
        }
        recurse(i + 1, a, b, used, acc + to_diagonal(a[i], g).powf(p), p, g, best);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                recurse(i + 1, a, b, used, acc + ground(a[i], b[j], g).powf(p), p, g, best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    recurse(0, a, b, &mut vec![false; b.len()], 0.0, p, g, &mut best);
    best.powf(1.0 / p)
}

/// One synthetic sampled day: cultivar, season start year, season day and
/// risk margin δ in °C.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureDay {
    pub cultivar: &'static str,
    pub start_year: i32,
    pub jday: u16,
    pub delta: f64,
}

/// Window where the planted seasons part ways.
pub const PLANTED_WINDOW: (u16, u16) = (300, 360);

/// Two seasons (2017 and 2018) of one cultivar, sampled every 5 days.
///
/// Outside [`PLANTED_WINDOW`] both seasons follow the same rising margin;
/// inside it they bow apart symmetrically, reaching `separation` in
/// normalized units at the middle of the window. δ runs from 2 at day 250 to
/// 12 at day 500 in both seasons, so per-season rescaling maps δ to
/// `(δ - 2) / 10` and the two trajectories coincide exactly outside the
/// window.
pub fn planted_divergence(separation: f64) -> Vec<FixtureDay> {
    let (lo, hi) = PLANTED_WINDOW;
    let mut days = Vec::new();
    for (start_year, sign) in [(2017, -1.0), (2018, 1.0)] {
        for jday in (250u16..=500).step_by(5) {
            let base = f64::from(jday - 250) / 250.0;
            let bump = if (lo..=hi).contains(&jday) {
                (std::f64::consts::PI * f64::from(jday - lo) / f64::from(hi - lo)).sin()
            } else {
                0.0
            };
            let y = base + sign * separation / 2.0 * bump;
            days.push(FixtureDay { cultivar: "CS", start_year, jday, delta: 2.0 + 10.0 * y });
        }
    }
    days
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_has_one_hole() {
        let d = euclidean_matrix(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let dgm = rips_oracle(&d, 2.0);
        assert_eq!(dgm.dim1, vec![(1.0, 2f64.sqrt())]);
        assert_eq!(dgm.dim0.len(), 4);
        assert_eq!(dgm.dim0[3], (0.0, f64::INFINITY));
    }

    #[test]
    fn collinear_has_no_hole() {
        let d = euclidean_matrix(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]);
        let dgm = rips_oracle(&d, 10.0);
        assert!(dgm.dim1.is_empty());
        assert_eq!(dgm.dim0, vec![(0.0, 1.0), (0.0, 2.0), (0.0, f64::INFINITY)]);
    }

    #[test]
    fn matching_examples() {
        let g = OracleGround::LInf;
        assert_eq!(wasserstein_oracle(&[(0.0, 1.0)], &[], 1.0, g), 0.5);
        assert_eq!(wasserstein_oracle(&[(0.0, 2.0)], &[(0.0, 1.0)], 1.0, g), 1.0);
        assert_eq!(wasserstein_oracle(&[(1.0, 3.0), (4.0, 5.0)], &[(1.0, 3.0)], 1.0, g), 0.5);
    }
}
