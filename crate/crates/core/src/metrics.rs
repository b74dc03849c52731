//! Wasserstein distance between persistence diagrams and labelled
//! distance matrices built from it.
//!
//! Each off-diagonal point of one diagram is matched either to a point of
//! the other diagram or to its own projection on the diagonal. The optimal
//! augmented matching is found exactly with [`crate::assignment::solve`].

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::assignment;
use crate::persistence::PersistenceDiagram;

/// Metric on the birth/death plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ground {
    #[default]
    LInf,
    L2,
}

impl Ground {
    fn between(self, a: (f64, f64), b: (f64, f64)) -> f64 {
        let (db, dd) = ((a.0 - b.0).abs(), (a.1 - b.1).abs());
        match self {
            Ground::LInf => db.max(dd),
            Ground::L2 => libm::hypot(db, dd),
        }
    }

    fn to_diagonal(self, a: (f64, f64)) -> f64 {
        match self {
            Ground::LInf => (a.1 - a.0) / 2.0,
            Ground::L2 => (a.1 - a.0) / core::f64::consts::SQRT_2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchingConfig {
    /// Matching order, at least 1.
    pub p: f64,
    pub ground: Ground,
    /// Homology dimensions compared; costs from each add up before the
    /// final 1/p root.
    pub dimensions: Vec<u8>,
}

impl Default for MatchingConfig {
    fn default() -> Self {
        MatchingConfig { p: 1.0, ground: Ground::LInf, dimensions: vec![1] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricError {
    InvalidOrder(f64),
    /// An infinite-death class sits in a compared dimension; filter it first.
    EssentialPair { dimension: u8 },
    TooFewDiagrams(usize),
    Pair { left: String, right: String, source: Box<MetricError> },
}

impl fmt::Display for MetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricError::InvalidOrder(p) => write!(f, "matching order p must be >= 1, got {p}"),
            MetricError::EssentialPair { dimension } => write!(
                f,
                "diagram has an essential class in dimension {dimension}; remove infinite pairs before comparing"
            ),
            MetricError::TooFewDiagrams(n) => write!(f, "need at least 2 diagrams, got {n}"),
            MetricError::Pair { left, right, source } => write!(f, "{left} vs {right}: {source}"),
        }
    }
}

impl core::error::Error for MetricError {}

fn finite_points(d: &PersistenceDiagram, dim: u8) -> Result<Vec<(f64, f64)>, MetricError> {
    d.dimension(dim)
        .map(|p| {
            if p.is_essential() {
                Err(MetricError::EssentialPair { dimension: dim })
            } else {
                Ok((p.birth, p.death))
            }
        })
        .collect()
}

/// Sum of `cost^p` over the optimal augmented matching of two point sets.
fn matching_cost(a: &[(f64, f64)], b: &[(f64, f64)], p: f64, ground: Ground) -> f64 {
    // Canonical operand order makes the floating-point sum, and so the
    // distance, exactly symmetric.
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let cmp = |x: &(f64, f64), y: &(f64, f64)| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1));
    a.sort_by(cmp);
    b.sort_by(cmp);
    let swap = a.len().cmp(&b.len()).then_with(|| {
        a.iter().zip(&b).map(|(x, y)| cmp(x, y)).find(|o| o.is_ne()).unwrap_or(core::cmp::Ordering::Equal)
    });
    let (a, b) = if swap.is_gt() { (b, a) } else { (a, b) };
    let pow = |c: f64| if p == 1.0 { c } else { libm::pow(c, p) };
    let (m, n) = (a.len(), b.len());
    let size = m + n;
    let mut cost = vec![0.0; size * size];
    for (i, &pa) in a.iter().enumerate() {
        let row = &mut cost[i * size..(i + 1) * size];
        for (j, &pb) in b.iter().enumerate() {
            row[j] = pow(ground.between(pa, pb));
        }
        row[n..].fill(pow(ground.to_diagonal(pa)));
    }
    for i in m..size {
        for (j, &pb) in b.iter().enumerate() {
            cost[i * size + j] = pow(ground.to_diagonal(pb));
        }
    }
    assignment::solve(&cost, size).0
}

/// p-Wasserstein distance over the dimensions named in `cfg`.
pub fn wasserstein_distance(
    a: &PersistenceDiagram,
    b: &PersistenceDiagram,
    cfg: &MatchingConfig,
) -> Result<f64, MetricError> {
    if !(cfg.p >= 1.0) || cfg.p.is_infinite() {
        return Err(MetricError::InvalidOrder(cfg.p));
    }
    let mut dims = cfg.dimensions.clone();
    dims.sort_unstable();
    dims.dedup();
    let mut total = 0.0;
    for dim in dims {
        let (pa, pb) = (finite_points(a, dim)?, finite_points(b, dim)?);
        total += matching_cost(&pa, &pb, cfg.p, cfg.ground);
    }
    Ok(if cfg.p == 1.0 { total } else { libm::pow(total, 1.0 / cfg.p) })
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixError {
    Shape { labels: usize, rows: usize },
    DuplicateLabel(String),
    Asymmetric { row: String, col: String },
    NonzeroDiagonal(String),
    BadEntry { row: String, col: String, value: f64 },
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::Shape { labels, rows } => {
                write!(f, "{labels} labels but matrix shape does not match ({rows} rows)")
            }
            MatrixError::DuplicateLabel(l) => write!(f, "duplicate label {l:?}"),
            MatrixError::Asymmetric { row, col } => write!(f, "matrix not symmetric at ({row}, {col})"),
            MatrixError::NonzeroDiagonal(l) => write!(f, "nonzero diagonal entry for {l}"),
            MatrixError::BadEntry { row, col, value } => {
                write!(f, "entry ({row}, {col}) = {value} is not a finite nonnegative distance")
            }
        }
    }
}

impl core::error::Error for MatrixError {}

/// Symmetric, zero-diagonal matrix of distances keyed by group label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDistanceMatrix {
    labels: Vec<String>,
    entries: Vec<f64>,
}

impl LabeledDistanceMatrix {
    pub fn from_rows(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, MatrixError> {
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(MatrixError::Shape { labels: n, rows: rows.len() });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(MatrixError::DuplicateLabel(l.clone()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let v = rows[i][j];
                if !v.is_finite() || v < 0.0 {
                    return Err(MatrixError::BadEntry { row: labels[i].clone(), col: labels[j].clone(), value: v });
                }
                if i == j && v != 0.0 {
                    return Err(MatrixError::NonzeroDiagonal(labels[i].clone()));
                }
                if v != rows[j][i] {
                    return Err(MatrixError::Asymmetric { row: labels[i].clone(), col: labels[j].clone() });
                }
            }
        }
        Ok(LabeledDistanceMatrix { labels, entries: rows.into_iter().flatten().collect() })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.labels.len() + j]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.entries.chunks(self.labels.len().max(1))
    }
}

/// All pairwise distances, each unordered pair computed once and mirrored.
pub fn pairwise_diagram_matrix(
    diagrams: &[(String, PersistenceDiagram)],
    cfg: &MatchingConfig,
) -> Result<LabeledDistanceMatrix, MetricError> {
    let n = diagrams.len();
    if n < 2 {
        return Err(MetricError::TooFewDiagrams(n));
    }
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = wasserstein_distance(&diagrams[i].1, &diagrams[j].1, cfg).map_err(|e| MetricError::Pair {
                left: diagrams[i].0.clone(),
                right: diagrams[j].0.clone(),
                source: Box::new(e),
            })?;
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    Ok(LabeledDistanceMatrix { labels: diagrams.iter().map(|(l, _)| l.clone()).collect(), entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::PersistencePair;

    fn dgm(points: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram {
            pairs: points
                .iter()
                .map(|&(birth, death)| PersistencePair { dimension: 1, birth, death, representative: None })
                .collect(),
            provenance: String::new(),
        }
    }

    fn w(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
        wasserstein_distance(&dgm(a), &dgm(b), &MatchingConfig::default()).unwrap()
    }

    #[test]
    fn worked_examples() {
        assert_eq!(w(&[(0.0, 1.0)], &[]), 0.5);
        assert_eq!(w(&[(0.0, 2.0)], &[(0.0, 1.0)]), 1.0);
        assert_eq!(w(&[(1.0, 3.0), (4.0, 5.0)], &[(1.0, 3.0)]), 0.5);
        assert_eq!(w(&[], &[]), 0.0);
        let a = [(0.1, 0.4), (0.2, 0.25), (0.3, 0.9)];
        assert_eq!(w(&a, &a), 0.0);
    }

    #[test]
    fn l2_ground_and_order() {
        let cfg = MatchingConfig { p: 2.0, ground: Ground::L2, dimensions: vec![1] };
        let d = wasserstein_distance(&dgm(&[(0.0, 2.0)]), &dgm(&[]), &cfg).unwrap();
        assert!((d - 2.0 / core::f64::consts::SQRT_2).abs() < 1e-15);
        let bad = MatchingConfig { p: 0.5, ..MatchingConfig::default() };
        assert_eq!(wasserstein_distance(&dgm(&[]), &dgm(&[]), &bad), Err(MetricError::InvalidOrder(0.5)));
    }

    #[test]
    fn essential_pairs_are_refused() {
        let err = wasserstein_distance(&dgm(&[(0.0, f64::INFINITY)]), &dgm(&[]), &MatchingConfig::default());
        assert_eq!(err, Err(MetricError::EssentialPair { dimension: 1 }));
        // Dimension 0 is not compared by default, so its essential class is ignored.
        let mut with_dim0 = dgm(&[(0.0, 1.0)]);
        with_dim0.pairs.push(PersistencePair { dimension: 0, birth: 0.0, death: f64::INFINITY, representative: None });
        assert_eq!(wasserstein_distance(&with_dim0, &dgm(&[]), &MatchingConfig::default()), Ok(0.5));
    }

    #[test]
    fn pairwise_examples() {
        let cfg = MatchingConfig::default();
        let m = pairwise_diagram_matrix(&[("A".into(), dgm(&[(0.0, 1.0)])), ("B".into(), dgm(&[(0.0, 1.0)]))], &cfg).unwrap();
        assert_eq!(m.rows().collect::<Vec<_>>(), vec![&[0.0, 0.0][..], &[0.0, 0.0][..]]);
        let m = pairwise_diagram_matrix(
            &[("A".into(), dgm(&[])), ("B".into(), dgm(&[(0.0, 1.0)])), ("C".into(), dgm(&[(0.0, 2.0)]))],
            &cfg,
        )
        .unwrap();
        assert_eq!((m.get(0, 1), m.get(1, 0)), (0.5, 0.5));
        assert_eq!(m.get(2, 2), 0.0);
        assert_eq!(m.get(1, 2), m.get(2, 1));
        assert_eq!(pairwise_diagram_matrix(&[("A".into(), dgm(&[]))], &cfg), Err(MetricError::TooFewDiagrams(1)));
        let err = pairwise_diagram_matrix(&[("A".into(), dgm(&[])), ("B".into(), dgm(&[(0.0, f64::INFINITY)]))], &cfg)
            .unwrap_err();
        assert!(alloc::format!("{err}").starts_with("A vs B"));
    }

    #[test]
    fn matrix_validation() {
        let l = |s: &[&str]| s.iter().map(|x| String::from(*x)).collect::<Vec<_>>();
        assert!(LabeledDistanceMatrix::from_rows(l(&["a", "b"]), vec![vec![0.0, 1.0], vec![1.0, 0.0]]).is_ok());
        assert!(matches!(
            LabeledDistanceMatrix::from_rows(l(&["a", "b"]), vec![vec![0.0, 1.0], vec![2.0, 0.0]]),
            Err(MatrixError::Asymmetric { .. })
        ));
        assert!(matches!(
            LabeledDistanceMatrix::from_rows(l(&["a", "a"]), vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
            Err(MatrixError::DuplicateLabel(_))
        ));
        assert!(matches!(
            LabeledDistanceMatrix::from_rows(l(&["a", "b"]), vec![vec![1.0, 1.0], vec![1.0, 0.0]]),
            Err(MatrixError::NonzeroDiagonal(_))
        ));
    }
}
