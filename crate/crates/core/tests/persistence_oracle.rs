use core::f64::consts::SQRT_2;

use phenotopo_core::{enclosing_radius, euclidean_distances, rips_persistence, PersistenceDiagram};
use phenotopo_testkit::{euclidean_matrix, rips_oracle};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn intervals(d: &PersistenceDiagram, dim: u8) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = d.dimension(dim).map(|p| (p.birth, p.death)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    v
}

fn check_against_oracle(points: &[(f64, f64)], threshold: Option<f64>) {
    let matrix = euclidean_distances(points);
    let t = threshold.unwrap_or_else(|| enclosing_radius(&matrix));
    let ours = rips_persistence(&matrix, threshold).unwrap();
    let oracle = rips_oracle(&euclidean_matrix(points), t);
    assert_eq!(intervals(&ours, 0), oracle.dim0, "dim 0 for {points:?}");
    assert_eq!(intervals(&ours, 1), oracle.dim1, "dim 1 for {points:?}");
}

fn check_representatives(points: &[(f64, f64)], d: &PersistenceDiagram) {
    let m = euclidean_distances(points);
    for pair in d.dgm1() {
        let rep = pair.representative.as_ref().expect("dimension-1 pairs carry a cycle");
        assert!(!rep.is_empty());
        let mut degree = vec![0usize; points.len()];
        for &(a, b) in rep {
            assert!(a < b);
            degree[a] += 1;
            degree[b] += 1;
            assert!(m.get(a, b) <= pair.birth, "edge longer than birth");
        }
        assert!(degree.iter().all(|d| d % 2 == 0), "odd vertex degree in {rep:?}");
    }
    for pair in d.dgm0() {
        assert!(pair.representative.is_none());
        assert_eq!(pair.birth, 0.0);
    }
}

fn cloud() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..=10)
}

/// Points on a coarse grid, so many distances tie exactly.
fn grid_cloud() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0u8..4, 0u8..4), 1..=10)
        .prop_map(|v| v.into_iter().map(|(x, y)| (f64::from(x), f64::from(y))).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn matches_oracle(points in cloud()) {
        check_against_oracle(&points, None);
    }

    #[test]
    fn matches_oracle_with_ties(points in grid_cloud()) {
        check_against_oracle(&points, None);
        check_against_oracle(&points, Some(1.5));
    }

    #[test]
    fn matches_oracle_with_threshold(points in cloud(), t in 0.05f64..1.0) {
        check_against_oracle(&points, Some(t));
    }

    #[test]
    fn representatives_are_cycles(points in cloud()) {
        let d = rips_persistence(&euclidean_distances(&points), None).unwrap();
        check_representatives(&points, &d);
        let truncated = rips_persistence(&euclidean_distances(&points), Some(0.2)).unwrap();
        check_representatives(&points, &truncated);
    }

    #[test]
    fn component_count(points in cloud()) {
        let d = rips_persistence(&euclidean_distances(&points), None).unwrap();
        let essential = d.dgm0().filter(|p| p.is_essential()).count();
        let finite = d.dgm0().filter(|p| !p.is_essential()).count();
        prop_assert_eq!(essential, 1);
        // Coincident points merge at zero and those pairs are dropped.
        let mut distinct = points.clone();
        distinct.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        distinct.dedup();
        prop_assert_eq!(finite, distinct.len() - 1);
        prop_assert!(d.dgm1().all(|p| !p.is_essential()));
    }

    #[test]
    fn raising_threshold_keeps_finite_pairs(points in cloud(), lo in 0.05f64..0.6, extra in 0.0f64..0.6) {
        let m = euclidean_distances(&points);
        let low = rips_persistence(&m, Some(lo)).unwrap();
        let high = rips_persistence(&m, Some(lo + extra)).unwrap();
        for dim in [0u8, 1] {
            let mut remaining = intervals(&high, dim);
            for pair in intervals(&low, dim).into_iter().filter(|p| p.1.is_finite()) {
                let pos = remaining.iter().position(|q| *q == pair);
                prop_assert!(pos.is_some(), "lost {:?}", pair);
                remaining.remove(pos.unwrap());
            }
        }
    }

    #[test]
    fn relabeling_points(points in cloud(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut permuted = points.clone();
        for i in (1..permuted.len()).rev() {
            permuted.swap(i, rng.random_range(0..=i));
        }
        let a = rips_persistence(&euclidean_distances(&points), None).unwrap();
        let b = rips_persistence(&euclidean_distances(&permuted), None).unwrap();
        prop_assert_eq!(intervals(&a, 0), intervals(&b, 0));
        prop_assert_eq!(intervals(&a, 1), intervals(&b, 1));
    }
}

#[test]
fn canonical_fixtures() {
    let square = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let d = rips_persistence(&euclidean_distances(&square), Some(2.0)).unwrap();
    let dgm1 = intervals(&d, 1);
    assert_eq!(dgm1.len(), 1);
    assert!((dgm1[0].0 - 1.0).abs() <= 1e-12 && (dgm1[0].1 - SQRT_2).abs() <= 1e-12);
    check_against_oracle(&square, Some(2.0));

    let collinear = [(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)];
    let d = rips_persistence(&euclidean_distances(&collinear), None).unwrap();
    assert_eq!(intervals(&d, 0), vec![(0.0, 1.0), (0.0, 2.0), (0.0, f64::INFINITY)]);
    assert!(intervals(&d, 1).is_empty());
    check_against_oracle(&collinear, Some(10.0));
}

#[test]
fn circle_has_one_long_hole() {
    let pts: Vec<(f64, f64)> = (0..24)
        .map(|k| {
            let t = 2.0 * core::f64::consts::PI * f64::from(k) / 24.0;
            (0.5 + 0.4 * t.cos(), 0.5 + 0.4 * t.sin())
        })
        .collect();
    let d = rips_persistence(&euclidean_distances(&pts), None).unwrap();
    let holes = intervals(&d, 1);
    assert_eq!(holes.len(), 1);
    assert!(holes[0].1 - holes[0].0 > 0.4);
    check_representatives(&pts, &d);
    check_against_oracle(&pts[..12], None);
}

/// Perturbing each point by at most ε in the plane moves the hole's birth
/// and death by at most 2ε.
#[test]
fn square_stability() {
    let square = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let eps = 0.01;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let moved: Vec<(f64, f64)> = square
            .iter()
            .map(|&(x, y)| {
                let angle = rng.random_range(0.0..core::f64::consts::TAU);
                let r = eps * rng.random_range(0.0f64..=1.0).sqrt();
                (x + r * angle.cos(), y + r * angle.sin())
            })
            .collect();
        let d = rips_persistence(&euclidean_distances(&moved), None).unwrap();
        let holes = intervals(&d, 1);
        assert_eq!(holes.len(), 1);
        assert!((holes[0].0 - 1.0).abs() <= 2.0 * eps);
        assert!((holes[0].1 - SQRT_2).abs() <= 2.0 * eps);
    }
}
