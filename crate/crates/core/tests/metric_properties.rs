use core::f64::consts::SQRT_2;

use phenotopo_core::{
    euclidean_distances, pairwise_diagram_matrix, rips_persistence, wasserstein_distance, Ground, MatchingConfig,
    PersistenceDiagram, PersistencePair,
};
use phenotopo_testkit::{wasserstein_oracle, OracleGround};
use proptest::prelude::*;

fn dgm(points: &[(f64, f64)]) -> PersistenceDiagram {
    PersistenceDiagram {
        pairs: points
            .iter()
            .map(|&(birth, death)| PersistencePair { dimension: 1, birth, death, representative: None })
            .collect(),
        provenance: String::new(),
    }
}

fn diagram_points(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..0.8), 0..=max)
        .prop_map(|v| v.into_iter().map(|(b, len)| (b, b + len)).collect())
}

fn cfg(p: f64, ground: Ground) -> MatchingConfig {
    MatchingConfig { p, ground, dimensions: vec![1] }
}

fn oracle_ground(g: Ground) -> OracleGround {
    match g {
        Ground::LInf => OracleGround::LInf,
        Ground::L2 => OracleGround::L2,
    }
}

fn ground() -> impl Strategy<Value = Ground> {
    prop_oneof![Just(Ground::LInf), Just(Ground::L2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_exhaustive_matching(a in diagram_points(5), b in diagram_points(5), g in ground(), p in prop_oneof![Just(1.0), Just(2.0), 1.0f64..3.0]) {
        let ours = wasserstein_distance(&dgm(&a), &dgm(&b), &cfg(p, g)).unwrap();
        let oracle = wasserstein_oracle(&a, &b, p, oracle_ground(g));
        prop_assert!((ours - oracle).abs() <= 1e-9, "{} vs {}", ours, oracle);
    }

    #[test]
    fn metric_axioms(a in diagram_points(6), b in diagram_points(6), c in diagram_points(6), g in ground()) {
        let cfg = cfg(1.0, g);
        let (da, db, dc) = (dgm(&a), dgm(&b), dgm(&c));
        let ab = wasserstein_distance(&da, &db, &cfg).unwrap();
        prop_assert_eq!(ab, wasserstein_distance(&db, &da, &cfg).unwrap());
        prop_assert_eq!(wasserstein_distance(&da, &da, &cfg).unwrap(), 0.0);
        let bc = wasserstein_distance(&db, &dc, &cfg).unwrap();
        let ac = wasserstein_distance(&da, &dc, &cfg).unwrap();
        prop_assert!(ac <= ab + bc + 1e-9);
    }

    #[test]
    fn scale_equivariance(a in diagram_points(6), b in diagram_points(6), lambda in 0.1f64..10.0) {
        let cfg = MatchingConfig::default();
        let scale = |v: &[(f64, f64)]| v.iter().map(|&(x, y)| (x * lambda, y * lambda)).collect::<Vec<_>>();
        let d = wasserstein_distance(&dgm(&a), &dgm(&b), &cfg).unwrap();
        let scaled = wasserstein_distance(&dgm(&scale(&a)), &dgm(&scale(&b)), &cfg).unwrap();
        prop_assert!((scaled - lambda * d).abs() <= 1e-12 * (lambda * d).max(1e-300));
    }

    #[test]
    fn diagonal_points_are_free(a in diagram_points(5), b in diagram_points(5), t in 0.0f64..1.0, g in ground()) {
        let cfg = cfg(1.0, g);
        let before = wasserstein_distance(&dgm(&a), &dgm(&b), &cfg).unwrap();
        let mut padded = a.clone();
        padded.push((t, t));
        let after = wasserstein_distance(&dgm(&padded), &dgm(&b), &cfg).unwrap();
        prop_assert!((before - after).abs() <= 1e-12);
    }
}

/// Square of side 1 against the same square doubled: the hole (1, √2)
/// faces (2, 2√2). Matching them directly costs √2 under L∞, sending both
/// to the diagonal costs (√2 − 1)/2 + (2√2 − 2)/2 = 3(√2 − 1)/2.
#[test]
fn square_against_doubled_square() {
    let square = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let doubled: Vec<(f64, f64)> = square.iter().map(|&(x, y)| (2.0 * x, 2.0 * y)).collect();
    let d1 = rips_persistence(&euclidean_distances(&square), None).unwrap();
    let d2 = rips_persistence(&euclidean_distances(&doubled), None).unwrap();
    let oracle = wasserstein_oracle(&[(1.0, SQRT_2)], &[(2.0, 2.0 * SQRT_2)], 1.0, OracleGround::LInf);
    assert!((oracle - 3.0 * (SQRT_2 - 1.0) / 2.0).abs() < 1e-15);
    let m = pairwise_diagram_matrix(
        &[("A".into(), d1.without_essential()), ("B".into(), d2.without_essential())],
        &MatchingConfig::default(),
    )
    .unwrap();
    assert!((m.get(0, 1) - oracle).abs() < 1e-12);
}
