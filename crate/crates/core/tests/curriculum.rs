use proptest::prelude::*;
use tscl_coop::curriculum::{
    euclidean_simplex_projection, ordered_mechanism, stochastic_mechanism, Projection,
    RankDirection,
};
use tscl_coop::teacher::boltzmann_policy;
use tscl_coop::{UnitSet, ValueMethod, ValueVector};

/// Closest simplex point by enumerating every support and keeping the
/// feasible candidate nearest to `v`.
fn projection_oracle(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let theta = (support.iter().map(|&i| v[i]).sum::<f64>() - 1.0) / support.len() as f64;
        let mut p = vec![0.0; n];
        for &i in &support {
            p[i] = v[i] - theta;
        }
        if p.iter().any(|&x| x < 0.0) {
            continue;
        }
        let dist: f64 = v.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, p));
        }
    }
    best.unwrap().1
}

fn nr_values(values: Vec<f64>) -> ValueVector {
    let units = UnitSet::new((0..values.len()).map(|i| format!("u{i}"))).unwrap();
    ValueVector {
        units,
        values,
        method: ValueMethod::NrExact,
        eval_target: "all".into(),
        sample_count: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn projection_matches_oracle(v in prop::collection::vec(-2.0..2.0f64, 3)) {
        let p = euclidean_simplex_projection(&v).unwrap();
        let o = projection_oracle(&v);
        for (a, b) in p.iter().zip(&o) {
            prop_assert!((a - b).abs() < 1e-6, "{p:?} vs {o:?}");
        }
    }

    #[test]
    fn projection_lands_on_simplex(v in prop::collection::vec(-5.0..5.0f64, 1..9)) {
        let p = euclidean_simplex_projection(&v).unwrap();
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boltzmann_is_shift_invariant(
        v in prop::collection::vec(-3.0..3.0f64, 1..8),
        shift in -50.0..50.0f64,
        t in 0.05..5.0f64,
    ) {
        let a = boltzmann_policy(&v, t).unwrap();
        let moved: Vec<f64> = v.iter().map(|x| x + shift).collect();
        let b = boltzmann_policy(&moved, t).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schedule_fits_budget(v in prop::collection::vec(-1.0..1.0f64, 1..7), budget in 7usize..5000) {
        let s = ordered_mechanism(&nr_values(v), budget, RankDirection::Descending).unwrap();
        prop_assert!(s.total() <= budget);
        prop_assert_eq!(s.total() + s.dropped, budget);
        prop_assert!(s.steps.iter().all(|step| step.count > 0));
        // floor loses less than one interaction per unit
        prop_assert!(s.dropped < s.units.len().max(1));
    }

    #[test]
    fn schedule_rank_survives_shift(v in prop::collection::vec(-1.0..1.0f64, 2..6), shift in 0.0..3.0f64) {
        let base = nr_values(v.clone());
        let moved = nr_values(v.iter().map(|x| x + shift).collect());
        let a = ordered_mechanism(&base, 10_000, RankDirection::Descending).unwrap();
        let b = ordered_mechanism(&moved, 10_000, RankDirection::Descending).unwrap();
        // units kept by both schedules appear in the same relative order
        let order_b: Vec<&str> = b.steps.iter().map(|s| s.unit.as_str()).collect();
        let common: Vec<&str> = a.steps.iter().map(|s| s.unit.as_str()).filter(|u| order_b.contains(u)).collect();
        let common_b: Vec<&str> = order_b.into_iter().filter(|u| common.contains(u)).collect();
        prop_assert_eq!(common, common_b);
        prop_assert_eq!(base.ranking(), moved.ranking());
    }
}

#[test]
fn worked_examples() {
    // negative entry is pruned exactly
    let p = euclidean_simplex_projection(&[0.9, -0.5, 0.1]).unwrap();
    assert_eq!(p, projection_oracle(&[0.9, -0.5, 0.1]));
    assert!((p[0] - 0.9).abs() < 1e-15 && p[1] == 0.0 && (p[2] - 0.1).abs() < 1e-15);

    let s = ordered_mechanism(
        &nr_values(vec![0.423, -0.1]),
        100,
        RankDirection::Descending,
    )
    .unwrap();
    let tau = projection_oracle(&[0.423, -0.1]);
    let counts: Vec<(String, usize)> = s.steps.iter().map(|x| (x.unit.clone(), x.count)).collect();
    assert_eq!(
        counts,
        vec![
            ("u0".to_string(), (tau[0] * 100.0 + 1e-9).floor() as usize),
            ("u1".to_string(), (tau[1] * 100.0 + 1e-9).floor() as usize),
        ]
    );
    assert_eq!(counts[0].1, 76);

    let units = UnitSet::new(["TwoRooms", "FourRooms"]).unwrap();
    let rooms = ValueVector {
        units,
        values: vec![0.041, 0.107],
        method: ValueMethod::NrExact,
        eval_target: "FourRooms".into(),
        sample_count: None,
    };
    let s = ordered_mechanism(&rooms, 1000, RankDirection::Descending).unwrap();
    assert_eq!(s.steps[0].unit, "FourRooms");
    assert_eq!(s.steps[1].unit, "TwoRooms");
    assert_eq!((s.steps[0].count, s.steps[1].count), (533, 467));
}

#[test]
fn euclidean_mechanism_eliminates_negative_units() {
    let policy =
        stochastic_mechanism(&nr_values(vec![0.9, -0.5, 0.1]), Projection::Euclidean).unwrap();
    assert_eq!(policy.probabilities[1], 0.0);
    let soft = stochastic_mechanism(
        &nr_values(vec![0.9, -0.5, 0.1]),
        Projection::Boltzmann { temperature: 1.0 },
    )
    .unwrap();
    assert!(soft.probabilities.iter().all(|&p| p > 0.0));
}

#[test]
fn ordered_mechanism_rejects_shapley_values() {
    let mut v = nr_values(vec![0.2, 0.1]);
    v.method = ValueMethod::ShapleyExact;
    assert!(ordered_mechanism(&v, 10, RankDirection::Descending).is_err());
    assert!(ordered_mechanism(
        &nr_values(vec![0.5, 0.5, 0.5]),
        2,
        RankDirection::Descending
    )
    .is_err());
}
