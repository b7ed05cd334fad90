use proptest::prelude::*;

use quasi_einstein::algebra::{GroupTag, MilnorFrame, StructureConstants};
use quasi_einstein::bakry_emery::{ad_skew_residual, qe_residual, BakryEmeryInput};
use quasi_einstein::qe_solver::{numeric_oracle, solve_fixed_metric, MetricFrame};
use quasi_einstein::scalar::Sign;

fn group() -> impl Strategy<Value = GroupTag> {
    prop::sample::select(GroupTag::ALL.to_vec())
}

/// Magnitudes on a coarse grid so that equalities like λ1 = λ2 occur.
fn magnitude() -> impl Strategy<Value = f64> {
    prop_oneof![(1u32..=8).prop_map(|k| k as f64 / 2.0), 0.1f64..5.0]
}

fn frame() -> impl Strategy<Value = (GroupTag, [f64; 3])> {
    (group(), magnitude(), magnitude(), magnitude(), any::<bool>()).prop_map(|(g, a, b, c, tie)| {
        let mags = [a, if tie { a } else { b }, c];
        let lambda = std::array::from_fn(|i| match g.pattern()[i] {
            Sign::Zero => 0.0,
            Sign::Positive => mags[i],
            Sign::Negative => -mags[i],
        });
        (g, lambda)
    })
}

fn nonzero_m() -> impl Strategy<Value = f64> {
    prop_oneof![(1u32..=8).prop_map(|k| k as f64 / 2.0), 0.2f64..6.0]
        .prop_flat_map(|m| prop_oneof![Just(m), Just(-m)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn unimodular_solutions_are_killing_axis_fields((g, lambda) in frame(), m in nonzero_m()) {
        let frame = MetricFrame::milnor(g, lambda).unwrap();
        let sc = frame.structure();
        let sols = solve_fixed_metric(&frame, m).unwrap();
        prop_assert!(sols.non_killing.is_empty());
        for s in &sols.solutions {
            prop_assert!(s.killing && ad_skew_residual(&sc, &s.x) < 1e-12);
            prop_assert!(s.support_size() <= 1, "{:?}", s.x);
            prop_assert!(s.residual < 1e-10);
        }
    }

    #[test]
    fn scaling_maps_solutions((g, lambda) in frame(), m in nonzero_m(), c in prop::sample::select(vec![0.5, 2.0, 10.0])) {
        let frame = MetricFrame::milnor(g, lambda).unwrap();
        let base = solve_fixed_metric(&frame, m).unwrap();
        let scaled = solve_fixed_metric(&frame.scaled(c), m).unwrap();
        prop_assert_eq!(base.solutions.len(), scaled.solutions.len());
        for s in &base.solutions {
            let hit = scaled.solutions.iter().any(|t| {
                (0..3).all(|i| (t.x[i] - s.x[i] / c).abs() < 1e-10) && (t.a - s.a / (c * c)).abs() < 1e-10
            });
            prop_assert!(hit, "{:?} A = {} at c = {}", s.x, s.a, c);
        }
    }

    #[test]
    fn canonicalization_round_trip(
        (g, lambda) in frame(),
        m in nonzero_m(),
        perm in prop::sample::select(vec![[0usize, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [0, 2, 1], [2, 1, 0]]),
        negate in any::<bool>(),
    ) {
        let e = if negate { -1.0 } else { 1.0 };
        let input: [f64; 3] = std::array::from_fn(|i| e * lambda[perm[i]]);
        let (canonical, change) = MilnorFrame::canonicalize(input).unwrap();
        prop_assert_eq!(canonical.group, g);
        let sols = solve_fixed_metric(&MetricFrame::Milnor(canonical), m).unwrap();
        let sc = StructureConstants::milnor(input);
        for s in &sols.solutions {
            let x = change.field_to_input(&s.x);
            let res = qe_residual(&BakryEmeryInput::new(sc.clone(), x, m).unwrap(), s.a);
            prop_assert!(res.sup_norm < 1e-10, "{:?} on {:?}: {}", x, input, res.sup_norm);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn oracle_agrees_with_exact_solver((g, lambda) in frame(), m in nonzero_m(), seed in 0u64..1000) {
        let frame = MetricFrame::milnor(g, lambda).unwrap();
        let exact = solve_fixed_metric(&frame, m).unwrap();
        let oracle = numeric_oracle(&frame, m, 60, seed).unwrap();
        let (_, extra) = oracle.compare(&exact.solutions);
        prop_assert!(extra.is_empty(), "oracle found {:?} not in {:?}", extra, exact.solutions);
    }
}

#[test]
fn h2xr_oracle_matches_both_lists() {
    for m in [-4.0, -1.0, 0.5, 4.0] {
        let frame = MetricFrame::h2xr_from_rho(1.0).unwrap();
        let exact = solve_fixed_metric(&frame, m).unwrap();
        let all: Vec<_> = exact.solutions.iter().chain(&exact.non_killing).cloned().collect();
        let oracle = numeric_oracle(&frame, m, 100, 3).unwrap();
        let (missed, extra) = oracle.compare(&all);
        assert!(missed.is_empty() && extra.is_empty(), "m = {m}: {oracle:?}");
    }
}
