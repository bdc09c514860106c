//! Property tests for the threshold lattice and the forward model.

use ddio_core::model::eval_constraints;
use ddio_core::{AffineMap, ParamFop, PhiComponentSet, PhiDomain, PhiParams, VarSpec};
use proptest::prelude::*;

fn phi_strategy(jp: usize, jm: usize) -> impl Strategy<Value = PhiParams> {
    (
        proptest::collection::vec(-5.0f64..5.0, jp),
        proptest::collection::vec(-5.0f64..5.0, jm),
    )
        .prop_map(|(p, m)| PhiParams::new(p, m))
}

proptest! {
    #[test]
    fn meet_commutes(a in phi_strategy(3, 2), b in phi_strategy(3, 2)) {
        prop_assert!(a.meet(&b).values_eq(&b.meet(&a)));
    }

    #[test]
    fn meet_is_associative(
        a in phi_strategy(2, 2),
        b in phi_strategy(2, 2),
        c in phi_strategy(2, 2),
    ) {
        prop_assert!(a.meet(&b).meet(&c).values_eq(&a.meet(&b.meet(&c))));
    }

    #[test]
    fn meet_is_idempotent(a in phi_strategy(4, 1)) {
        prop_assert!(a.meet(&a).values_eq(&a));
    }

    #[test]
    fn meet_is_the_greatest_lower_bound(a in phi_strategy(3, 3), b in phi_strategy(3, 3)) {
        let m = a.meet(&b);
        prop_assert!(a.lattice_ge(&m));
        prop_assert!(b.lattice_ge(&m));
    }

    #[test]
    fn rounding_lands_in_the_set(v in -3.0f64..3.0) {
        for set in [PhiComponentSet::binary(),
                    PhiComponentSet::Interval { lo: -1.0, hi: 1.5 },
                    PhiComponentSet::Finite(vec![-2.0, 0.25, 2.0])] {
            if let Some(up) = set.round_up(v, 1e-9) {
                prop_assert!(set.contains(up, 1e-9));
                prop_assert!(up >= v - 1e-9);
            }
            if let Some(down) = set.round_down(v, 1e-9) {
                prop_assert!(set.contains(down, 1e-9));
                prop_assert!(down <= v + 1e-9);
            }
        }
    }
}

/// Fixed two-variable template whose h+ rows read each variable and whose
/// h- row reads their sum.
fn template() -> ParamFop {
    let mut h_plus = AffineMap::zero(2, 2);
    h_plus.set(0, 0, 1.0);
    h_plus.set(1, 1, 1.0);
    let mut h_minus = AffineMap::zero(1, 2);
    h_minus.set(0, 0, 1.0);
    h_minus.set(0, 1, 1.0);
    ParamFop {
        name: String::from("tmpl"),
        vars: vec![VarSpec::continuous(-5.0, 5.0), VarSpec::continuous(-5.0, 5.0)],
        features: AffineMap::zero(1, 2),
        h0: AffineMap::empty(2),
        h_plus,
        h_minus,
        phi_domain: PhiDomain::unbounded(2, 1),
    }
}

/// Feasibility through the compiled MILP agrees with the sign pattern of
/// the residual vector, across random points and thresholds.
#[test]
fn built_milp_feasibility_matches_residual_signs() {
    use ddio_core::milp::check_feasible;
    use ddio_core::model::build_fop;
    use ddio_core::ThetaWeights;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xfeed);
    let model = template();
    let theta = ThetaWeights(vec![1.0]);
    let mut agreements = 0;
    for _ in 0..1000 {
        let phi = PhiParams::new(
            vec![rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)],
            vec![rng.random_range(-4.0..4.0)],
        );
        // Points strictly inside the box so only threshold rows can bind.
        let x = [rng.random_range(-4.9..4.9), rng.random_range(-4.9..4.9)];
        let problem = build_fop(&model, &theta, &phi).unwrap();
        let by_solver = check_feasible(&problem, &x).unwrap().is_feasible();
        let g = eval_constraints(&model, &phi, &x).unwrap();
        let by_signs = g
            .iter()
            .zip(&problem.constraints)
            .all(|(&v, c)| v <= 1e-7 * (1.0 + c.rhs.abs()));
        assert_eq!(by_solver, by_signs, "phi={phi:?} x={x:?} g={g:?}");
        agreements += 1;
    }
    assert_eq!(agreements, 1000);
}

proptest! {
    /// Loosening thresholds (the lattice meet of two parameters is looser
    /// than either) never increases any constraint residual, so feasible
    /// points stay feasible.
    #[test]
    fn residuals_are_monotone_under_loosening(
        a in phi_strategy(2, 1),
        b in phi_strategy(2, 1),
        x0 in -5.0f64..5.0,
        x1 in -5.0f64..5.0,
    ) {
        let model = template();
        let loose = a.meet(&b);
        let x = [x0, x1];
        let ga = eval_constraints(&model, &a, &x).unwrap();
        let gl = eval_constraints(&model, &loose, &x).unwrap();
        for (va, vl) in ga.iter().zip(&gl) {
            prop_assert!(vl <= &(va + 1e-12));
        }
    }
}
