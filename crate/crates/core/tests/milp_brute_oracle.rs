//! Branch-and-bound against the exhaustive enumeration oracle.

mod common;

use common::{random_small_milp, rng};
use ddio_core::milp::{brute_force_solve, check_feasible, solve_lp, solve_milp, SolveStatus};

#[test]
fn matches_brute_force_on_200_instances() {
    let mut rng = rng(0xb2b);
    let mut optimal_seen = 0;
    for case in 0..200 {
        let p = random_small_milp(&mut rng);
        let bb = solve_milp(&p).unwrap();
        let brute = brute_force_solve(&p).unwrap();
        assert_eq!(bb.status, brute.status, "case {case}: status mismatch");
        if bb.status == SolveStatus::Optimal {
            optimal_seen += 1;
            let v_bb = bb.objective_value.unwrap();
            let v_br = brute.objective_value.unwrap();
            assert_eq!(v_bb, v_br, "case {case}: value mismatch");

            // Returned point is feasible and the LP relaxation dominates.
            let point = bb.point.unwrap();
            assert!(check_feasible(&p, &point).unwrap().is_feasible(), "case {case}");
            let lp = solve_lp(&p.relax_integrality()).unwrap();
            assert_eq!(lp.status, SolveStatus::Optimal);
            assert!(
                lp.objective_value.unwrap() >= v_bb - 1e-9 * (1.0 + v_bb.abs()),
                "case {case}: LP bound below MILP value"
            );
        }
    }
    assert!(optimal_seen >= 100, "only {optimal_seen} optimal cases");
}

#[test]
fn milp_is_deterministic_bit_for_bit() {
    let mut rng = rng(0xdede);
    for _ in 0..40 {
        let p = random_small_milp(&mut rng);
        let a = solve_milp(&p).unwrap();
        let b = solve_milp(&p).unwrap();
        assert_eq!(a, b);
        if let (Some(pa), Some(pb)) = (&a.point, &b.point) {
            for (x, y) in pa.iter().zip(pb) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }
}
