//! Feasibility checking with the solver's tolerance rules.

use alloc::vec::Vec;

use super::{MilpError, MilpProblem, Sense, FEAS_TOL, INT_TOL};
use crate::math;

/// One violated condition, with the amount by which it is violated.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Row { index: usize, amount: f64 },
    LowerBound { var: usize, amount: f64 },
    UpperBound { var: usize, amount: f64 },
    Integrality { var: usize, distance: f64 },
}

#[derive(Debug, Clone, Default)]
pub struct FeasReport {
    pub violations: Vec<Violation>,
}

impl FeasReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Report every constraint, bound and integrality violation of `point`
/// beyond tolerance: rows and bounds at `1e-7` relative scale, integrality
/// at `1e-6` absolute.
pub fn check_feasible(problem: &MilpProblem, point: &[f64]) -> Result<FeasReport, MilpError> {
    if point.len() != problem.num_vars() {
        return Err(MilpError::DimensionMismatch {
            expected: problem.num_vars(),
            got: point.len(),
        });
    }
    let mut report = FeasReport::default();

    for (j, v) in problem.vars.iter().enumerate() {
        let x = point[j];
        if v.lower.is_finite() {
            let amount = v.lower - x;
            if amount > FEAS_TOL * (1.0 + math::abs(v.lower)) {
                report.violations.push(Violation::LowerBound { var: j, amount });
            }
        }
        if v.upper.is_finite() {
            let amount = x - v.upper;
            if amount > FEAS_TOL * (1.0 + math::abs(v.upper)) {
                report.violations.push(Violation::UpperBound { var: j, amount });
            }
        }
        if v.is_integral() {
            let distance = math::abs(x - math::round(x));
            if distance > INT_TOL {
                report.violations.push(Violation::Integrality { var: j, distance });
            }
        }
    }

    for (i, c) in problem.constraints.iter().enumerate() {
        let resid = c.residual(point);
        let tol = FEAS_TOL * (1.0 + math::abs(c.rhs));
        let amount = match c.sense {
            Sense::Le => resid,
            Sense::Ge => -resid,
            Sense::Eq => math::abs(resid),
        };
        if amount > tol {
            report.violations.push(Violation::Row { index: i, amount });
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{LinConstraint, VarSpec};
    use alloc::vec;

    fn upto3() -> MilpProblem {
        let mut p = MilpProblem::new("le3", vec![VarSpec::continuous(0.0, f64::INFINITY)]);
        p.add_constraint(LinConstraint::new(&[(0, 1.0)], Sense::Le, 3.0));
        p
    }

    #[test]
    fn boundary_counts_as_feasible() {
        let rep = check_feasible(&upto3(), &[3.0]).unwrap();
        assert!(rep.is_feasible());
    }

    #[test]
    fn within_scaled_tolerance_is_feasible() {
        let rep = check_feasible(&upto3(), &[3.000_000_2]).unwrap();
        assert!(rep.is_feasible());
    }

    #[test]
    fn clear_violation_is_reported() {
        let rep = check_feasible(&upto3(), &[3.1]).unwrap();
        assert_eq!(rep.violations.len(), 1);
        assert!(matches!(rep.violations[0], Violation::Row { index: 0, .. }));
    }

    #[test]
    fn dimension_mismatch_errors() {
        assert!(matches!(
            check_feasible(&upto3(), &[1.0, 2.0]),
            Err(MilpError::DimensionMismatch { .. })
        ));
    }
}
