//! Exhaustive enumeration oracle for all-integer problems.

use alloc::vec;
use alloc::vec::Vec;

use super::{check_feasible, MilpError, MilpProblem, MilpSolution};
use crate::math;

const GRID_LIMIT: u128 = 10_000_000;

/// Exact optimum by enumerating the full integer grid in lexicographic
/// order; among optima the lexicographically smallest point is returned.
/// Every variable must be integral with finite bounds and the grid must stay
/// under `10^7` points.
pub fn brute_force_solve(problem: &MilpProblem) -> Result<MilpSolution, MilpError> {
    problem.validate()?;
    let n = problem.num_vars();

    let mut lows: Vec<i64> = Vec::with_capacity(n);
    let mut highs: Vec<i64> = Vec::with_capacity(n);
    let mut cells: u128 = 1;
    for (j, v) in problem.vars.iter().enumerate() {
        if !v.is_integral() {
            return Err(MilpError::ContinuousUnsupported { var: j });
        }
        if !v.lower.is_finite() || !v.upper.is_finite() {
            return Err(MilpError::IntegerBoundsRequired { var: j });
        }
        let lo = math::ceil(v.lower - super::INT_TOL) as i64;
        let hi = math::floor(v.upper + super::INT_TOL) as i64;
        if lo > hi {
            return Ok(MilpSolution::infeasible());
        }
        lows.push(lo);
        highs.push(hi);
        cells = cells.saturating_mul((hi - lo + 1) as u128);
        if cells > GRID_LIMIT {
            return Err(MilpError::GridTooLarge { cells, limit: GRID_LIMIT });
        }
    }

    let mut current = lows.clone();
    let mut point = vec![0.0; n];
    let mut best: Option<(f64, Vec<f64>)> = None;
    loop {
        for j in 0..n {
            point[j] = current[j] as f64;
        }
        if check_feasible(problem, &point)?.is_feasible() {
            let value = problem.objective_value(&point);
            // Strict improvement keeps the first (lexicographically
            // smallest) optimum.
            let better = match &best {
                None => true,
                Some((bv, _)) => value > *bv + 1e-12 * (1.0 + math::abs(*bv)),
            };
            if better {
                best = Some((value, point.clone()));
            }
        }

        // Odometer increment, last coordinate fastest.
        let mut j = n;
        loop {
            if j == 0 {
                match best {
                    Some((value, point)) => return Ok(MilpSolution::optimal(point, value)),
                    None => return Ok(MilpSolution::infeasible()),
                }
            }
            j -= 1;
            if current[j] < highs[j] {
                current[j] += 1;
                break;
            }
            current[j] = lows[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{LinConstraint, Sense, SolveStatus, VarSpec};
    use alloc::vec;

    #[test]
    fn lexicographic_tie_break() {
        // maximize x+y, x,y binary, x+y <= 1: optima (0,1) and (1,0);
        // enumeration order keeps (0,1).
        let mut p = MilpProblem::new("tie", vec![VarSpec::binary(), VarSpec::binary()]);
        p.add_constraint(LinConstraint::new(&[(0, 1.0), (1, 1.0)], Sense::Le, 1.0));
        p.set_objective(&[(0, 1.0), (1, 1.0)]);
        let sol = brute_force_solve(&p).unwrap();
        assert_eq!(sol.objective_value.unwrap(), 1.0);
        assert_eq!(sol.point.unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn empty_feasible_set() {
        let mut p = MilpProblem::new("empty", vec![VarSpec::binary()]);
        p.add_constraint(LinConstraint::new(&[(0, 1.0)], Sense::Le, -1.0));
        let sol = brute_force_solve(&p).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn rejects_continuous_vars() {
        let p = MilpProblem::new("c", vec![VarSpec::continuous(0.0, 1.0)]);
        assert!(matches!(
            brute_force_solve(&p),
            Err(MilpError::ContinuousUnsupported { var: 0 })
        ));
    }

    #[test]
    fn rejects_huge_grids() {
        let p = MilpProblem::new(
            "huge",
            vec![VarSpec::integer(0.0, 10_000.0), VarSpec::integer(0.0, 10_000.0)],
        );
        assert!(matches!(brute_force_solve(&p), Err(MilpError::GridTooLarge { .. })));
    }
}
