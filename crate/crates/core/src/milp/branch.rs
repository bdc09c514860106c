//! Depth-first branch-and-bound over the LP relaxation.
//!
//! Branching rule is fixed for determinism: the most fractional integer
//! variable (lowest index on ties), floor child explored first. The
//! incumbent is only replaced by a strictly better value, so the returned
//! point is the first optimum found in that fixed order.

use alloc::vec::Vec;

use super::simplex::{solve_bounded, DenseLp, LpOutcome, Workspace};
use super::{MilpError, MilpProblem, MilpSolution, INT_TOL};
use crate::math;

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Abort with a resource error after this many explored nodes.
    pub node_limit: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { node_limit: 20_000_000 }
    }
}

struct Node {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// Solve a MILP exactly. Integer variables must carry finite bounds.
pub fn solve_milp(problem: &MilpProblem) -> Result<MilpSolution, MilpError> {
    solve_milp_seeded(problem, &[], &SolverOptions::default())
}

/// [`solve_milp`] with warm incumbent candidates.
///
/// Each seed point that is feasible and integral primes the incumbent, which
/// tightens pruning from the first node on. The optimal *value* is identical
/// to a cold solve; among multiple optima the returned point may be a seed
/// rather than the first one found by the fixed branching order.
pub fn solve_milp_seeded(
    problem: &MilpProblem,
    seeds: &[Vec<f64>],
    options: &SolverOptions,
) -> Result<MilpSolution, MilpError> {
    problem.validate()?;
    let n = problem.num_vars();
    let int_vars: Vec<usize> =
        (0..n).filter(|&j| problem.vars[j].is_integral()).collect();
    for &j in &int_vars {
        if !problem.vars[j].lower.is_finite() || !problem.vars[j].upper.is_finite() {
            return Err(MilpError::IntegerBoundsRequired { var: j });
        }
    }

    let lp = DenseLp::from_problem(problem);
    let mut ws = Workspace::default();

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    for seed in seeds {
        if seed.len() != n {
            continue;
        }
        if !super::check_feasible(problem, seed).map(|r| r.is_feasible()).unwrap_or(false) {
            continue;
        }
        let value = problem.objective_value(seed);
        let better = match &incumbent {
            None => true,
            Some((best, _)) => value > best + improvement_tol(*best),
        };
        if better {
            incumbent = Some((value, seed.clone()));
        }
    }

    let root = Node {
        lower: problem.vars.iter().map(|v| v.lower).collect(),
        upper: problem.vars.iter().map(|v| v.upper).collect(),
    };
    let mut stack: Vec<Node> = Vec::new();
    stack.push(root);

    let mut nodes = 0usize;
    while let Some(node) = stack.pop() {
        nodes += 1;
        if nodes > options.node_limit {
            return Err(MilpError::NodeLimit {
                limit: options.node_limit,
                best: incumbent.map(|(v, p)| MilpSolution::optimal(p, v)),
            });
        }

        let outcome = solve_bounded(&lp, &node.lower, &node.upper, &mut ws)?;
        let (x, bound) = match outcome {
            LpOutcome::Infeasible => continue,
            LpOutcome::Unbounded => return Ok(MilpSolution::unbounded()),
            LpOutcome::Optimal { x, value } => (x, value),
        };

        if let Some((best, _)) = &incumbent {
            if bound <= best + improvement_tol(*best) {
                continue;
            }
        }

        // Most fractional integer variable, lowest index on ties.
        let mut branch: Option<(usize, f64, f64)> = None; // (var, value, frac score)
        for &j in &int_vars {
            let frac = x[j] - math::floor(x[j]);
            let score = frac.min(1.0 - frac);
            if score > INT_TOL {
                let better = match branch {
                    None => true,
                    Some((_, _, s)) => score > s + 1e-12,
                };
                if better {
                    branch = Some((j, x[j], score));
                }
            }
        }

        match branch {
            None => {
                // Integral: snap the integer coordinates and keep the point
                // if snapping preserved feasibility.
                let mut point = x;
                for &j in &int_vars {
                    point[j] = math::round(point[j]);
                }
                let feasible = super::check_feasible(problem, &point)
                    .map(|r| r.is_feasible())
                    .unwrap_or(false);
                if !feasible {
                    continue;
                }
                let value = problem.objective_value(&point);
                let better = match &incumbent {
                    None => true,
                    Some((best, _)) => value > best + improvement_tol(*best),
                };
                if better {
                    incumbent = Some((value, point));
                }
            }
            Some((j, xj, _)) => {
                let floor_j = math::floor(xj);
                let ceil_j = floor_j + 1.0;
                let mut up = Node { lower: node.lower.clone(), upper: node.upper.clone() };
                up.lower[j] = ceil_j.max(up.lower[j]);
                let mut down = node;
                down.upper[j] = floor_j.min(down.upper[j]);
                // Pushed ceil first so the floor child is explored first.
                stack.push(up);
                stack.push(down);
            }
        }
    }

    match incumbent {
        Some((value, point)) => Ok(MilpSolution::optimal(point, value)),
        None => Ok(MilpSolution::infeasible()),
    }
}

fn improvement_tol(reference: f64) -> f64 {
    1e-9 * (1.0 + math::abs(reference))
}
