//! Exact forward solver for small mixed-integer linear programs.
//!
//! Maximization convention throughout: `maximize c'x` subject to linear
//! rows `a'x {<=,=,>=} b`, variable bounds and integrality. The solver is a
//! dense bounded-variable two-phase simplex under a depth-first
//! branch-and-bound with most-fractional branching (lowest index on ties,
//! floor child first), which makes every solve deterministic for a fixed
//! input. [`brute_force_solve`] enumerates small all-integer grids and is
//! the testing oracle for [`solve_milp`].

mod branch;
mod brute;
mod feas;
mod simplex;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

pub use branch::{solve_milp, solve_milp_seeded, SolverOptions};
pub use brute::brute_force_solve;
pub use feas::{check_feasible, FeasReport, Violation};
pub use simplex::solve_lp;

/// Relative feasibility tolerance for constraint rows and bounds.
pub const FEAS_TOL: f64 = 1e-7;
/// Absolute integrality tolerance.
pub const INT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

/// A single decision variable: bounds plus integrality kind.
#[derive(Debug, Clone, PartialEq)]
pub struct VarSpec {
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
}

impl VarSpec {
    pub fn continuous(lower: f64, upper: f64) -> Self {
        VarSpec { lower, upper, kind: VarKind::Continuous }
    }

    pub fn integer(lower: f64, upper: f64) -> Self {
        VarSpec { lower, upper, kind: VarKind::Integer }
    }

    pub fn binary() -> Self {
        VarSpec { lower: 0.0, upper: 1.0, kind: VarKind::Binary }
    }

    pub fn is_integral(&self) -> bool {
        matches!(self.kind, VarKind::Integer | VarKind::Binary)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// One linear row `sum coeffs[j] * x[j] (sense) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinConstraint {
    pub coeffs: BTreeMap<usize, f64>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinConstraint {
    pub fn new(coeffs: &[(usize, f64)], sense: Sense, rhs: f64) -> Self {
        LinConstraint { coeffs: coeffs.iter().copied().collect(), sense, rhs }
    }

    /// Signed residual `a'x - rhs`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let mut lhs = 0.0;
        for (&j, &c) in &self.coeffs {
            lhs += c * x[j];
        }
        lhs - self.rhs
    }
}

/// A maximization MILP over explicit variables, rows and a sparse objective.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MilpProblem {
    pub name: String,
    pub vars: Vec<VarSpec>,
    pub constraints: Vec<LinConstraint>,
    pub objective: BTreeMap<usize, f64>,
}

impl MilpProblem {
    pub fn new(name: &str, vars: Vec<VarSpec>) -> Self {
        MilpProblem {
            name: String::from(name),
            vars,
            constraints: Vec::new(),
            objective: BTreeMap::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn add_constraint(&mut self, c: LinConstraint) {
        self.constraints.push(c);
    }

    pub fn set_objective(&mut self, coeffs: &[(usize, f64)]) {
        self.objective = coeffs.iter().copied().collect();
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        let mut v = 0.0;
        for (&j, &c) in &self.objective {
            v += c * x[j];
        }
        v
    }

    /// Copy of the problem with every variable made continuous
    /// (bounds kept, including the `[0,1]` box of binaries).
    pub fn relax_integrality(&self) -> MilpProblem {
        let mut out = self.clone();
        for v in &mut out.vars {
            v.kind = VarKind::Continuous;
        }
        out
    }

    /// Structural validation: index ranges, bound order, binary boxes,
    /// finite coefficients.
    pub fn validate(&self) -> Result<(), MilpError> {
        let n = self.vars.len();
        for (i, v) in self.vars.iter().enumerate() {
            if v.lower.is_nan() || v.upper.is_nan() {
                return Err(MilpError::structure(format_args!("var {i}: NaN bound")));
            }
            if v.lower > v.upper {
                return Err(MilpError::structure(format_args!(
                    "var {i}: lower {} > upper {}",
                    v.lower, v.upper
                )));
            }
            if v.kind == VarKind::Binary && (v.lower != 0.0 || v.upper != 1.0) {
                return Err(MilpError::structure(format_args!(
                    "var {i}: binary requires bounds [0,1]"
                )));
            }
        }
        for (r, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(MilpError::structure(format_args!("row {r}: non-finite rhs")));
            }
            for (&j, &a) in &c.coeffs {
                if j >= n {
                    return Err(MilpError::structure(format_args!(
                        "row {r}: var index {j} out of range (n = {n})"
                    )));
                }
                if !a.is_finite() {
                    return Err(MilpError::structure(format_args!(
                        "row {r}: non-finite coefficient on var {j}"
                    )));
                }
            }
        }
        for (&j, &c) in &self.objective {
            if j >= n {
                return Err(MilpError::structure(format_args!(
                    "objective: var index {j} out of range (n = {n})"
                )));
            }
            if !c.is_finite() {
                return Err(MilpError::structure(format_args!(
                    "objective: non-finite coefficient on var {j}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver outcome; `point` and `objective_value` are present iff optimal.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub status: SolveStatus,
    pub point: Option<Vec<f64>>,
    pub objective_value: Option<f64>,
}

impl MilpSolution {
    pub fn infeasible() -> Self {
        MilpSolution { status: SolveStatus::Infeasible, point: None, objective_value: None }
    }

    pub fn unbounded() -> Self {
        MilpSolution { status: SolveStatus::Unbounded, point: None, objective_value: None }
    }

    pub fn optimal(point: Vec<f64>, value: f64) -> Self {
        MilpSolution {
            status: SolveStatus::Optimal,
            point: Some(point),
            objective_value: Some(value),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MilpError {
    #[error("malformed problem: {0}")]
    Structure(String),
    #[error("integer variable {var} requires finite bounds")]
    IntegerBoundsRequired { var: usize },
    #[error("enumeration grid has {cells} cells, limit {limit}")]
    GridTooLarge { cells: u128, limit: u128 },
    #[error("brute force requires integral variables, var {var} is continuous")]
    ContinuousUnsupported { var: usize },
    #[error("node limit {limit} exceeded")]
    NodeLimit { limit: usize, best: Option<MilpSolution> },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl MilpError {
    fn structure(args: core::fmt::Arguments<'_>) -> Self {
        MilpError::Structure(alloc::fmt::format(args))
    }
}
