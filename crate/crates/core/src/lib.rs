//! Two-stage data-driven inverse optimization for mixed-integer linear
//! programs.
//!
//! The crate is split along the stages of the method:
//!
//! - [`milp`] — exact forward solver: dense bounded-variable simplex,
//!   depth-first branch-and-bound and an exhaustive enumeration oracle.
//! - [`model`] — the parametric forward problem family: linear objective
//!   `theta' f(x, s)` and threshold constraints `h+(x,s) <= phi+`,
//!   `h-(x,s) >= phi-`, compiled down to a [`milp::MilpProblem`].
//! - [`constraint`] — stage one: the supremal threshold parameters keeping
//!   every expert solution feasible, computed by a lattice meet over
//!   per-sample closed forms.
//! - [`loss`] — the suboptimality loss and dataset aggregates.
//! - [`learner`] — stage two: projected subgradient descent on the empirical
//!   suboptimality loss over the weight simplex.
//! - [`theory`] — numeric verification of the closed-form constants behind
//!   the generalization analysis.
//!
//! The crate is `no_std` (with `alloc`); IO, timing and the command-line
//! surface live in the companion `ddio-cli` crate.

#![no_std]
// Indexed loops are clearer for tableau/matrix operations.
#![allow(clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod math;

pub mod constraint;
pub mod dataset;
pub mod learner;
pub mod loss;
pub mod milp;
pub mod model;
pub mod theory;

pub use dataset::{Dataset, Sample};
pub use milp::{
    LinConstraint, MilpProblem, MilpSolution, Sense, SolveStatus, VarKind, VarSpec,
};
pub use model::{AffineMap, ParamFop, PhiComponentSet, PhiDomain, PhiParams, ThetaWeights};
