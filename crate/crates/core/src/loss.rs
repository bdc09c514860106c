//! The suboptimality loss.
//!
//! For a point `x`, parameters `(theta, phi)` and an instance, the loss is
//! the optimality gap of `x` against the forward optimum plus a
//! `lambda`-weighted penalty on positive constraint residuals:
//!
//! ```text
//! relu( max_{x*} theta' f(x*)  -  theta' f(x) )  +  lambda * sum_j relu(g_j(x))
//! ```
//!
//! With `lambda > 0` the loss is zero iff `x` is feasible and optimal for
//! the forward problem.

use alloc::vec::Vec;
use thiserror::Error;

use crate::dataset::Dataset;
use crate::math;
use crate::milp::{solve_milp, MilpError, SolveStatus};
use crate::model::{build_fop, eval_constraints, eval_features, ModelError, ParamFop, PhiParams, ThetaWeights};

/// Totals below this are reported as numerically zero by callers that need
/// a stopping rule; the benchmark's integral data typically yields exact
/// zeros.
pub const ZERO_LOSS_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct LossValue {
    pub total: f64,
    /// First term: forward optimum minus the point's objective, clamped at
    /// zero.
    pub optimality_gap: f64,
    /// Second term: `lambda * sum relu(g_j)`.
    pub violation_penalty: f64,
    /// `max_{x*} theta' f(x*)` under the given parameters.
    pub forward_value: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LossError {
    #[error("forward problem infeasible under the given thresholds")]
    ForwardInfeasible,
    #[error("forward problem unbounded")]
    ForwardUnbounded,
    #[error("{0}")]
    Model(ModelError),
    #[error("solver: {0}")]
    Solver(MilpError),
    #[error("sample {sample}: {source}")]
    Sample { sample: usize, source: alloc::boxed::Box<LossError> },
    #[error("empty dataset")]
    EmptyDataset,
}

impl From<ModelError> for LossError {
    fn from(e: ModelError) -> Self {
        LossError::Model(e)
    }
}

impl From<MilpError> for LossError {
    fn from(e: MilpError) -> Self {
        LossError::Solver(e)
    }
}

/// Evaluate the loss for one point on one instance.
pub fn suboptimality_loss(
    model: &ParamFop,
    theta: &ThetaWeights,
    phi: &PhiParams,
    x: &[f64],
    lambda: f64,
) -> Result<LossValue, LossError> {
    let problem = build_fop(model, theta, phi)?;
    let sol = solve_milp(&problem)?;
    let forward_value = match sol.status {
        SolveStatus::Infeasible => return Err(LossError::ForwardInfeasible),
        SolveStatus::Unbounded => return Err(LossError::ForwardUnbounded),
        SolveStatus::Optimal => {
            let best = sol.point.as_ref().expect("optimal solution has a point");
            theta.dot(&eval_features(model, best)?)
        }
    };
    loss_given_forward(model, theta, phi, x, lambda, forward_value)
}

/// Loss with the forward optimum value already known; used by the learner
/// to reuse the solves performed for the subgradient.
pub fn loss_given_forward(
    model: &ParamFop,
    theta: &ThetaWeights,
    phi: &PhiParams,
    x: &[f64],
    lambda: f64,
    forward_value: f64,
) -> Result<LossValue, LossError> {
    let value_at_x = theta.dot(&eval_features(model, x)?);
    let optimality_gap = math::relu(forward_value - value_at_x);
    let violation_penalty = if lambda == 0.0 {
        0.0
    } else {
        let g = eval_constraints(model, phi, x)?;
        lambda * g.iter().map(|&v| math::relu(v)).sum::<f64>()
    };
    Ok(LossValue {
        total: optimality_gap + violation_penalty,
        optimality_gap,
        violation_penalty,
        forward_value,
    })
}

#[derive(Debug, Clone)]
pub struct DatasetLoss {
    pub mean: LossValue,
    pub per_sample: Vec<LossValue>,
}

/// Arithmetic mean of per-sample losses, accumulated in sample order so the
/// result is reproducible bit for bit.
pub fn dataset_loss(
    dataset: &Dataset,
    theta: &ThetaWeights,
    phi: &PhiParams,
    lambda: f64,
) -> Result<DatasetLoss, LossError> {
    if dataset.is_empty() {
        return Err(LossError::EmptyDataset);
    }
    let mut per_sample = Vec::with_capacity(dataset.len());
    for (n, sample) in dataset.samples.iter().enumerate() {
        let value = suboptimality_loss(&sample.model, theta, phi, &sample.expert, lambda)
            .map_err(|e| LossError::Sample { sample: n, source: alloc::boxed::Box::new(e) })?;
        per_sample.push(value);
    }
    let n = per_sample.len() as f64;
    let mut mean = LossValue {
        total: 0.0,
        optimality_gap: 0.0,
        violation_penalty: 0.0,
        forward_value: 0.0,
    };
    for v in &per_sample {
        mean.total += v.total;
        mean.optimality_gap += v.optimality_gap;
        mean.violation_penalty += v.violation_penalty;
        mean.forward_value += v.forward_value;
    }
    mean.total /= n;
    mean.optimality_gap /= n;
    mean.violation_penalty /= n;
    mean.forward_value /= n;
    Ok(DatasetLoss { mean, per_sample })
}
