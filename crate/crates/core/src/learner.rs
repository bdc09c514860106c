//! Stage two: projected subgradient descent on the empirical suboptimality
//! loss over the weight simplex.
//!
//! Each iteration solves the forward problem for every sample at the current
//! weights, takes the mean feature difference
//! `F = f(x*(theta, s)) - f(expert(s))` as the step direction, moves by
//! `alpha_k = k^(-1/2) / ||mean F||` and projects back onto the shifted
//! simplex. The returned weights are the best iterate by training loss; the
//! loss is evaluated from the same solves as the step, so each iteration
//! costs one forward solve per sample.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use thiserror::Error;

use crate::dataset::Dataset;
use crate::loss::LossError;
use crate::math;
use crate::milp::{solve_milp_seeded, MilpError, SolveStatus, SolverOptions};
use crate::model::{build_fop, eval_features, ModelError, PhiParams, ThetaWeights};

#[derive(Debug, Clone)]
pub struct LearnerConfig {
    /// Iteration cap K.
    pub max_iters: usize,
    /// Stop as soon as the training loss falls to or below this.
    pub zero_threshold: f64,
    /// Initial weights; `None` means the uniform center of the simplex.
    pub theta_init: Option<ThetaWeights>,
    /// Simplex shift: weights live in `Delta^{D-1} + offset * 1`.
    pub simplex_offset: f64,
    /// Record a weight snapshot on every trace row.
    pub record_theta: bool,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            max_iters: 2000,
            zero_threshold: crate::loss::ZERO_LOSS_THRESHOLD,
            theta_init: None,
            simplex_offset: 0.0,
            record_theta: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    /// 1-based iteration index.
    pub iter: usize,
    /// Training loss (gap term only) at this iterate.
    pub loss: f64,
    /// Norm of the mean feature difference.
    pub step_norm: f64,
    pub theta: Option<ThetaWeights>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ZeroLoss,
    ZeroSubgradient,
    IterationCap,
}

#[derive(Debug, Clone)]
pub struct LearnTrace {
    pub rows: Vec<TraceRow>,
    /// 1-based index of the iterate with the smallest recorded loss.
    pub best_iter: usize,
    pub best_loss: f64,
    pub converged: bool,
    pub stop: StopReason,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnError {
    #[error("empty dataset")]
    EmptyDataset,
    #[error("max_iters must be at least 1")]
    BadConfig,
    #[error("initial weights are not in the simplex")]
    BadInit,
    #[error("sample {sample}: forward problem infeasible")]
    ForwardInfeasible { sample: usize },
    #[error("sample {sample}: forward problem unbounded")]
    ForwardUnbounded { sample: usize },
    #[error("sample {sample}: {source}")]
    Solver { sample: usize, source: MilpError },
    #[error("sample {sample}: {source}")]
    Model { sample: usize, source: ModelError },
}

impl LearnError {
    pub fn as_loss_error(&self) -> Option<LossError> {
        match self {
            LearnError::ForwardInfeasible { .. } => Some(LossError::ForwardInfeasible),
            LearnError::ForwardUnbounded { .. } => Some(LossError::ForwardUnbounded),
            _ => None,
        }
    }
}

/// Result of one forward solve inside a learner iteration.
#[derive(Debug, Clone)]
pub struct ForwardSolve {
    pub features: Vec<f64>,
    pub point: Vec<f64>,
}

pub type BatchOutcome = Result<ForwardSolve, LearnError>;

/// Index-parallel executor for the per-sample forward solves of one
/// iteration. Implementations must return outcomes in index order;
/// reductions stay in that order, so results do not depend on scheduling.
pub trait BatchRunner: Sync {
    fn run(&self, count: usize, task: &(dyn Fn(usize) -> BatchOutcome + Sync)) -> Vec<BatchOutcome>;
}

/// Runs every task on the calling thread.
pub struct SequentialRunner;

impl BatchRunner for SequentialRunner {
    fn run(&self, count: usize, task: &(dyn Fn(usize) -> BatchOutcome + Sync)) -> Vec<BatchOutcome> {
        (0..count).map(task).collect()
    }
}

/// Euclidean projection onto `{ w >= offset, sum w = 1 + D * offset }`:
/// shift by the offset, project onto the standard simplex by the
/// sort-and-threshold rule, shift back.
pub fn project_simplex(v: &[f64], offset: f64) -> ThetaWeights {
    let d = v.len();
    debug_assert!(d >= 1);
    let shifted: Vec<f64> = v.iter().map(|&x| x - offset).collect();
    let mut sorted = shifted.clone();
    sorted.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (j as f64 + 1.0);
        if u - candidate > 0.0 {
            tau = candidate;
        }
    }
    let out: Vec<f64> = shifted.iter().map(|&x| math::relu(x - tau) + offset).collect();
    ThetaWeights(out)
}

struct IterationOutput {
    mean_f: Vec<f64>,
    loss: f64,
    new_points: Vec<(usize, Vec<f64>)>,
}

/// Per-sample pools of integral points seen in earlier iterations; they
/// seed the branch-and-bound incumbent, which only tightens pruning and
/// never changes the optimal value.
struct SolutionPools {
    points: Vec<Vec<Vec<f64>>>,
    seen: Vec<BTreeSet<Vec<u64>>>,
    cap: usize,
}

impl SolutionPools {
    fn new(n: usize) -> Self {
        SolutionPools {
            points: alloc::vec![Vec::new(); n],
            seen: alloc::vec![BTreeSet::new(); n],
            cap: 32,
        }
    }

    fn insert(&mut self, sample: usize, point: Vec<f64>) {
        let key: Vec<u64> = point.iter().map(|x| x.to_bits()).collect();
        if self.seen[sample].insert(key) {
            if self.points[sample].len() == self.cap {
                self.points[sample].remove(0);
            }
            self.points[sample].push(point);
        }
    }
}

fn run_iteration(
    dataset: &Dataset,
    phi: &PhiParams,
    theta: &ThetaWeights,
    expert_features: &[Vec<f64>],
    pools: &SolutionPools,
    runner: &dyn BatchRunner,
) -> Result<IterationOutput, LearnError> {
    let n = dataset.len();
    let solver_options = SolverOptions::default();
    let task = |i: usize| -> BatchOutcome {
        let sample = &dataset.samples[i];
        let problem = build_fop(&sample.model, theta, phi)
            .map_err(|source| LearnError::Model { sample: i, source })?;
        let sol = solve_milp_seeded(&problem, &pools.points[i], &solver_options)
            .map_err(|source| LearnError::Solver { sample: i, source })?;
        match sol.status {
            SolveStatus::Infeasible => Err(LearnError::ForwardInfeasible { sample: i }),
            SolveStatus::Unbounded => Err(LearnError::ForwardUnbounded { sample: i }),
            SolveStatus::Optimal => {
                let point = sol.point.expect("optimal solution has a point");
                let features = eval_features(&sample.model, &point)
                    .map_err(|source| LearnError::Model { sample: i, source })?;
                Ok(ForwardSolve { features, point })
            }
        }
    };
    let outcomes = runner.run(n, &task);

    let d = theta.dim();
    let mut mean_f = alloc::vec![0.0; d];
    let mut loss = 0.0;
    let mut new_points = Vec::with_capacity(n);
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let solve = outcome?;
        // Gap term, clamped: the forward optimum dominates any feasible
        // point, so this is nonnegative up to float noise.
        let gap = math::relu(theta.dot(&solve.features) - theta.dot(&expert_features[i]));
        loss += gap;
        for k in 0..d {
            mean_f[k] += solve.features[k] - expert_features[i][k];
        }
        new_points.push((i, solve.point));
    }
    let inv = 1.0 / n as f64;
    loss *= inv;
    for v in mean_f.iter_mut() {
        *v *= inv;
    }
    Ok(IterationOutput { mean_f, loss, new_points })
}

/// Mean feature difference `(1/N) sum_n [ f(x*(theta, s_n)) - f(expert_n) ]`
/// at the given weights.
pub fn subgradient(
    dataset: &Dataset,
    theta: &ThetaWeights,
    phi: &PhiParams,
    runner: &dyn BatchRunner,
) -> Result<Vec<f64>, LearnError> {
    if dataset.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    let expert_features = expert_feature_table(dataset)?;
    let pools = SolutionPools::new(dataset.len());
    let out = run_iteration(dataset, phi, theta, &expert_features, &pools, runner)?;
    Ok(out.mean_f)
}

fn expert_feature_table(dataset: &Dataset) -> Result<Vec<Vec<f64>>, LearnError> {
    dataset
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            eval_features(&s.model, &s.expert)
                .map_err(|source| LearnError::Model { sample: i, source })
        })
        .collect()
}

/// Projected subgradient descent with step `alpha_k = k^(-1/2) / ||mean F||`.
///
/// Stops early when the training loss reaches `zero_threshold` or the mean
/// feature difference vanishes (at which point the loss is already zero on
/// every sample). Hitting the iteration cap is not an error; the trace's
/// `converged` flag reports it. `on_iter` fires after each recorded row.
pub fn run_algorithm1(
    dataset: &Dataset,
    phi: &PhiParams,
    config: &LearnerConfig,
    runner: &dyn BatchRunner,
    mut on_iter: Option<&mut dyn FnMut(&TraceRow)>,
) -> Result<(ThetaWeights, LearnTrace), LearnError> {
    if dataset.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    if config.max_iters == 0 {
        return Err(LearnError::BadConfig);
    }
    let d = dataset.samples[0].model.num_features();
    let mut theta = match &config.theta_init {
        Some(t) => {
            if t.dim() != d || !t.in_simplex(config.simplex_offset, 1e-9) {
                return Err(LearnError::BadInit);
            }
            t.clone()
        }
        None => ThetaWeights::uniform(d, config.simplex_offset),
    };

    let expert_features = expert_feature_table(dataset)?;
    let mut pools = SolutionPools::new(dataset.len());

    let mut rows: Vec<TraceRow> = Vec::new();
    let mut best: Option<(usize, f64, ThetaWeights)> = None;
    let mut stop = StopReason::IterationCap;

    for k in 1..=config.max_iters {
        let out = run_iteration(dataset, phi, &theta, &expert_features, &pools, runner)?;
        for (i, point) in out.new_points {
            pools.insert(i, point);
        }
        let step_norm = math::norm2(&out.mean_f);
        let row = TraceRow {
            iter: k,
            loss: out.loss,
            step_norm,
            theta: config.record_theta.then(|| theta.clone()),
        };
        if let Some(cb) = on_iter.as_deref_mut() {
            cb(&row);
        }
        rows.push(row);

        let improves = match &best {
            None => true,
            Some((_, best_loss, _)) => out.loss < *best_loss,
        };
        if improves {
            best = Some((k, out.loss, theta.clone()));
        }

        if out.loss <= config.zero_threshold {
            stop = StopReason::ZeroLoss;
            break;
        }
        if step_norm == 0.0 {
            stop = StopReason::ZeroSubgradient;
            break;
        }
        if k == config.max_iters {
            break;
        }

        let alpha = 1.0 / (math::sqrt(k as f64) * step_norm);
        let moved: Vec<f64> =
            theta.0.iter().zip(&out.mean_f).map(|(&t, &g)| t - alpha * g).collect();
        theta = project_simplex(&moved, config.simplex_offset);
    }

    let (best_iter, best_loss, best_theta) = best.expect("at least one iteration ran");
    let converged = best_loss <= config.zero_threshold;
    let trace = LearnTrace { rows, best_iter, best_loss, converged, stop };
    Ok((best_theta, trace))
}
