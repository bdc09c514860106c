//! The two-stage learning pipeline: thresholds by lattice meet, then
//! objective weights by projected subgradient descent, with stage timings
//! and held-out evaluation.

use std::time::Instant;

use ddio_core::constraint::{
    phi_sup_dataset_report, verify_dominance, ConstraintError, DominanceReport,
    PhiLearnReport,
};
use ddio_core::learner::{run_algorithm1, LearnError, LearnTrace, LearnerConfig, TraceRow};
use ddio_core::loss::loss_given_forward;
use ddio_core::milp::{solve_milp, SolveStatus};
use ddio_core::model::{build_fop, eval_constraints, eval_features};
use ddio_core::{Dataset, PhiParams, ThetaWeights};

use crate::exec::ThreadedRunner;

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Iteration cap for the subgradient stage.
    pub max_iters: usize,
    /// Numeric zero for the training loss.
    pub zero_threshold: f64,
    /// Target mean loss of the second stage; the effective stopping
    /// threshold is `max(epsilon, zero_threshold)`.
    pub epsilon: f64,
    /// Simplex shift for the weight space.
    pub simplex_offset: f64,
    /// Worker threads for per-sample forward solves (0 = all CPUs).
    pub jobs: usize,
    /// Keep weight snapshots in the trace.
    pub record_theta: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            max_iters: 2000,
            zero_threshold: 1e-6,
            epsilon: 0.0,
            simplex_offset: crate::sched::THETA_OFFSET,
            jobs: 1,
            record_theta: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error("constraint stage: {0}")]
    DataInconsistency(ConstraintError),
    #[error("objective stage: {0}")]
    Learn(LearnError),
}

/// Everything a finished run reports.
#[derive(Debug, Clone)]
pub struct LearnResult {
    pub theta: ThetaWeights,
    pub phi: PhiParams,
    pub trace: LearnTrace,
    /// Wall-clock per recorded iteration, milliseconds.
    pub iter_ms: Vec<f64>,
    pub phi_report: PhiLearnReport,
    /// Dominance check against the dataset truth, when present.
    pub dominance: Option<DominanceReport>,
    pub stage1_ms: f64,
    pub stage2_ms: f64,
    /// Milliseconds from run start to the end of the constraint stage and
    /// to the start of the objective stage; the first never exceeds the
    /// second.
    pub stage1_end_mark: f64,
    pub stage2_start_mark: f64,
    pub converged: bool,
    pub train_loss: f64,
    pub config: PipelineConfig,
}

/// Learn thresholds, then weights, under one dataset.
pub fn run_pipeline(dataset: &Dataset, config: &PipelineConfig) -> Result<LearnResult, PipelineError> {
    let t0 = Instant::now();
    let (phi, phi_report) =
        phi_sup_dataset_report(dataset).map_err(PipelineError::DataInconsistency)?;
    let stage1_end = Instant::now();
    let stage1_ms = (stage1_end - t0).as_secs_f64() * 1e3;

    let dominance = dataset
        .truth
        .as_ref()
        .map(|(_, phi_true)| verify_dominance(&phi, phi_true));

    let learner_config = LearnerConfig {
        max_iters: config.max_iters,
        zero_threshold: config.epsilon.max(config.zero_threshold),
        theta_init: None,
        simplex_offset: config.simplex_offset,
        record_theta: config.record_theta,
    };
    let runner = ThreadedRunner::new(config.jobs);

    let stage2_start = Instant::now();
    let mut iter_ms: Vec<f64> = Vec::new();
    let mut last = stage2_start;
    let mut on_iter = |_row: &TraceRow| {
        let now = Instant::now();
        iter_ms.push((now - last).as_secs_f64() * 1e3);
        last = now;
    };
    let (theta, trace) =
        run_algorithm1(dataset, &phi, &learner_config, &runner, Some(&mut on_iter))
            .map_err(PipelineError::Learn)?;
    let stage2_ms = stage2_start.elapsed().as_secs_f64() * 1e3;

    Ok(LearnResult {
        theta,
        phi,
        converged: trace.converged,
        train_loss: trace.best_loss,
        trace,
        iter_ms,
        phi_report,
        dominance,
        stage1_ms,
        stage2_ms,
        stage1_end_mark: (stage1_end - t0).as_secs_f64() * 1e3,
        stage2_start_mark: (stage2_start - t0).as_secs_f64() * 1e3,
        config: config.clone(),
    })
}

/// Held-out evaluation of learned parameters.
#[derive(Debug, Clone, Default)]
pub struct EvalReport {
    pub test_n: usize,
    /// Mean suboptimality loss with no violation weight.
    pub mean_sub0: f64,
    /// Mean suboptimality loss with violation weight one.
    pub mean_sub1: f64,
    /// Fraction of samples whose expert attains the forward optimal value.
    pub imitation_rate: f64,
    /// Fraction of samples whose expert violates some learned threshold;
    /// this is the channel by which too-tight thresholds show up on fresh
    /// data.
    pub expert_violation_rate: f64,
    /// Dominance of the learned thresholds over the test truth, if known.
    pub dominance_ok: Option<bool>,
    /// Samples whose forward problem failed to solve (counted out of the
    /// means).
    pub forward_errors: usize,
    /// Per-sample rows `(gap, penalty, total)` at violation weight one.
    pub per_sample: Vec<(f64, f64, f64)>,
}

/// Evaluate `(theta, phi)` on a dataset; empty datasets produce an empty
/// report rather than an error.
pub fn evaluate(
    theta: &ThetaWeights,
    phi: &PhiParams,
    test: &Dataset,
    jobs: usize,
) -> EvalReport {
    let mut report = EvalReport { test_n: test.len(), ..Default::default() };
    if test.is_empty() {
        return report;
    }
    let runner = ThreadedRunner::new(jobs);
    use ddio_core::learner::{BatchOutcome, BatchRunner, ForwardSolve};
    let task = |i: usize| -> BatchOutcome {
        let sample = &test.samples[i];
        let problem = build_fop(&sample.model, theta, phi)
            .map_err(|source| LearnError::Model { sample: i, source })?;
        let sol = solve_milp(&problem)
            .map_err(|source| LearnError::Solver { sample: i, source })?;
        match sol.status {
            SolveStatus::Optimal => {
                let point = sol.point.expect("optimal solution has a point");
                let features = eval_features(&sample.model, &point)
                    .map_err(|source| LearnError::Model { sample: i, source })?;
                Ok(ForwardSolve { features, point })
            }
            SolveStatus::Infeasible => Err(LearnError::ForwardInfeasible { sample: i }),
            SolveStatus::Unbounded => Err(LearnError::ForwardUnbounded { sample: i }),
        }
    };
    let outcomes = runner.run(test.len(), &task);

    let mut solved = 0usize;
    let mut imitated = 0usize;
    let mut violated = 0usize;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let solve = match outcome {
            Ok(s) => s,
            Err(_) => {
                report.forward_errors += 1;
                continue;
            }
        };
        let sample = &test.samples[i];
        let forward_value = theta.dot(&solve.features);
        let sub0 =
            loss_given_forward(&sample.model, theta, phi, &sample.expert, 0.0, forward_value)
                .expect("shapes already checked");
        let sub1 =
            loss_given_forward(&sample.model, theta, phi, &sample.expert, 1.0, forward_value)
                .expect("shapes already checked");
        solved += 1;
        report.mean_sub0 += sub0.total;
        report.mean_sub1 += sub1.total;
        report.per_sample.push((sub1.optimality_gap, sub1.violation_penalty, sub1.total));
        let expert_value = theta.dot(
            &eval_features(&sample.model, &sample.expert).expect("shapes already checked"),
        );
        if (forward_value - expert_value).abs() <= 1e-6 * (1.0 + forward_value.abs()) {
            imitated += 1;
        }
        let g = eval_constraints(&sample.model, phi, &sample.expert)
            .expect("shapes already checked");
        if g.iter().any(|&v| v > 1e-7) {
            violated += 1;
        }
    }
    if solved > 0 {
        report.mean_sub0 /= solved as f64;
        report.mean_sub1 /= solved as f64;
        report.imitation_rate = imitated as f64 / solved as f64;
        report.expert_violation_rate = violated as f64 / solved as f64;
    }
    report.dominance_ok = test
        .truth
        .as_ref()
        .map(|(_, phi_true)| verify_dominance(phi, phi_true).dominates);
    report
}
