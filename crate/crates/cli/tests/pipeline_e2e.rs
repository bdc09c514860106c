//! End-to-end pipeline behavior against hand-computed values and
//! independent oracles.

use ddio_cli::pipeline::{evaluate, run_pipeline, PipelineConfig};
use ddio_cli::sched::{
    encode_fop, gen_trial, make_dataset, phi_matrix_to_params, solution_to_point,
    SchedInstance, SchedSolution,
};
use ddio_core::constraint::phi_sup_dataset;
use ddio_core::learner::{run_algorithm1, subgradient, LearnerConfig, SequentialRunner};
use ddio_core::loss::{dataset_loss, suboptimality_loss};
use ddio_core::{PhiParams, ThetaWeights};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// p = (2,3), r = (0,0); job 0 first gives starts (0,2), features
/// (-2,-5); job 1 first gives starts (3,0), features (-5,-3).
fn two_job_sample() -> (SchedInstance, SchedSolution) {
    let inst = SchedInstance { d: 2, r: vec![0, 0], p: vec![2, 3] };
    let expert = SchedSolution { b: vec![0, 2], x: vec![0, 1, 0, 0] };
    (inst, expert)
}

#[test]
fn hand_computed_gap_under_skewed_weights() {
    let (inst, expert) = two_job_sample();
    let model = encode_fop(&inst);
    let theta = ThetaWeights(vec![0.1, 0.9]);
    let phi = phi_matrix_to_params(2, &[0, 1, 1, 0]);
    let point = solution_to_point(2, &expert);
    // Expert value 0.1*(-2) + 0.9*(-5) = -4.7; optimum is job-1-first at
    // 0.1*(-5) + 0.9*(-3) = -3.2; gap 1.5.
    let loss = suboptimality_loss(&model, &theta, &phi, &point, 0.0).unwrap();
    assert!((loss.optimality_gap - 1.5).abs() < 1e-12, "gap {}", loss.optimality_gap);
    assert!((loss.forward_value - (-3.2)).abs() < 1e-12);
}

#[test]
fn hand_computed_subgradient() {
    let (inst, expert) = two_job_sample();
    let ds = make_dataset(&[inst], &[expert], None);
    let theta = ThetaWeights(vec![0.1, 0.9]);
    let phi = phi_matrix_to_params(2, &[0, 1, 1, 0]);
    // F = f(job-1-first) - f(job-0-first) = (-5,-3) - (-2,-5) = (-3, 2).
    let g = subgradient(&ds, &theta, &phi, &SequentialRunner).unwrap();
    assert!((g[0] - (-3.0)).abs() < 1e-12);
    assert!((g[1] - 2.0).abs() < 1e-12);
}

#[test]
fn two_job_learning_reaches_zero_quickly() {
    let (inst, expert) = two_job_sample();
    let ds = make_dataset(&[inst], &[expert], None);
    let phi = phi_matrix_to_params(2, &[0, 1, 1, 0]);
    let config = LearnerConfig { max_iters: 50, ..Default::default() };
    let (theta, trace) = run_algorithm1(&ds, &phi, &config, &SequentialRunner, None).unwrap();
    assert!(trace.converged, "no zero loss within 50 iterations: {trace:?}");
    // Job 0 first must be weakly preferred: 2 theta_0 + 5 theta_1 <=
    // 5 theta_0 + 3 theta_1, i.e. 2 theta_1 <= 3 theta_0.
    assert!(2.0 * theta.0[1] <= 3.0 * theta.0[0] + 1e-9, "theta {theta:?}");
}

#[test]
fn iterates_stay_in_the_simplex_and_best_prefix_is_monotone() {
    let (truth, instances, experts) = gen_trial(3, 4, 0, 77, 0).unwrap();
    let ds = make_dataset(&instances, &experts, Some(&truth));
    let phi = phi_sup_dataset(&ds).unwrap();
    let offset = ddio_cli::sched::THETA_OFFSET;
    let mut last_best = f64::INFINITY;
    for cap in [1, 2, 5, 10, 40] {
        let config = LearnerConfig {
            max_iters: cap,
            simplex_offset: offset,
            record_theta: true,
            // Force a full run to the cap so prefixes are comparable.
            zero_threshold: -1.0,
            ..Default::default()
        };
        let (_, trace) = run_algorithm1(&ds, &phi, &config, &SequentialRunner, None).unwrap();
        for row in &trace.rows {
            let theta = row.theta.as_ref().unwrap();
            assert!(theta.in_simplex(offset, 1e-9), "iterate left the simplex");
        }
        assert!(trace.best_loss <= last_best + 1e-15, "best-prefix not monotone");
        last_best = trace.best_loss;
    }
}

/// Under the true weights and the learned thresholds, every training
/// sample has zero loss (data is realizable after the constraint stage).
#[test]
fn zero_loss_under_theta_true_and_phi_sup() {
    for trial in 0..20 {
        let (truth, instances, experts) = gen_trial(4, 6, 2, 1234, trial).unwrap();
        let ds = make_dataset(&instances, &experts, Some(&truth));
        let phi = phi_sup_dataset(&ds).unwrap();
        let loss = dataset_loss(&ds, &truth.theta, &phi, 1.0).unwrap();
        for (n, v) in loss.per_sample.iter().enumerate() {
            assert!(
                v.total <= 1e-9,
                "trial {trial} sample {n}: loss {} under the truth",
                v.total
            );
        }
    }
}

/// Exhaustive supremality oracle on small instances: the learned
/// thresholds equal the tightest binary vector keeping every expert
/// feasible, over the full enumeration of candidates.
#[test]
fn phi_sup_matches_exhaustive_search_on_small_d() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for case in 0..50 {
        let d = if rng.random_bool(0.5) { 2 } else { 3 };
        let n = rng.random_range(1..=6);
        let trial = rng.random_range(0..1000);
        let (truth, instances, experts) = gen_trial(d, n, 1, 808, trial).unwrap();
        let ds = make_dataset(&instances, &experts, Some(&truth));
        let learned = phi_sup_dataset(&ds).unwrap();

        let pairs = d * (d - 1);
        let mut best: Option<PhiParams> = None;
        for mask in 0u32..1 << pairs {
            let cand = PhiParams::new(
                (0..pairs).map(|j| ((mask >> j) & 1) as f64).collect(),
                vec![],
            );
            let ok = ds.samples.iter().all(|s| {
                ddio_core::model::eval_constraints(&s.model, &cand, &s.expert)
                    .unwrap()
                    .iter()
                    .all(|&g| g <= 1e-9)
            });
            if ok {
                best = Some(match best {
                    None => cand,
                    Some(b) => {
                        if cand.lattice_ge(&b) {
                            cand
                        } else {
                            b
                        }
                    }
                });
            }
        }
        assert!(
            learned.values_eq(&best.unwrap()),
            "case {case}: exhaustive supremum differs"
        );
    }
}

/// Binding-sample witnesses: tightening any learned component by one
/// admissible step cuts off its binding sample.
#[test]
fn binding_samples_witness_maximality() {
    for trial in 0..10 {
        let (truth, instances, experts) = gen_trial(4, 8, 2, 606, trial).unwrap();
        let ds = make_dataset(&instances, &experts, Some(&truth));
        let (learned, report) =
            ddio_core::constraint::phi_sup_dataset_report(&ds).unwrap();
        for comp in &report.components {
            let domain = ds.samples[0].model.phi_domain.plus[comp.index].clone();
            let Some(tighter) = domain.next_below(comp.learned, 1e-9) else {
                continue; // interval exhausted
            };
            let mut phi = learned.clone();
            phi.plus[comp.index] = tighter;
            let witness = &ds.samples[comp.binding_sample];
            let g = ddio_core::model::eval_constraints(&witness.model, &phi, &witness.expert)
                .unwrap();
            assert!(
                g.iter().any(|&v| v > 1e-9),
                "trial {trial}: tightening h+[{}] kept the binding sample feasible",
                comp.index
            );
        }
    }
}

/// Threshold-recovery rate is nondecreasing in the training-set size,
/// measured over 50 trials per N.
#[test]
fn phi_recovery_rate_monotone_over_50_trials() {
    let config = ddio_cli::curve::CurveConfig {
        d: 4,
        ns: vec![1, 2, 5, 10, 20],
        trials: 50,
        seed: 7,
        forced_precedences: 3,
        iter_cap: 2000,
        jobs: 0,
    };
    let table = ddio_cli::curve::generalization_curve(&config);
    for pair in table.rows.windows(2) {
        let recovery_small = 1.0 - pair[0].phi_mismatch_rate;
        let recovery_large = 1.0 - pair[1].phi_mismatch_rate;
        assert!(
            recovery_large >= recovery_small - 1e-12,
            "recovery dropped from n={} ({recovery_small}) to n={} ({recovery_large})",
            pair[0].n,
            pair[1].n
        );
    }
}

#[test]
fn fresh_test_data_keeps_dominance_and_reports_violations() {
    let (truth, instances, experts) = gen_trial(4, 10, 3, 999, 0).unwrap();
    let ds = make_dataset(&instances, &experts, Some(&truth));
    let result = run_pipeline(&ds, &PipelineConfig::default()).unwrap();
    assert!(result.converged);
    assert_eq!(result.dominance.as_ref().map(|d| d.dominates), Some(true));

    // Fresh samples from the same truth: experts may violate the learned
    // (tighter) thresholds; the rate is reported, dominance still holds.
    let mut rng = ddio_cli::sched::stream_rng(999, 3, 4, 0);
    let mut test_instances = Vec::new();
    let mut test_experts = Vec::new();
    for _ in 0..50 {
        let inst = ddio_cli::sched::gen_instance(4, &mut rng).unwrap();
        let expert = ddio_cli::sched::gen_expert(&inst, &truth).unwrap();
        test_instances.push(inst);
        test_experts.push(expert);
    }
    let test = make_dataset(&test_instances, &test_experts, Some(&truth));
    let report = evaluate(&result.theta, &result.phi, &test, 1);
    assert_eq!(report.forward_errors, 0);
    assert!(report.expert_violation_rate >= 0.0 && report.expert_violation_rate <= 1.0);
    assert_eq!(report.dominance_ok, Some(true));
}
