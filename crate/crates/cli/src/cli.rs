//! Command-line surface.
//!
//! Exit codes: 0 success, 1 usage error, 2 data inconsistency,
//! 3 resource or numeric failure. Infeasibility of a solved problem is an
//! answer, not an error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use ddio_core::milp::{brute_force_solve, solve_lp, solve_milp};
use ddio_core::theory::{dudley_simplex_constant, zeta_tail_constants};
use ddio_core::SolveStatus;

use crate::bench::{run_benchmark, summarize, BenchConfig};
use crate::curve::{generalization_curve, CurveConfig};
use crate::format;
use crate::pipeline::{evaluate, run_pipeline, PipelineConfig, PipelineError};
use crate::sched;

#[derive(Parser, Debug)]
#[command(
    name = "ddio",
    about = "Two-stage inverse optimization for MILP: learn constraint thresholds, then objective weights",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate scheduling instances and expert solutions from a random
    /// ground truth.
    Gen(GenArgs),
    /// Solve a problem file exactly (or its LP relaxation).
    Solve(SolveArgs),
    /// Run the two-stage pipeline on a dataset file.
    Learn(LearnArgs),
    /// Evaluate a finished run against a held-out dataset.
    Evaluate(EvaluateArgs),
    /// Timing benchmark over the scheduling family.
    Bench(BenchArgs),
    /// Verify the closed-form theory constants; optionally measure the
    /// generalization curve.
    TheoryCheck(TheoryArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Number of jobs.
    #[arg(long)]
    pub d: usize,
    /// Number of training samples.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Forced precedences in the ground-truth thresholds.
    #[arg(long, default_value_t = 0)]
    pub forced_precedences: usize,
    /// Output dataset file.
    #[arg(long)]
    pub out: PathBuf,
    /// Also generate this many held-out samples.
    #[arg(long)]
    pub test_n: Option<usize>,
    /// Output file for the held-out samples.
    #[arg(long)]
    pub test_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Problem file in the structured-text MILP format.
    #[arg(long)]
    pub problem: PathBuf,
    /// Solve the LP relaxation instead of the MILP.
    #[arg(long)]
    pub relaxed: bool,
    /// Solve by exhaustive enumeration (testing oracle).
    #[arg(long)]
    pub brute_force: bool,
    /// Optional file for the solution.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LearnArgs {
    /// Dataset file produced by `gen`.
    #[arg(long)]
    pub data: PathBuf,
    /// Run-report output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-iteration trace CSV.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    #[arg(long, default_value_t = 2000)]
    pub iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub zero_threshold: f64,
    /// Target mean training loss.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Worker threads for forward solves (0 = all CPUs); 1 is fully
    /// deterministic including reduction order.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Run report produced by `learn`.
    #[arg(long)]
    pub report: PathBuf,
    /// Held-out dataset file.
    #[arg(long)]
    pub test: PathBuf,
    /// Optional output file for the evaluation report.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional per-sample loss breakdown CSV.
    #[arg(long)]
    pub breakdown_out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Job counts, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub d: Vec<usize>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2000)]
    pub iter_cap: usize,
    #[arg(long, default_value_t = 0)]
    pub forced_precedences: usize,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Per-trial CSV output.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct TheoryArgs {
    /// Also run the generalization-curve experiment.
    #[arg(long)]
    pub curve: bool,
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2, 5, 10, 20])]
    pub ns: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub forced_precedences: usize,
    #[arg(long, default_value_t = 2000)]
    pub iter_cap: usize,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Curve CSV output.
    #[arg(long)]
    pub curve_out: Option<PathBuf>,
}

/// Process exit code semantics.
pub enum AppError {
    Usage(String),
    Data(String),
    Resource(String),
}

impl AppError {
    pub fn code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Data(_) => 2,
            AppError::Resource(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            AppError::Usage(m) | AppError::Data(m) | AppError::Resource(m) => m,
        }
    }
}

fn read_file(path: &Path) -> Result<String, AppError> {
    std::fs::read_to_string(path)
        .map_err(|e| AppError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), AppError> {
    std::fs::write(path, contents)
        .map_err(|e| AppError::Resource(format!("cannot write {}: {e}", path.display())))
}

/// Run one parsed command; the caller maps errors to exit codes.
pub fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Learn(args) => cmd_learn(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Bench(args) => cmd_bench(args),
        Command::TheoryCheck(args) => cmd_theory(args),
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), AppError> {
    if args.d < 2 {
        return Err(AppError::Usage(format!("--d must be at least 2, got {}", args.d)));
    }
    let mut truth_rng = sched::stream_rng(args.seed, 1, args.d, 0);
    let truth = sched::gen_truth(args.d, args.forced_precedences, &mut truth_rng)
        .map_err(|e| AppError::Usage(e.to_string()))?;

    let gen_set = |kind: u64, count: usize| -> Result<format::SchedDatasetFile, AppError> {
        let mut rng = sched::stream_rng(args.seed, kind, args.d, 0);
        let mut instances = Vec::with_capacity(count);
        let mut experts = Vec::with_capacity(count);
        for _ in 0..count {
            let inst = sched::gen_instance(args.d, &mut rng)
                .map_err(|e| AppError::Usage(e.to_string()))?;
            let expert = sched::gen_expert(&inst, &truth)
                .map_err(|e| AppError::Data(e.to_string()))?;
            instances.push(inst);
            experts.push(expert);
        }
        Ok(format::SchedDatasetFile {
            d: args.d,
            instances,
            experts,
            truth: Some(truth.clone()),
        })
    };

    let train = gen_set(2, args.n)?;
    write_file(&args.out, &format::write_sched_dataset(&train))?;
    println!("wrote {} samples to {}", args.n, args.out.display());

    if let Some(test_n) = args.test_n {
        let test_out = args
            .test_out
            .clone()
            .ok_or_else(|| AppError::Usage("--test-n requires --test-out".to_string()))?;
        let test = gen_set(3, test_n)?;
        write_file(&test_out, &format::write_sched_dataset(&test))?;
        println!("wrote {test_n} held-out samples to {}", test_out.display());
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<(), AppError> {
    let text = read_file(&args.problem)?;
    let problem = format::parse_milp(&text)
        .map_err(|e| AppError::Data(format!("{}: {e}", args.problem.display())))?;
    let solution = if args.brute_force {
        brute_force_solve(&problem)
    } else if args.relaxed {
        solve_lp(&problem.relax_integrality())
    } else {
        solve_milp(&problem)
    }
    .map_err(|e| AppError::Resource(e.to_string()))?;

    let mut out = String::new();
    match solution.status {
        SolveStatus::Optimal => {
            out.push_str("status optimal\n");
            out.push_str(&format!("value {}\n", solution.objective_value.unwrap()));
            let point = solution.point.unwrap();
            let rendered: Vec<String> = point.iter().map(|v| format!("{v}")).collect();
            out.push_str(&format!("point {}\n", rendered.join(" ")));
        }
        SolveStatus::Infeasible => out.push_str("status infeasible\n"),
        SolveStatus::Unbounded => out.push_str("status unbounded\n"),
    }
    print!("{out}");
    if let Some(path) = args.out {
        write_file(&path, &out)?;
    }
    Ok(())
}

fn dataset_from_file(file: &format::SchedDatasetFile) -> ddio_core::Dataset {
    sched::make_dataset(&file.instances, &file.experts, file.truth.as_ref())
}

fn cmd_learn(args: LearnArgs) -> Result<(), AppError> {
    let text = read_file(&args.data)?;
    let file = format::parse_sched_dataset(&text)
        .map_err(|e| AppError::Data(format!("{}: {e}", args.data.display())))?;
    if file.instances.is_empty() {
        return Err(AppError::Usage("dataset has no samples".to_string()));
    }
    let dataset = dataset_from_file(&file);
    let config = PipelineConfig {
        max_iters: args.iters,
        zero_threshold: args.zero_threshold,
        epsilon: args.epsilon,
        jobs: args.jobs,
        ..Default::default()
    };
    let result = run_pipeline(&dataset, &config).map_err(|e| match e {
        PipelineError::DataInconsistency(inner) => AppError::Data(inner.to_string()),
        PipelineError::Learn(inner) => AppError::Resource(inner.to_string()),
    })?;

    let trace_path = args.trace_out.as_ref().map(|p| p.display().to_string());
    if let Some(path) = &args.trace_out {
        write_file(path, &format::trace_csv(&result))?;
    }
    write_file(&args.out, &format::write_run_report(&result, trace_path.as_deref()))?;

    println!(
        "converged {} after {} iterations, train loss {}",
        result.converged,
        result.trace.rows.len(),
        result.train_loss
    );
    println!(
        "stage1 {:.1} ms, stage2 {:.1} ms",
        result.stage1_ms, result.stage2_ms
    );
    for line in format::phi_report_lines(&result.phi_report) {
        println!("{line}");
    }
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), AppError> {
    let report_text = read_file(&args.report)?;
    let params = format::parse_run_report(&report_text)
        .map_err(|e| AppError::Data(format!("{}: {e}", args.report.display())))?;
    let test_text = read_file(&args.test)?;
    let file = format::parse_sched_dataset(&test_text)
        .map_err(|e| AppError::Data(format!("{}: {e}", args.test.display())))?;
    let test = dataset_from_file(&file);
    let report = evaluate(&params.theta, &params.phi, &test, args.jobs);
    let rendered = format::write_eval_report(&report);
    print!("{rendered}");
    if let Some(path) = args.out {
        write_file(&path, &rendered)?;
    }
    if let Some(path) = args.breakdown_out {
        write_file(&path, &format::per_sample_csv(&report))?;
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), AppError> {
    if args.d.iter().any(|&d| d < 2) {
        return Err(AppError::Usage("--d entries must be at least 2".to_string()));
    }
    let config = BenchConfig {
        d_list: args.d,
        n: args.n,
        trials: args.trials,
        seed: args.seed,
        iter_cap: args.iter_cap,
        forced_precedences: args.forced_precedences,
        jobs: args.jobs,
        zero_threshold: 1e-6,
    };
    let table = run_benchmark(&config);
    write_file(&args.out, &format::bench_csv(&table))?;
    for s in summarize(&table) {
        println!(
            "d={} trials={} mean={:.2}s max={:.2}s median={:.2}s success_rate={}",
            s.d, s.trials, s.mean_s, s.max_s, s.median_s, s.success_rate
        );
    }
    Ok(())
}

fn cmd_theory(args: TheoryArgs) -> Result<(), AppError> {
    let entropy =
        dudley_simplex_constant().map_err(|e| AppError::Resource(e.to_string()))?;
    let (c_442, c_6) =
        zeta_tail_constants().map_err(|e| AppError::Resource(e.to_string()))?;
    println!("entropy_integral_unit_interval {entropy} (bound 3.01)");
    println!("zeta_tail_c_4sqrt2 {c_442} (bound 3)");
    println!("zeta_tail_c_6 {c_6} (bound 1.3)");

    if args.curve {
        let config = CurveConfig {
            d: args.d,
            ns: args.ns,
            trials: args.trials,
            seed: args.seed,
            forced_precedences: args.forced_precedences,
            iter_cap: args.iter_cap,
            jobs: args.jobs,
        };
        let table = generalization_curve(&config);
        for row in &table.rows {
            println!(
                "n={} median_test_loss={} phi_mismatch_rate={} \
                 matched_trials={} median_matched_test_loss={} failures={}",
                row.n,
                row.median_test_loss,
                row.phi_mismatch_rate,
                row.matched_trials,
                row.median_matched_test_loss,
                row.failures
            );
        }
        match table.fitted_slope {
            Some(slope) => println!("fitted_slope {slope}"),
            None => println!("fitted_slope none (fewer than two positive medians)"),
        }
        if let Some(path) = args.curve_out {
            write_file(&path, &format::curve_csv(&table))?;
        }
    }
    Ok(())
}
