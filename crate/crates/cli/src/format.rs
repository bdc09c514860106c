//! Structured-text file formats and CSV writers.
//!
//! All formats are line-based and whitespace-separated. Reals are written
//! with Rust's shortest round-trip formatting, so parsing them back yields
//! the identical bit pattern (lossless well past 17 significant digits).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ddio_core::constraint::{PhiLearnReport, ThresholdKind};
use ddio_core::milp::{LinConstraint, Sense};
use ddio_core::{
    AffineMap, MilpProblem, ParamFop, PhiComponentSet, PhiDomain, PhiParams, ThetaWeights,
    VarKind, VarSpec,
};

use crate::bench::BenchTable;
use crate::curve::CurveTable;
use crate::pipeline::{EvalReport, LearnResult};
use crate::sched::{SchedInstance, SchedSolution, SchedTruth};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, ParseError> {
    match tok {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "nan" => Ok(f64::NAN),
        _ => tok.parse::<f64>().map_err(|e| ParseError {
            line,
            message: format!("bad real {tok:?}: {e}"),
        }),
    }
}

fn parse_usize(tok: &str, line: usize) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .map_err(|e| ParseError { line, message: format!("bad integer {tok:?}: {e}") })
}

fn kind_name(kind: VarKind) -> &'static str {
    match kind {
        VarKind::Continuous => "continuous",
        VarKind::Integer => "integer",
        VarKind::Binary => "binary",
    }
}

fn parse_kind(tok: &str, line: usize) -> Result<VarKind, ParseError> {
    match tok {
        "continuous" => Ok(VarKind::Continuous),
        "integer" => Ok(VarKind::Integer),
        "binary" => Ok(VarKind::Binary),
        _ => err(line, format!("unknown variable kind {tok:?}")),
    }
}

fn write_sparse(out: &mut String, pairs: impl Iterator<Item = (usize, f64)>) {
    for (j, c) in pairs {
        let _ = write!(out, " {j}:{}", fmt_f64(c));
    }
}

fn parse_sparse(toks: &[&str], line: usize) -> Result<Vec<(usize, f64)>, ParseError> {
    let mut out = Vec::with_capacity(toks.len());
    for tok in toks {
        let Some((j, c)) = tok.split_once(':') else {
            return err(line, format!("expected index:coef, got {tok:?}"));
        };
        out.push((parse_usize(j, line)?, parse_f64(c, line)?));
    }
    Ok(out)
}

/// Token-safe name: whitespace collapses to underscores.
fn name_token(name: &str) -> String {
    let t: String =
        name.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect();
    if t.is_empty() {
        "unnamed".to_string()
    } else {
        t
    }
}

// ---------------------------------------------------------------- MILP ---

pub fn write_milp(p: &MilpProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "milp {}", name_token(&p.name));
    let _ = writeln!(out, "vars {}", p.num_vars());
    for (j, v) in p.vars.iter().enumerate() {
        let _ = writeln!(
            out,
            "var {j} {} {} {}",
            kind_name(v.kind),
            fmt_f64(v.lower),
            fmt_f64(v.upper)
        );
    }
    let mut line = String::from("objective");
    write_sparse(&mut line, p.objective.iter().map(|(&j, &c)| (j, c)));
    let _ = writeln!(out, "{line}");
    for c in &p.constraints {
        let sense = match c.sense {
            Sense::Le => "le",
            Sense::Eq => "eq",
            Sense::Ge => "ge",
        };
        let mut line = format!("con {sense} {}", fmt_f64(c.rhs));
        write_sparse(&mut line, c.coeffs.iter().map(|(&j, &a)| (j, a)));
        let _ = writeln!(out, "{line}");
    }
    let _ = writeln!(out, "end");
    out
}

pub fn parse_milp(text: &str) -> Result<MilpProblem, ParseError> {
    let mut problem = MilpProblem::default();
    let mut seen_header = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() || toks[0].starts_with('#') {
            continue;
        }
        match toks[0] {
            "milp" => {
                problem.name = toks.get(1).unwrap_or(&"unnamed").to_string();
                seen_header = true;
            }
            _ if !seen_header => return err(line, "expected `milp <name>` header"),
            "vars" => {
                let n = parse_usize(toks[1], line)?;
                problem.vars =
                    vec![VarSpec::continuous(f64::NEG_INFINITY, f64::INFINITY); n];
            }
            "var" => {
                if toks.len() != 5 {
                    return err(line, "expected `var <idx> <kind> <lo> <hi>`");
                }
                let j = parse_usize(toks[1], line)?;
                if j >= problem.vars.len() {
                    return err(line, format!("variable index {j} out of range"));
                }
                problem.vars[j] = VarSpec {
                    kind: parse_kind(toks[2], line)?,
                    lower: parse_f64(toks[3], line)?,
                    upper: parse_f64(toks[4], line)?,
                };
            }
            "objective" => {
                let pairs = parse_sparse(&toks[1..], line)?;
                problem.objective = pairs.into_iter().collect::<BTreeMap<_, _>>();
            }
            "con" => {
                if toks.len() < 3 {
                    return err(line, "expected `con <sense> <rhs> [idx:coef...]`");
                }
                let sense = match toks[1] {
                    "le" => Sense::Le,
                    "eq" => Sense::Eq,
                    "ge" => Sense::Ge,
                    other => return err(line, format!("unknown sense {other:?}")),
                };
                let rhs = parse_f64(toks[2], line)?;
                let coeffs = parse_sparse(&toks[3..], line)?;
                problem.add_constraint(LinConstraint::new(&coeffs, sense, rhs));
            }
            "end" => return Ok(problem),
            other => return err(line, format!("unknown directive {other:?}")),
        }
    }
    err(text.lines().count(), "missing `end`")
}

// ----------------------------------------------------------------- FOP ---

fn write_affine_rows(out: &mut String, tag: &str, map: &AffineMap) {
    for r in 0..map.rows {
        let mut line = format!("{tag} {r} {}", fmt_f64(map.offset[r]));
        write_sparse(
            &mut line,
            map.row(r).iter().enumerate().filter(|(_, &a)| a != 0.0).map(|(j, &a)| (j, a)),
        );
        let _ = writeln!(out, "{line}");
    }
}

fn write_domain(out: &mut String, tag: &str, sets: &[PhiComponentSet]) {
    for (j, set) in sets.iter().enumerate() {
        match set {
            PhiComponentSet::Interval { lo, hi } => {
                let _ =
                    writeln!(out, "{tag} {j} interval {} {}", fmt_f64(*lo), fmt_f64(*hi));
            }
            PhiComponentSet::Finite(vals) => {
                let mut line = format!("{tag} {j} finite");
                for v in vals {
                    let _ = write!(line, " {}", fmt_f64(*v));
                }
                let _ = writeln!(out, "{line}");
            }
        }
    }
}

pub fn write_fop(fop: &ParamFop) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "fop {}", name_token(&fop.name));
    let _ = writeln!(out, "vars {}", fop.num_vars());
    for (j, v) in fop.vars.iter().enumerate() {
        let _ = writeln!(
            out,
            "var {j} {} {} {}",
            kind_name(v.kind),
            fmt_f64(v.lower),
            fmt_f64(v.upper)
        );
    }
    let _ = writeln!(out, "features {}", fop.features.rows);
    write_affine_rows(&mut out, "frow", &fop.features);
    let _ = writeln!(out, "h0 {}", fop.h0.rows);
    write_affine_rows(&mut out, "h0row", &fop.h0);
    let _ = writeln!(out, "hplus {}", fop.h_plus.rows);
    write_affine_rows(&mut out, "hplusrow", &fop.h_plus);
    write_domain(&mut out, "hplusdom", &fop.phi_domain.plus);
    let _ = writeln!(out, "hminus {}", fop.h_minus.rows);
    write_affine_rows(&mut out, "hminusrow", &fop.h_minus);
    write_domain(&mut out, "hminusdom", &fop.phi_domain.minus_check);
    let _ = writeln!(out, "end");
    out
}

pub fn parse_fop(text: &str) -> Result<ParamFop, ParseError> {
    let mut name = String::from("unnamed");
    let mut vars: Vec<VarSpec> = Vec::new();
    let mut features = AffineMap::empty(0);
    let mut h0 = AffineMap::empty(0);
    let mut h_plus = AffineMap::empty(0);
    let mut h_minus = AffineMap::empty(0);
    let mut dom_plus: Vec<PhiComponentSet> = Vec::new();
    let mut dom_minus: Vec<PhiComponentSet> = Vec::new();
    let mut seen_header = false;

    fn fill_row(
        map: &mut AffineMap,
        toks: &[&str],
        line: usize,
    ) -> Result<(), ParseError> {
        let r = parse_usize(toks[1], line)?;
        if r >= map.rows {
            return err(line, format!("row {r} out of range"));
        }
        map.offset[r] = parse_f64(toks[2], line)?;
        for (j, a) in parse_sparse(&toks[3..], line)? {
            if j >= map.cols {
                return err(line, format!("column {j} out of range"));
            }
            map.set(r, j, a);
        }
        Ok(())
    }

    fn fill_dom(
        sets: &mut [PhiComponentSet],
        toks: &[&str],
        line: usize,
    ) -> Result<(), ParseError> {
        let j = parse_usize(toks[1], line)?;
        if j >= sets.len() {
            return err(line, format!("domain index {j} out of range"));
        }
        sets[j] = match toks.get(2) {
            Some(&"interval") => {
                if toks.len() != 5 {
                    return err(line, "expected `interval <lo> <hi>`");
                }
                PhiComponentSet::Interval {
                    lo: parse_f64(toks[3], line)?,
                    hi: parse_f64(toks[4], line)?,
                }
            }
            Some(&"finite") => {
                let mut vals = Vec::new();
                for tok in &toks[3..] {
                    vals.push(parse_f64(tok, line)?);
                }
                if vals.is_empty() {
                    return err(line, "finite domain needs at least one value");
                }
                PhiComponentSet::Finite(vals)
            }
            _ => return err(line, "expected `interval` or `finite`"),
        };
        Ok(())
    }

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() || toks[0].starts_with('#') {
            continue;
        }
        match toks[0] {
            "fop" => {
                name = toks.get(1).unwrap_or(&"unnamed").to_string();
                seen_header = true;
            }
            _ if !seen_header => return err(line, "expected `fop <name>` header"),
            "vars" => {
                let n = parse_usize(toks[1], line)?;
                vars = vec![VarSpec::continuous(f64::NEG_INFINITY, f64::INFINITY); n];
            }
            "var" => {
                let j = parse_usize(toks[1], line)?;
                if j >= vars.len() {
                    return err(line, format!("variable index {j} out of range"));
                }
                vars[j] = VarSpec {
                    kind: parse_kind(toks[2], line)?,
                    lower: parse_f64(toks[3], line)?,
                    upper: parse_f64(toks[4], line)?,
                };
            }
            "features" => {
                features = AffineMap::zero(parse_usize(toks[1], line)?, vars.len());
            }
            "frow" => fill_row(&mut features, &toks, line)?,
            "h0" => h0 = AffineMap::zero(parse_usize(toks[1], line)?, vars.len()),
            "h0row" => fill_row(&mut h0, &toks, line)?,
            "hplus" => {
                let rows = parse_usize(toks[1], line)?;
                h_plus = AffineMap::zero(rows, vars.len());
                dom_plus = vec![PhiComponentSet::unbounded(); rows];
            }
            "hplusrow" => fill_row(&mut h_plus, &toks, line)?,
            "hplusdom" => fill_dom(&mut dom_plus, &toks, line)?,
            "hminus" => {
                let rows = parse_usize(toks[1], line)?;
                h_minus = AffineMap::zero(rows, vars.len());
                dom_minus = vec![PhiComponentSet::unbounded(); rows];
            }
            "hminusrow" => fill_row(&mut h_minus, &toks, line)?,
            "hminusdom" => fill_dom(&mut dom_minus, &toks, line)?,
            "end" => {
                return Ok(ParamFop {
                    name,
                    vars,
                    features,
                    h0,
                    h_plus,
                    h_minus,
                    phi_domain: PhiDomain { plus: dom_plus, minus_check: dom_minus },
                })
            }
            other => return err(line, format!("unknown directive {other:?}")),
        }
    }
    err(text.lines().count(), "missing `end`")
}

// ------------------------------------------------------- sched dataset ---

#[derive(Debug, Clone, PartialEq)]
pub struct SchedDatasetFile {
    pub d: usize,
    pub instances: Vec<SchedInstance>,
    pub experts: Vec<SchedSolution>,
    pub truth: Option<SchedTruth>,
}

fn write_ints(out: &mut String, tag: &str, vals: &[i64]) {
    let mut line = String::from(tag);
    for v in vals {
        let _ = write!(line, " {v}");
    }
    let _ = writeln!(out, "{line}");
}

pub fn write_sched_dataset(file: &SchedDatasetFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "sched-dataset");
    let _ = writeln!(out, "d {}", file.d);
    let _ = writeln!(out, "n {}", file.instances.len());
    if let Some(truth) = &file.truth {
        let mut line = String::from("truth-theta");
        for v in &truth.theta.0 {
            let _ = write!(line, " {}", fmt_f64(*v));
        }
        let _ = writeln!(out, "{line}");
        write_ints(
            &mut out,
            "truth-phi",
            &truth.phi.iter().map(|&v| v as i64).collect::<Vec<_>>(),
        );
    }
    for (i, (inst, sol)) in file.instances.iter().zip(&file.experts).enumerate() {
        let _ = writeln!(out, "sample {i}");
        write_ints(&mut out, "r", &inst.r);
        write_ints(&mut out, "p", &inst.p);
        write_ints(&mut out, "expert-b", &sol.b);
        write_ints(
            &mut out,
            "expert-x",
            &sol.x.iter().map(|&v| v as i64).collect::<Vec<_>>(),
        );
    }
    let _ = writeln!(out, "end");
    out
}

pub fn parse_sched_dataset(text: &str) -> Result<SchedDatasetFile, ParseError> {
    let mut d = 0usize;
    let mut truth_theta: Option<Vec<f64>> = None;
    let mut truth_phi: Option<Vec<u8>> = None;
    let mut instances: Vec<SchedInstance> = Vec::new();
    let mut experts: Vec<SchedSolution> = Vec::new();
    let mut seen_header = false;

    fn parse_i64s(toks: &[&str], line: usize) -> Result<Vec<i64>, ParseError> {
        toks.iter()
            .map(|t| {
                t.parse::<i64>().map_err(|e| ParseError {
                    line,
                    message: format!("bad integer {t:?}: {e}"),
                })
            })
            .collect()
    }

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() || toks[0].starts_with('#') {
            continue;
        }
        match toks[0] {
            "sched-dataset" => seen_header = true,
            _ if !seen_header => return err(line, "expected `sched-dataset` header"),
            "d" => d = parse_usize(toks[1], line)?,
            "n" => {}
            "truth-theta" => {
                let mut vals = Vec::new();
                for tok in &toks[1..] {
                    vals.push(parse_f64(tok, line)?);
                }
                truth_theta = Some(vals);
            }
            "truth-phi" => {
                truth_phi =
                    Some(parse_i64s(&toks[1..], line)?.into_iter().map(|v| v as u8).collect());
            }
            "sample" => {
                instances.push(SchedInstance { d, r: Vec::new(), p: Vec::new() });
                experts.push(SchedSolution { b: Vec::new(), x: Vec::new() });
            }
            "r" => match instances.last_mut() {
                Some(inst) => inst.r = parse_i64s(&toks[1..], line)?,
                None => return err(line, "`r` before any `sample`"),
            },
            "p" => match instances.last_mut() {
                Some(inst) => inst.p = parse_i64s(&toks[1..], line)?,
                None => return err(line, "`p` before any `sample`"),
            },
            "expert-b" => match experts.last_mut() {
                Some(sol) => sol.b = parse_i64s(&toks[1..], line)?,
                None => return err(line, "`expert-b` before any `sample`"),
            },
            "expert-x" => match experts.last_mut() {
                Some(sol) => {
                    sol.x =
                        parse_i64s(&toks[1..], line)?.into_iter().map(|v| v as u8).collect()
                }
                None => return err(line, "`expert-x` before any `sample`"),
            },
            "end" => {
                if d < 2 {
                    return err(line, "dataset needs d >= 2");
                }
                for (i, (inst, sol)) in instances.iter().zip(&experts).enumerate() {
                    if inst.r.len() != d
                        || inst.p.len() != d
                        || sol.b.len() != d
                        || sol.x.len() != d * d
                    {
                        return err(line, format!("sample {i} has inconsistent sizes"));
                    }
                }
                let truth = match (truth_theta, truth_phi) {
                    (Some(theta), Some(phi)) => {
                        if theta.len() != d || phi.len() != d * d {
                            return err(line, "truth sizes inconsistent with d");
                        }
                        Some(SchedTruth { theta: ThetaWeights(theta), phi })
                    }
                    (None, None) => None,
                    _ => return err(line, "truth needs both theta and phi"),
                };
                return Ok(SchedDatasetFile { d, instances, experts, truth });
            }
            other => return err(line, format!("unknown directive {other:?}")),
        }
    }
    err(text.lines().count(), "missing `end`")
}

// ------------------------------------------------------------- reports ---

pub fn write_run_report(result: &LearnResult, trace_path: Option<&str>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "run-report");
    let _ = writeln!(out, "d {}", result.theta.dim());
    let _ = writeln!(out, "converged {}", result.converged);
    let _ = writeln!(out, "train-loss {}", fmt_f64(result.train_loss));
    let _ = writeln!(out, "iters {}", result.trace.rows.len());
    let _ = writeln!(out, "best-iter {}", result.trace.best_iter);
    let _ = writeln!(out, "epsilon {}", fmt_f64(result.config.epsilon));
    let _ = writeln!(out, "zero-threshold {}", fmt_f64(result.config.zero_threshold));
    let _ = writeln!(out, "max-iters {}", result.config.max_iters);
    let _ = writeln!(out, "simplex-offset {}", fmt_f64(result.config.simplex_offset));
    let _ = writeln!(out, "jobs {}", result.config.jobs);
    // Wall-clock lines; masked by determinism checks.
    let _ = writeln!(out, "stage1-ms {}", fmt_f64(result.stage1_ms));
    let _ = writeln!(out, "stage2-ms {}", fmt_f64(result.stage2_ms));
    let mut line = String::from("theta");
    for v in &result.theta.0 {
        let _ = write!(line, " {}", fmt_f64(*v));
    }
    let _ = writeln!(out, "{line}");
    let mut line = String::from("phi-plus");
    for v in &result.phi.plus {
        let _ = write!(line, " {}", fmt_f64(*v));
    }
    let _ = writeln!(out, "{line}");
    let mut line = String::from("phi-minus");
    for v in &result.phi.minus_check {
        let _ = write!(line, " {}", fmt_f64(*v));
    }
    let _ = writeln!(out, "{line}");
    for c in &result.phi_report.components {
        let kind = match c.kind {
            ThresholdKind::Plus => "plus",
            ThresholdKind::MinusCheck => "minus",
        };
        let truth = c.truth.map(fmt_f64).unwrap_or_else(|| "none".to_string());
        let slack = c.slack.map(fmt_f64).unwrap_or_else(|| "none".to_string());
        let _ = writeln!(
            out,
            "phi-component {kind} {} {} {truth} {slack} {}",
            c.index,
            fmt_f64(c.learned),
            c.binding_sample
        );
    }
    let dominance = match &result.dominance {
        None => "unknown",
        Some(rep) if rep.dominates => "ok",
        Some(_) => "violated",
    };
    let _ = writeln!(out, "dominance {dominance}");
    let _ = writeln!(out, "trace {}", trace_path.unwrap_or("none"));
    let _ = writeln!(out, "end");
    out
}

/// The learned parameters re-read from a run report, enough to evaluate on
/// fresh data.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportParams {
    pub theta: ThetaWeights,
    pub phi: PhiParams,
    pub converged: bool,
    pub train_loss: f64,
}

pub fn parse_run_report(text: &str) -> Result<ReportParams, ParseError> {
    let mut theta: Option<Vec<f64>> = None;
    let mut plus: Option<Vec<f64>> = None;
    let mut minus: Option<Vec<f64>> = None;
    let mut converged = false;
    let mut train_loss = f64::NAN;
    let mut seen_header = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "run-report" => seen_header = true,
            _ if !seen_header => return err(line, "expected `run-report` header"),
            "converged" => converged = toks.get(1) == Some(&"true"),
            "train-loss" => train_loss = parse_f64(toks[1], line)?,
            "theta" | "phi-plus" | "phi-minus" => {
                let mut vals = Vec::new();
                for tok in &toks[1..] {
                    vals.push(parse_f64(tok, line)?);
                }
                match toks[0] {
                    "theta" => theta = Some(vals),
                    "phi-plus" => plus = Some(vals),
                    _ => minus = Some(vals),
                }
            }
            "end" => {
                let theta = match theta {
                    Some(t) if !t.is_empty() => t,
                    _ => return err(line, "report is missing theta"),
                };
                return Ok(ReportParams {
                    theta: ThetaWeights(theta),
                    phi: PhiParams::new(plus.unwrap_or_default(), minus.unwrap_or_default()),
                    converged,
                    train_loss,
                });
            }
            _ => {}
        }
    }
    err(text.lines().count(), "missing `end`")
}

pub fn write_eval_report(report: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "eval-report");
    let _ = writeln!(out, "test-n {}", report.test_n);
    let _ = writeln!(out, "mean-loss-sub0 {}", fmt_f64(report.mean_sub0));
    let _ = writeln!(out, "mean-loss-sub1 {}", fmt_f64(report.mean_sub1));
    let _ = writeln!(out, "imitation-rate {}", fmt_f64(report.imitation_rate));
    let _ = writeln!(
        out,
        "expert-violation-rate {}",
        fmt_f64(report.expert_violation_rate)
    );
    let dominance = match report.dominance_ok {
        None => "unknown",
        Some(true) => "ok",
        Some(false) => "violated",
    };
    let _ = writeln!(out, "dominance {dominance}");
    let _ = writeln!(out, "forward-errors {}", report.forward_errors);
    let _ = writeln!(out, "end");
    out
}

// ---------------------------------------------------------------- CSVs ---

pub fn trace_csv(result: &LearnResult) -> String {
    let mut out = String::from("iter,loss,step_norm,wallclock_ms\n");
    for (row, ms) in result.trace.rows.iter().zip(&result.iter_ms) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            row.iter,
            fmt_f64(row.loss),
            fmt_f64(row.step_norm),
            fmt_f64(*ms)
        );
    }
    out
}

pub fn per_sample_csv(report: &EvalReport) -> String {
    let mut out = String::from("sample,gap,penalty,total\n");
    for (i, (gap, penalty, total)) in report.per_sample.iter().enumerate() {
        let _ = writeln!(
            out,
            "{i},{},{},{}",
            fmt_f64(*gap),
            fmt_f64(*penalty),
            fmt_f64(*total)
        );
    }
    out
}

pub const BENCH_CSV_HEADER: &str =
    "d,vars,constraints,trial,seed,stage1_ms,stage2_ms,iters,final_loss,success";

pub fn bench_csv(table: &BenchTable) -> String {
    let mut out = String::from(BENCH_CSV_HEADER);
    out.push('\n');
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.d,
            r.vars,
            r.constraints,
            r.trial,
            r.seed,
            fmt_f64(r.stage1_ms),
            fmt_f64(r.stage2_ms),
            r.iters,
            fmt_f64(r.final_loss),
            r.success
        );
    }
    out
}

/// Bench CSV with the wall-clock columns blanked, for byte-level
/// determinism comparison.
pub fn mask_bench_timing_columns(csv: &str) -> String {
    let mut out = String::new();
    for (i, line) in csv.lines().enumerate() {
        if i == 0 {
            let _ = writeln!(out, "{line}");
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let masked: Vec<&str> = cols
            .iter()
            .enumerate()
            .map(|(c, &v)| if c == 5 || c == 6 { "-" } else { v })
            .collect();
        let _ = writeln!(out, "{}", masked.join(","));
    }
    out
}

pub fn curve_csv(table: &CurveTable) -> String {
    let mut out = String::from("n,median_test_loss,phi_mismatch_rate,fitted_slope\n");
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},",
            r.n,
            fmt_f64(r.median_test_loss),
            fmt_f64(r.phi_mismatch_rate)
        );
    }
    let slope = table.fitted_slope.map(fmt_f64).unwrap_or_default();
    let _ = writeln!(out, "all,,,{slope}");
    out
}

/// Report rows for the learned thresholds, reused by the CLI summary.
pub fn phi_report_lines(report: &PhiLearnReport) -> Vec<String> {
    report
        .components
        .iter()
        .map(|c| {
            let kind = match c.kind {
                ThresholdKind::Plus => "h+",
                ThresholdKind::MinusCheck => "h-",
            };
            match (c.truth, c.slack) {
                (Some(t), Some(s)) => format!(
                    "{kind}[{}] learned={} truth={} slack={} binding_sample={}",
                    c.index,
                    fmt_f64(c.learned),
                    fmt_f64(t),
                    fmt_f64(s),
                    c.binding_sample
                ),
                _ => format!(
                    "{kind}[{}] learned={} binding_sample={}",
                    c.index,
                    fmt_f64(c.learned),
                    c.binding_sample
                ),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn milp_round_trip() {
        let mut p = MilpProblem::new(
            "trip",
            vec![VarSpec::binary(), VarSpec::continuous(-1.25, f64::INFINITY)],
        );
        p.add_constraint(LinConstraint::new(
            &[(0, 0.1), (1, -2.5)],
            Sense::Ge,
            0.333_333_333_333_333_3,
        ));
        p.set_objective(&[(0, 3.0), (1, 0.125)]);
        let text = write_milp(&p);
        let back = parse_milp(&text).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn mask_blanks_only_timing_columns() {
        let csv = format!("{BENCH_CSV_HEADER}\n4,16,40,0,7,12.5,99.1,3,0,true\n");
        let masked = mask_bench_timing_columns(&csv);
        assert!(masked.contains("4,16,40,0,7,-,-,3,0,true"));
    }
}
