//! Single-machine weighted-completion-time scheduling benchmark.
//!
//! Jobs `i = 0..D` with integer release times `r_i` and processing times
//! `p_i` run one at a time without preemption; the expert minimizes
//! `sum_i theta_i (b_i + p_i)` over integer start times `b` and precedence
//! binaries `x_ik` (job `i` before job `k`):
//!
//! ```text
//! b_i + p_i - M (1 - x_ik) <= b_k        for all i != k
//! x_ik + x_ki = 1                        for all i != k
//! b_i >= r_i
//! x_ki <= phi_ik                         for all i != k
//! ```
//!
//! with `M = max_i r_i + sum_i p_i`. The `x_ki <= phi_ik` rows are the
//! upper-threshold family the constraint learner operates on; encoded sizes
//! are exactly `D^2` variables and `3 D (D-1) + D` rows.

use ddio_core::learner::project_simplex;
use ddio_core::milp::solve_milp;
use ddio_core::model::build_fop;
use ddio_core::{
    AffineMap, Dataset, ParamFop, PhiComponentSet, PhiDomain, PhiParams, Sample,
    ThetaWeights, VarSpec,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Simplex shift for job weights; keeps every weight strictly positive.
pub const THETA_OFFSET: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SchedInstance {
    pub d: usize,
    /// Release times, each in `0..=10`.
    pub r: Vec<i64>,
    /// Processing times, each in `1..=5`.
    pub p: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchedTruth {
    pub theta: ThetaWeights,
    /// Row-major `D x D` precedence thresholds `phi[i][k]`; diagonal unused
    /// (kept zero).
    pub phi: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchedSolution {
    pub b: Vec<i64>,
    /// Row-major `D x D`; `x[i][k] = 1` iff job `i` precedes job `k`.
    pub x: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SchedError {
    #[error("job count must be at least 2, got {0}")]
    TooFewJobs(usize),
    #[error("solutions disagree on job count")]
    MixedDimensions,
    #[error("no feasible schedule under the given thresholds")]
    InfeasibleTruth,
    #[error("forward solve failed: {0}")]
    Solver(String),
}

pub fn big_m(inst: &SchedInstance) -> i64 {
    inst.r.iter().copied().max().unwrap_or(0) + inst.p.iter().sum::<i64>()
}

/// Deterministic RNG for a benchmark entity: one master seed, one stream
/// per (kind, d, index).
pub fn stream_rng(seed: u64, kind: u64, d: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((kind << 48) ^ ((d as u64) << 32) ^ index as u64);
    rng
}

/// Release times uniform on `{0..10}`, processing times uniform on `{1..5}`.
pub fn gen_instance(d: usize, rng: &mut ChaCha8Rng) -> Result<SchedInstance, SchedError> {
    if d < 2 {
        return Err(SchedError::TooFewJobs(d));
    }
    let r = (0..d).map(|_| rng.random_range(0..=10)).collect();
    let p = (0..d).map(|_| rng.random_range(1..=5)).collect();
    Ok(SchedInstance { d, r, p })
}

/// Random ground truth: weights drawn uniformly from the simplex interior
/// (then projected into the shifted simplex), and `forced` precedence
/// thresholds zeroed along a random topological order so the constraint
/// stays satisfiable.
pub fn gen_truth(
    d: usize,
    forced: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SchedTruth, SchedError> {
    if d < 2 {
        return Err(SchedError::TooFewJobs(d));
    }
    // Uniform on the simplex via normalized exponentials.
    let raw: Vec<f64> = (0..d)
        .map(|_| {
            let u: f64 = rng.random_range(1e-12..1.0);
            -u.ln()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    let shifted: Vec<f64> = raw.iter().map(|&w| w / total + THETA_OFFSET).collect();
    let theta = project_simplex(&shifted, THETA_OFFSET);

    let mut phi = vec![1u8; d * d];
    for i in 0..d {
        phi[i * d + i] = 0;
    }
    // Random topological order, then `forced` of its ordered pairs.
    let mut order: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            pairs.push((order[a], order[b]));
        }
    }
    let forced = forced.min(pairs.len());
    for slot in 0..forced {
        let pick = rng.random_range(slot..pairs.len());
        pairs.swap(slot, pick);
        let (i, k) = pairs[slot];
        // Forcing i before k: forbid x_ki, whose threshold is phi[i][k].
        phi[i * d + k] = 0;
    }
    Ok(SchedTruth { theta, phi })
}

/// Index of variable `x_ik` among the off-diagonal pairs in row-major
/// order, offset by the `D` start-time variables.
pub fn x_var(d: usize, i: usize, k: usize) -> usize {
    debug_assert_ne!(i, k);
    d + i * (d - 1) + if k > i { k - 1 } else { k }
}

/// Index of the threshold component `phi_ik` among the ordered pairs in
/// row-major order (same layout as the `h+` rows).
pub fn phi_component(d: usize, i: usize, k: usize) -> usize {
    debug_assert_ne!(i, k);
    i * (d - 1) + if k > i { k - 1 } else { k }
}

/// Encode an instance as a parametric forward problem. Variables are the
/// `D` integer start times followed by the `D(D-1)` precedence binaries;
/// rows are the big-M precedences, the pairing equalities (one inequality
/// per ordered pair), the releases, then the `x_ki <= phi_ik` threshold
/// family over a binary box.
pub fn encode_fop(inst: &SchedInstance) -> ParamFop {
    let d = inst.d;
    let k_vars = d * d;
    let m = big_m(inst) as f64;

    let mut vars = Vec::with_capacity(k_vars);
    for _ in 0..d {
        vars.push(VarSpec::integer(0.0, m));
    }
    for _ in 0..d * (d - 1) {
        vars.push(VarSpec::binary());
    }

    // Features: f_i = -(b_i + p_i), negated so the forward argmax minimizes
    // the weighted completion times.
    let mut features = AffineMap::zero(d, k_vars);
    for i in 0..d {
        features.set(i, i, -1.0);
        features.offset[i] = -(inst.p[i] as f64);
    }

    let pair_count = d * (d - 1);
    let mut h0 = AffineMap::zero(2 * pair_count + d, k_vars);
    let mut row = 0;
    // b_i + p_i - M (1 - x_ik) - b_k <= 0
    for i in 0..d {
        for k in 0..d {
            if k == i {
                continue;
            }
            h0.set(row, i, 1.0);
            h0.set(row, k, -1.0);
            h0.set(row, x_var(d, i, k), m);
            h0.offset[row] = inst.p[i] as f64 - m;
            row += 1;
        }
    }
    // x_ik + x_ki = 1 as one inequality per ordered pair.
    for i in 0..d {
        for k in 0..d {
            if k == i {
                continue;
            }
            if i < k {
                h0.set(row, x_var(d, i, k), 1.0);
                h0.set(row, x_var(d, k, i), 1.0);
                h0.offset[row] = -1.0;
            } else {
                h0.set(row, x_var(d, i, k), -1.0);
                h0.set(row, x_var(d, k, i), -1.0);
                h0.offset[row] = 1.0;
            }
            row += 1;
        }
    }
    // r_i - b_i <= 0
    for i in 0..d {
        h0.set(row, i, -1.0);
        h0.offset[row] = inst.r[i] as f64;
        row += 1;
    }

    // Threshold family x_ki <= phi_ik, binary box.
    let mut h_plus = AffineMap::zero(pair_count, k_vars);
    for i in 0..d {
        for k in 0..d {
            if k == i {
                continue;
            }
            h_plus.set(phi_component(d, i, k), x_var(d, k, i), 1.0);
        }
    }

    ParamFop {
        name: format!("sched-d{d}"),
        vars,
        features,
        h0,
        h_plus,
        h_minus: AffineMap::empty(k_vars),
        phi_domain: PhiDomain {
            plus: vec![PhiComponentSet::binary(); pair_count],
            minus_check: vec![],
        },
    }
}

/// Flatten a `D x D` 0/1 threshold matrix into the `h+` component order.
pub fn phi_matrix_to_params(d: usize, phi: &[u8]) -> PhiParams {
    let mut plus = vec![0.0; d * (d - 1)];
    for i in 0..d {
        for k in 0..d {
            if k != i {
                plus[phi_component(d, i, k)] = phi[i * d + k] as f64;
            }
        }
    }
    let mut params = PhiParams::new(plus, vec![]);
    params.domain = Some(PhiDomain {
        plus: vec![PhiComponentSet::binary(); d * (d - 1)],
        minus_check: vec![],
    });
    params
}

/// Inverse of [`phi_matrix_to_params`]; diagonal entries come back zero.
pub fn phi_params_to_matrix(d: usize, phi: &PhiParams) -> Vec<u8> {
    let mut out = vec![0u8; d * d];
    for i in 0..d {
        for k in 0..d {
            if k != i {
                out[i * d + k] = phi.plus[phi_component(d, i, k)] as u8;
            }
        }
    }
    out
}

pub fn solution_to_point(d: usize, sol: &SchedSolution) -> Vec<f64> {
    let mut point = vec![0.0; d * d];
    for i in 0..d {
        point[i] = sol.b[i] as f64;
    }
    for i in 0..d {
        for k in 0..d {
            if k != i {
                point[x_var(d, i, k)] = sol.x[i * d + k] as f64;
            }
        }
    }
    point
}

pub fn point_to_solution(d: usize, point: &[f64]) -> SchedSolution {
    let mut b = Vec::with_capacity(d);
    for i in 0..d {
        b.push(point[i].round() as i64);
    }
    let mut x = vec![0u8; d * d];
    for i in 0..d {
        for k in 0..d {
            if k != i {
                x[i * d + k] = point[x_var(d, i, k)].round() as u8;
            }
        }
    }
    SchedSolution { b, x }
}

/// Expert solution: the deterministic forward optimum under the truth.
pub fn gen_expert(inst: &SchedInstance, truth: &SchedTruth) -> Result<SchedSolution, SchedError> {
    let model = encode_fop(inst);
    let phi = phi_matrix_to_params(inst.d, &truth.phi);
    let problem = build_fop(&model, &truth.theta, &phi)
        .map_err(|e| SchedError::Solver(e.to_string()))?;
    let sol = solve_milp(&problem).map_err(|e| SchedError::Solver(e.to_string()))?;
    match sol.status {
        ddio_core::SolveStatus::Optimal => {
            Ok(point_to_solution(inst.d, sol.point.as_ref().unwrap()))
        }
        _ => Err(SchedError::InfeasibleTruth),
    }
}

/// The closed-form threshold rule on start times:
/// `phi_ik = 0` if job `i` starts no later than job `k` in every sample,
/// `1` otherwise. Coincides bit-for-bit with the generic lattice meet
/// applied to the encoded threshold family.
pub fn learn_phi_sched(solutions: &[SchedSolution]) -> Result<Vec<u8>, SchedError> {
    let d = match solutions.first() {
        Some(s) => s.b.len(),
        None => return Err(SchedError::MixedDimensions),
    };
    if solutions.iter().any(|s| s.b.len() != d || s.x.len() != d * d) {
        return Err(SchedError::MixedDimensions);
    }
    let mut phi = vec![0u8; d * d];
    for i in 0..d {
        for k in 0..d {
            if i == k {
                continue;
            }
            let always_before = solutions.iter().all(|s| s.b[i] <= s.b[k]);
            phi[i * d + k] = if always_before { 0 } else { 1 };
        }
    }
    Ok(phi)
}

/// Instances, experts and the generating truth bundled as a generic
/// dataset for the pipeline.
pub fn make_dataset(
    instances: &[SchedInstance],
    experts: &[SchedSolution],
    truth: Option<&SchedTruth>,
) -> Dataset {
    let samples = instances
        .iter()
        .zip(experts)
        .map(|(inst, sol)| Sample {
            model: encode_fop(inst),
            expert: solution_to_point(inst.d, sol),
        })
        .collect();
    let mut ds = Dataset::new(samples);
    if let (Some(truth), Some(inst)) = (truth, instances.first()) {
        ds.truth = Some((truth.theta.clone(), phi_matrix_to_params(inst.d, &truth.phi)));
    }
    ds
}

/// Generate a full benchmark trial: truth, train set and expert solutions.
pub fn gen_trial(
    d: usize,
    n: usize,
    forced: usize,
    seed: u64,
    trial: usize,
) -> Result<(SchedTruth, Vec<SchedInstance>, Vec<SchedSolution>), SchedError> {
    let mut truth_rng = stream_rng(seed, 1, d, trial);
    let truth = gen_truth(d, forced, &mut truth_rng)?;
    let mut inst_rng = stream_rng(seed, 2, d, trial);
    let mut instances = Vec::with_capacity(n);
    let mut experts = Vec::with_capacity(n);
    for _ in 0..n {
        let inst = gen_instance(d, &mut inst_rng)?;
        let expert = gen_expert(&inst, &truth)?;
        instances.push(inst);
        experts.push(expert);
    }
    Ok((truth, instances, experts))
}
