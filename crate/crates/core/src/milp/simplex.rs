//! Dense bounded-variable two-phase primal simplex.
//!
//! Variable bounds (including infinite ones) are handled natively rather
//! than as rows, so branch-and-bound nodes only swap bound vectors and
//! unboundedness is detected exactly. Entering variable by Dantzig pricing
//! with a Bland fallback after `5 * (rows + cols)` iterations to guard
//! against cycling.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{MilpError, MilpProblem, MilpSolution, Sense};
use crate::math;

const REDUCED_COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-10;
const RATIO_TIE_TOL: f64 = 1e-12;

/// Dense row-major image of a [`MilpProblem`], built once per solve and
/// shared across branch-and-bound nodes (only bounds change per node).
pub(crate) struct DenseLp {
    pub n: usize,
    pub m: usize,
    /// `m x n`, row-major.
    pub rows: Vec<f64>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    /// Maximization objective over the `n` structural variables.
    pub obj: Vec<f64>,
}

impl DenseLp {
    pub fn from_problem(p: &MilpProblem) -> DenseLp {
        let n = p.vars.len();
        let m = p.constraints.len();
        let mut rows = vec![0.0; m * n];
        let mut senses = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for (i, c) in p.constraints.iter().enumerate() {
            for (&j, &a) in &c.coeffs {
                rows[i * n + j] += a;
            }
            senses.push(c.sense);
            rhs.push(c.rhs);
        }
        let mut obj = vec![0.0; n];
        for (&j, &c) in &p.objective {
            obj[j] += c;
        }
        DenseLp { n, m, rows, senses, rhs, obj }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
enum ColStat {
    Basic,
    #[default]
    AtLower,
    AtUpper,
    /// Nonbasic with both bounds infinite; sits at zero.
    Free,
}

pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

/// Reusable buffers; one per thread of solving.
#[derive(Default)]
pub(crate) struct Workspace {
    tab: Vec<f64>,
    red: Vec<f64>,
    prow: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    stat: Vec<ColStat>,
    basis: Vec<usize>,
    beta: Vec<f64>,
    art_used: Vec<bool>,
}

enum LoopExit {
    Optimal,
    Unbounded,
}

impl Workspace {
    fn value_of(&self, j: usize) -> f64 {
        match self.stat[j] {
            ColStat::Basic => unreachable!("value_of on basic column"),
            ColStat::AtLower => self.lo[j],
            ColStat::AtUpper => self.hi[j],
            ColStat::Free => 0.0,
        }
    }
}

/// Solve `maximize obj' x` over the rows of `lp` with per-call bounds.
pub(crate) fn solve_bounded(
    lp: &DenseLp,
    lower: &[f64],
    upper: &[f64],
    ws: &mut Workspace,
) -> Result<LpOutcome, MilpError> {
    let n = lp.n;
    let m = lp.m;
    let width = n + 2 * m;

    ws.tab.clear();
    ws.tab.resize(m * width, 0.0);
    ws.red.clear();
    ws.red.resize(width, 0.0);
    ws.prow.clear();
    ws.prow.resize(width, 0.0);
    ws.lo.clear();
    ws.lo.resize(width, 0.0);
    ws.hi.clear();
    ws.hi.resize(width, 0.0);
    ws.stat.clear();
    ws.stat.resize(width, ColStat::AtLower);
    ws.basis.clear();
    ws.basis.resize(m, 0);
    ws.beta.clear();
    ws.beta.resize(m, 0.0);
    ws.art_used.clear();
    ws.art_used.resize(m, false);

    for j in 0..n {
        ws.lo[j] = lower[j];
        ws.hi[j] = upper[j];
        if lower[j] > upper[j] + 1e-12 {
            // Branch bounds can cross (e.g. floor child below an integer
            // lower bound); that node is simply infeasible.
            return Ok(LpOutcome::Infeasible);
        }
        ws.stat[j] = if lower[j].is_finite() {
            ColStat::AtLower
        } else if upper[j].is_finite() {
            ColStat::AtUpper
        } else {
            ColStat::Free
        };
    }

    // Slack bounds by sense: a'x + s = b.
    for i in 0..m {
        let s = n + i;
        match lp.senses[i] {
            Sense::Le => {
                ws.lo[s] = 0.0;
                ws.hi[s] = f64::INFINITY;
            }
            Sense::Ge => {
                ws.lo[s] = f64::NEG_INFINITY;
                ws.hi[s] = 0.0;
            }
            Sense::Eq => {
                ws.lo[s] = 0.0;
                ws.hi[s] = 0.0;
            }
        }
    }

    // Tableau: structural columns, slack identity, artificial slots.
    for i in 0..m {
        let row = &mut ws.tab[i * width..(i + 1) * width];
        row[..n].copy_from_slice(&lp.rows[i * n..(i + 1) * n]);
        row[n + i] = 1.0;
    }

    // Initial basis: slack where its bounds admit the row residual,
    // otherwise an artificial absorbing the violation.
    let mut any_artificial = false;
    for i in 0..m {
        let mut resid = lp.rhs[i];
        for j in 0..n {
            let a = lp.rows[i * n + j];
            if a != 0.0 {
                resid -= a * ws.value_of(j);
            }
        }
        let s = n + i;
        let a_col = n + m + i;
        if resid >= ws.lo[s] && resid <= ws.hi[s] {
            ws.stat[s] = ColStat::Basic;
            ws.basis[i] = s;
            ws.beta[i] = resid;
            // unused artificial stays pinned at zero
            ws.lo[a_col] = 0.0;
            ws.hi[a_col] = 0.0;
        } else {
            ws.stat[s] = if resid < ws.lo[s] { ColStat::AtLower } else { ColStat::AtUpper };
            // The artificial must enter the basis with coefficient +1 so the
            // starting basis matrix is the identity; negate the stored row
            // when the residual is negative.
            if resid < 0.0 {
                for v in ws.tab[i * width..(i + 1) * width].iter_mut() {
                    *v = -*v;
                }
            }
            ws.tab[i * width + a_col] = 1.0;
            ws.lo[a_col] = 0.0;
            ws.hi[a_col] = f64::INFINITY;
            ws.stat[a_col] = ColStat::Basic;
            ws.basis[i] = a_col;
            ws.beta[i] = math::abs(resid);
            ws.art_used[i] = true;
            any_artificial = true;
        }
    }

    let scale = 1.0 + lp.rhs.iter().fold(0.0, |acc: f64, &b| acc.max(math::abs(b)));

    if any_artificial {
        // Phase 1: maximize minus the sum of artificials.
        let mut c1 = vec![0.0; width];
        for i in 0..m {
            if ws.art_used[i] {
                c1[n + m + i] = -1.0;
            }
        }
        build_reduced_costs(ws, m, width, &c1);
        match run_simplex(ws, m, width)? {
            LoopExit::Unbounded => {
                return Err(MilpError::Numeric(String::from(
                    "phase-1 objective unbounded",
                )))
            }
            LoopExit::Optimal => {}
        }
        let mut infeas = 0.0;
        for i in 0..m {
            if ws.art_used[i] {
                let a_col = n + m + i;
                infeas += match ws.stat[a_col] {
                    ColStat::Basic => {
                        let row = ws.basis.iter().position(|&b| b == a_col).unwrap();
                        ws.beta[row]
                    }
                    _ => ws.value_of(a_col),
                };
            }
        }
        if infeas > super::FEAS_TOL * scale {
            return Ok(LpOutcome::Infeasible);
        }
        // Pin artificials at zero for phase 2.
        for i in 0..m {
            if ws.art_used[i] {
                let a_col = n + m + i;
                ws.hi[a_col] = 0.0;
                if ws.stat[a_col] == ColStat::AtUpper {
                    ws.stat[a_col] = ColStat::AtLower;
                }
            }
        }
    }

    // Phase 2: the real objective.
    let mut c2 = vec![0.0; width];
    c2[..n].copy_from_slice(&lp.obj);
    build_reduced_costs(ws, m, width, &c2);
    match run_simplex(ws, m, width)? {
        LoopExit::Unbounded => return Ok(LpOutcome::Unbounded),
        LoopExit::Optimal => {}
    }

    let mut x = vec![0.0; n];
    for j in 0..n {
        let v = match ws.stat[j] {
            ColStat::Basic => {
                let row = ws.basis.iter().position(|&b| b == j).unwrap();
                ws.beta[row]
            }
            _ => ws.value_of(j),
        };
        let v = if ws.lo[j].is_finite() { v.max(ws.lo[j]) } else { v };
        let v = if ws.hi[j].is_finite() { v.min(ws.hi[j]) } else { v };
        x[j] = v;
    }
    let value = math::dot(&lp.obj, &x);
    Ok(LpOutcome::Optimal { x, value })
}

/// `red[j] = c[j] - sum_i c[basis[i]] * tab[i][j]`.
fn build_reduced_costs(ws: &mut Workspace, m: usize, width: usize, c: &[f64]) {
    ws.red.copy_from_slice(c);
    for i in 0..m {
        let cb = c[ws.basis[i]];
        if cb != 0.0 {
            let row = &ws.tab[i * width..(i + 1) * width];
            for k in 0..width {
                ws.red[k] -= cb * row[k];
            }
        }
    }
    // Basic columns are exactly zero by construction.
    for i in 0..m {
        ws.red[ws.basis[i]] = 0.0;
    }
}

fn run_simplex(ws: &mut Workspace, m: usize, width: usize) -> Result<LoopExit, MilpError> {
    let bland_after = 5 * (m + width);
    let hard_cap = 100 * (m + width) + 20_000;
    let mut iters = 0usize;

    loop {
        iters += 1;
        if iters > hard_cap {
            return Err(MilpError::Numeric(String::from("simplex iteration cap hit")));
        }
        let bland = iters > bland_after;

        // Entering column and its direction of movement.
        let mut enter: Option<(usize, f64)> = None;
        let mut best_score = REDUCED_COST_TOL;
        for j in 0..width {
            if ws.stat[j] == ColStat::Basic || ws.lo[j] == ws.hi[j] {
                continue;
            }
            let d = ws.red[j];
            let cand = match ws.stat[j] {
                ColStat::AtLower => (d > REDUCED_COST_TOL).then_some((d, 1.0)),
                ColStat::AtUpper => (d < -REDUCED_COST_TOL).then_some((-d, -1.0)),
                ColStat::Free => (math::abs(d) > REDUCED_COST_TOL)
                    .then_some((math::abs(d), if d > 0.0 { 1.0 } else { -1.0 })),
                ColStat::Basic => None,
            };
            if let Some((score, dir)) = cand {
                if bland {
                    enter = Some((j, dir));
                    break;
                }
                if score > best_score {
                    best_score = score;
                    enter = Some((j, dir));
                }
            }
        }
        let Some((q, dir)) = enter else {
            return Ok(LoopExit::Optimal);
        };

        // Ratio test: how far x_q can move before a basic variable (or
        // x_q itself) hits a bound.
        let range_q = ws.hi[q] - ws.lo[q];
        let mut best_delta = if range_q.is_finite() { range_q } else { f64::INFINITY };
        let mut leave: Option<(usize, f64)> = None; // (row, pivot element)
        for i in 0..m {
            let a = ws.tab[i * width + q];
            if math::abs(a) <= PIVOT_TOL {
                continue;
            }
            let rate = a * dir; // basic value moves by -rate * delta
            let bvar = ws.basis[i];
            let cap = if rate > 0.0 {
                if ws.lo[bvar].is_finite() {
                    (ws.beta[i] - ws.lo[bvar]) / rate
                } else {
                    continue;
                }
            } else if ws.hi[bvar].is_finite() {
                (ws.beta[i] - ws.hi[bvar]) / rate
            } else {
                continue;
            };
            let cap = cap.max(0.0);
            let take = match leave {
                None => cap < best_delta - RATIO_TIE_TOL,
                Some((_, apiv)) => {
                    if cap < best_delta - RATIO_TIE_TOL {
                        true
                    } else if cap <= best_delta + RATIO_TIE_TOL {
                        if bland {
                            bvar < ws.basis[leave.unwrap().0]
                        } else {
                            math::abs(a) > math::abs(apiv)
                        }
                    } else {
                        false
                    }
                }
            };
            if take {
                best_delta = cap.min(best_delta);
                leave = Some((i, a));
            }
        }

        if best_delta.is_infinite() {
            return Ok(LoopExit::Unbounded);
        }

        match leave {
            None => {
                // Bound flip: x_q jumps to its opposite bound.
                let delta = best_delta * dir;
                for i in 0..m {
                    let a = ws.tab[i * width + q];
                    if a != 0.0 {
                        ws.beta[i] -= a * delta;
                    }
                }
                ws.stat[q] = match ws.stat[q] {
                    ColStat::AtLower => ColStat::AtUpper,
                    ColStat::AtUpper => ColStat::AtLower,
                    other => other,
                };
            }
            Some((r, _)) => {
                let piv = ws.tab[r * width + q];
                let enter_val = match ws.stat[q] {
                    ColStat::Free => dir * best_delta,
                    _ => ws.value_of(q) + dir * best_delta,
                };
                let delta = best_delta * dir;
                for i in 0..m {
                    if i == r {
                        continue;
                    }
                    let a = ws.tab[i * width + q];
                    if a != 0.0 {
                        ws.beta[i] -= a * delta;
                    }
                }
                let leaving = ws.basis[r];
                ws.stat[leaving] =
                    if piv * dir > 0.0 { ColStat::AtLower } else { ColStat::AtUpper };
                ws.stat[q] = ColStat::Basic;
                ws.basis[r] = q;
                ws.beta[r] = enter_val;

                // Row reduction against the normalized pivot row.
                let inv = 1.0 / piv;
                {
                    let row = &mut ws.tab[r * width..(r + 1) * width];
                    for k in 0..width {
                        row[k] *= inv;
                    }
                    row[q] = 1.0;
                    ws.prow.copy_from_slice(row);
                }
                for i in 0..m {
                    if i == r {
                        continue;
                    }
                    let f = ws.tab[i * width + q];
                    if math::abs(f) > 1e-13 {
                        let row = &mut ws.tab[i * width..(i + 1) * width];
                        for k in 0..width {
                            row[k] -= f * ws.prow[k];
                        }
                        row[q] = 0.0;
                    } else {
                        ws.tab[i * width + q] = 0.0;
                    }
                }
                let f = ws.red[q];
                if math::abs(f) > 1e-13 {
                    for k in 0..width {
                        ws.red[k] -= f * ws.prow[k];
                    }
                }
                ws.red[q] = 0.0;
            }
        }
    }
}

/// Solve the LP relaxation of `problem`. Integrality kinds are ignored;
/// only bounds and rows matter, so pass a problem relaxed via
/// [`MilpProblem::relax_integrality`] (or any continuous problem).
///
/// Returns a vertex-optimal solution; the status distinguishes infeasible
/// from unbounded exactly because infinite bounds are handled natively.
pub fn solve_lp(problem: &MilpProblem) -> Result<MilpSolution, MilpError> {
    problem.validate()?;
    let lp = DenseLp::from_problem(problem);
    let lower: Vec<f64> = problem.vars.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = problem.vars.iter().map(|v| v.upper).collect();
    let mut ws = Workspace::default();
    match solve_bounded(&lp, &lower, &upper, &mut ws)? {
        LpOutcome::Optimal { x, value } => Ok(MilpSolution::optimal(x, value)),
        LpOutcome::Infeasible => Ok(MilpSolution::infeasible()),
        LpOutcome::Unbounded => Ok(MilpSolution::unbounded()),
    }
}
