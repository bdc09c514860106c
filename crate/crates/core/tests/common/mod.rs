//! Shared generators and independent oracles for the solver tests.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use ddio_core::milp::{check_feasible, LinConstraint, Sense};
use ddio_core::{MilpProblem, VarSpec};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random bounded LP with integer data: 5 vars in integer boxes, 8 rows.
/// About half are anchored at an interior point so they are feasible.
pub fn random_lp(rng: &mut ChaCha8Rng) -> MilpProblem {
    let n = 5;
    let mut vars = Vec::with_capacity(n);
    for _ in 0..n {
        let lo = rng.random_range(-3..=0) as f64;
        let hi = rng.random_range(1..=4) as f64;
        vars.push(VarSpec::continuous(lo, hi));
    }
    let mut p = MilpProblem::new("rand-lp", vars);

    let anchored = rng.random_bool(0.5);
    let anchor: Vec<f64> = p
        .vars
        .iter()
        .map(|v| rng.random_range(v.lower as i64..=v.upper as i64) as f64)
        .collect();

    for _ in 0..8 {
        let mut coeffs = Vec::new();
        let mut at_anchor = 0.0;
        for j in 0..n {
            let c = rng.random_range(-3..=3) as f64;
            if c != 0.0 {
                coeffs.push((j, c));
                at_anchor += c * anchor[j];
            }
        }
        let sense = match rng.random_range(0..6) {
            0..=2 => Sense::Le,
            3 | 4 => Sense::Ge,
            _ => Sense::Eq,
        };
        let rhs = if anchored {
            match sense {
                Sense::Le => at_anchor + rng.random_range(0..=3) as f64,
                Sense::Ge => at_anchor - rng.random_range(0..=3) as f64,
                Sense::Eq => at_anchor,
            }
        } else {
            rng.random_range(-6..=6) as f64
        };
        p.add_constraint(LinConstraint::new(&coeffs, sense, rhs));
    }

    let obj: Vec<(usize, f64)> =
        (0..n).map(|j| (j, rng.random_range(-4..=4) as f64)).collect();
    p.set_objective(&obj);
    p
}

/// Random all-integer MILP: up to 3 vars with bounds [0,4], up to 6 rows.
pub fn random_small_milp(rng: &mut ChaCha8Rng) -> MilpProblem {
    let n = rng.random_range(1..=3);
    let vars = vec![VarSpec::integer(0.0, 4.0); n];
    let mut p = MilpProblem::new("rand-milp", vars);

    let anchored = rng.random_bool(0.75);
    let anchor: Vec<f64> = (0..n).map(|_| rng.random_range(0..=4) as f64).collect();

    let rows = rng.random_range(1..=6);
    for _ in 0..rows {
        let mut coeffs = Vec::new();
        let mut at_anchor = 0.0;
        for j in 0..n {
            let c = rng.random_range(-4..=4) as f64;
            if c != 0.0 {
                coeffs.push((j, c));
                at_anchor += c * anchor[j];
            }
        }
        let sense = match rng.random_range(0..5) {
            0 | 1 => Sense::Le,
            2 | 3 => Sense::Ge,
            _ => Sense::Eq,
        };
        let rhs = if anchored {
            match sense {
                Sense::Le => at_anchor + rng.random_range(0..=4) as f64,
                Sense::Ge => at_anchor - rng.random_range(0..=4) as f64,
                Sense::Eq => at_anchor,
            }
        } else {
            rng.random_range(-8..=8) as f64
        };
        p.add_constraint(LinConstraint::new(&coeffs, sense, rhs));
    }

    let obj: Vec<(usize, f64)> =
        (0..n).map(|j| (j, rng.random_range(-5..=5) as f64)).collect();
    p.set_objective(&obj);
    p
}

/// Optimal LP value by enumerating basic feasible points: every nonsingular
/// n-subset of row/bound hyperplanes, solved exactly and filtered through
/// the solver's own feasibility check. Returns `None` when no feasible
/// vertex exists (the LP is infeasible, since the box is bounded).
pub fn vertex_enumeration_optimum(p: &MilpProblem) -> Option<f64> {
    let n = p.num_vars();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for c in &p.constraints {
        let mut row = vec![0.0; n];
        for (&j, &a) in &c.coeffs {
            row[j] += a;
        }
        planes.push((row, c.rhs));
    }
    for (j, v) in p.vars.iter().enumerate() {
        let mut lo = vec![0.0; n];
        lo[j] = 1.0;
        planes.push((lo.clone(), v.lower));
        lo[j] = 1.0;
        planes.push((lo, v.upper));
    }

    let mut best: Option<f64> = None;
    let mut chosen = vec![0usize; n];
    enumerate_subsets(planes.len(), n, &mut chosen, 0, 0, &mut |subset| {
        let mut a = vec![0.0; n * n];
        let mut b = vec![0.0; n];
        for (r, &idx) in subset.iter().enumerate() {
            a[r * n..(r + 1) * n].copy_from_slice(&planes[idx].0);
            b[r] = planes[idx].1;
        }
        if let Some(x) = solve_square(&mut a, &mut b, n) {
            if check_feasible(p, &x).map(|r| r.is_feasible()).unwrap_or(false) {
                let v = p.objective_value(&x);
                best = Some(match best {
                    None => v,
                    Some(b0) => b0.max(v),
                });
            }
        }
    });
    best
}

fn enumerate_subsets(
    total: usize,
    k: usize,
    chosen: &mut Vec<usize>,
    depth: usize,
    start: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == k {
        visit(chosen);
        return;
    }
    for i in start..total {
        chosen[depth] = i;
        enumerate_subsets(total, k, chosen, depth + 1, i + 1, visit);
    }
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_square(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].abs() < 1e-9 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col] / d;
            if f != 0.0 {
                for k in col..n {
                    a[r * n + k] -= f * a[col * n + k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i * n + i]).collect())
}
