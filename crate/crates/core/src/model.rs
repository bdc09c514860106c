//! The parametric forward problem family.
//!
//! An instance is a maximization problem over MILP-representable `x`:
//!
//! ```text
//! maximize   theta' f(x)          f(x) = F x + c          (D features)
//! subject to h0(x) <= 0                                   (fixed rows)
//!            h+(x) <= phi_plus                            (upper thresholds)
//!            h-(x) >= phi_minus_check                     (lower thresholds)
//! ```
//!
//! with all maps affine in `x` for the given instance. Raising an upper
//! threshold or lowering a lower threshold enlarges the feasible set; the
//! threshold ordering used by the constraint learner (`lattice_ge`, `meet`)
//! runs in the opposite, tightness direction, under which the constraint
//! residual vector is monotone and the feasible set shrinks.

use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::math;
use crate::milp::{LinConstraint, MilpProblem, Sense, VarSpec};

/// Dense affine map `x -> M x + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows x cols`.
    pub matrix: Vec<f64>,
    pub offset: Vec<f64>,
}

impl AffineMap {
    pub fn zero(rows: usize, cols: usize) -> Self {
        AffineMap {
            rows,
            cols,
            matrix: alloc::vec![0.0; rows * cols],
            offset: alloc::vec![0.0; rows],
        }
    }

    pub fn empty(cols: usize) -> Self {
        AffineMap::zero(0, cols)
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.matrix[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.matrix[row * self.cols..(row + 1) * self.cols]
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        let mut out = self.offset.clone();
        for i in 0..self.rows {
            out[i] += math::dot(self.row(i), x);
        }
        out
    }
}

/// Objective weights; validity against the shifted simplex is checked with
/// [`ThetaWeights::in_simplex`].
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaWeights(pub Vec<f64>);

impl ThetaWeights {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Uniform center of `Delta^{D-1} + offset * 1`.
    pub fn uniform(d: usize, offset: f64) -> Self {
        ThetaWeights(alloc::vec![1.0 / d as f64 + offset; d])
    }

    /// Componentwise `>= offset` and sum `1 + D * offset`, within `tol`.
    pub fn in_simplex(&self, offset: f64, tol: f64) -> bool {
        let d = self.0.len();
        let mut sum = 0.0;
        for &w in &self.0 {
            if w < offset - tol {
                return false;
            }
            sum += w;
        }
        math::abs(sum - (1.0 + d as f64 * offset)) <= tol
    }

    pub fn dot(&self, v: &[f64]) -> f64 {
        math::dot(&self.0, v)
    }
}

/// Admissible values for one threshold component.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiComponentSet {
    /// Closed interval; infinities allowed.
    Interval { lo: f64, hi: f64 },
    /// Finite set, sorted ascending.
    Finite(Vec<f64>),
}

impl PhiComponentSet {
    pub fn unbounded() -> Self {
        PhiComponentSet::Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn binary() -> Self {
        PhiComponentSet::Finite(alloc::vec![0.0, 1.0])
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        match self {
            PhiComponentSet::Interval { lo, hi } => v >= lo - tol && v <= hi + tol,
            PhiComponentSet::Finite(vals) => vals.iter().any(|&a| math::abs(a - v) <= tol),
        }
    }

    /// Smallest admissible value `>= v - tol`.
    pub fn round_up(&self, v: f64, tol: f64) -> Option<f64> {
        match self {
            PhiComponentSet::Interval { lo, hi } => {
                let r = v.max(*lo);
                (r <= hi + tol).then_some(r.min(*hi))
            }
            PhiComponentSet::Finite(vals) => vals.iter().copied().find(|&a| a >= v - tol),
        }
    }

    /// Largest admissible value `<= v + tol`.
    pub fn round_down(&self, v: f64, tol: f64) -> Option<f64> {
        match self {
            PhiComponentSet::Interval { lo, hi } => {
                let r = v.min(*hi);
                (r >= lo - tol).then_some(r.max(*lo))
            }
            PhiComponentSet::Finite(vals) => {
                vals.iter().rev().copied().find(|&a| a <= v + tol)
            }
        }
    }

    /// Largest admissible value strictly below `v`, if any.
    pub fn next_below(&self, v: f64, tol: f64) -> Option<f64> {
        match self {
            PhiComponentSet::Interval { lo, .. } => (v - tol > *lo).then_some(*lo),
            PhiComponentSet::Finite(vals) => {
                vals.iter().rev().copied().find(|&a| a < v - tol)
            }
        }
    }

    /// Smallest admissible value strictly above `v`, if any.
    pub fn next_above(&self, v: f64, tol: f64) -> Option<f64> {
        match self {
            PhiComponentSet::Interval { hi, .. } => (v + tol < *hi).then_some(*hi),
            PhiComponentSet::Finite(vals) => vals.iter().copied().find(|&a| a > v + tol),
        }
    }
}

/// Per-component admissible sets for both threshold blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiDomain {
    pub plus: Vec<PhiComponentSet>,
    pub minus_check: Vec<PhiComponentSet>,
}

impl PhiDomain {
    pub fn unbounded(j_plus: usize, j_minus: usize) -> Self {
        PhiDomain {
            plus: alloc::vec![PhiComponentSet::unbounded(); j_plus],
            minus_check: alloc::vec![PhiComponentSet::unbounded(); j_minus],
        }
    }
}

/// Threshold parameters in the convention of the feasible set above:
/// `h+ <= plus`, `h- >= minus_check`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiParams {
    pub plus: Vec<f64>,
    pub minus_check: Vec<f64>,
    /// Optional box of admissible values, carried along from the template.
    pub domain: Option<PhiDomain>,
}

impl PhiParams {
    pub fn new(plus: Vec<f64>, minus_check: Vec<f64>) -> Self {
        PhiParams { plus, minus_check, domain: None }
    }

    /// Meet in the tightness lattice: the tightest parameter whose feasible
    /// set contains both operands' feasible sets. Componentwise max on the
    /// upper-threshold block, min on the lower-threshold block.
    pub fn meet(&self, other: &PhiParams) -> PhiParams {
        debug_assert_eq!(self.plus.len(), other.plus.len());
        debug_assert_eq!(self.minus_check.len(), other.minus_check.len());
        PhiParams {
            plus: self
                .plus
                .iter()
                .zip(&other.plus)
                .map(|(&a, &b)| a.max(b))
                .collect(),
            minus_check: self
                .minus_check
                .iter()
                .zip(&other.minus_check)
                .map(|(&a, &b)| a.min(b))
                .collect(),
            domain: self.domain.clone().or_else(|| other.domain.clone()),
        }
    }

    /// `self >= other` in the tightness lattice: the feasible set of `self`
    /// is contained in the feasible set of `other`.
    pub fn lattice_ge(&self, other: &PhiParams) -> bool {
        self.plus.iter().zip(&other.plus).all(|(&a, &b)| a <= b)
            && self
                .minus_check
                .iter()
                .zip(&other.minus_check)
                .all(|(&a, &b)| a >= b)
    }

    /// Bitwise equality of the threshold values (domain ignored).
    pub fn values_eq(&self, other: &PhiParams) -> bool {
        self.plus.len() == other.plus.len()
            && self.minus_check.len() == other.minus_check.len()
            && self
                .plus
                .iter()
                .zip(&other.plus)
                .all(|(a, b)| a.to_bits() == b.to_bits())
            && self
                .minus_check
                .iter()
                .zip(&other.minus_check)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// One instance of the parametric forward problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamFop {
    pub name: String,
    pub vars: Vec<VarSpec>,
    /// Feature map, `D x k`.
    pub features: AffineMap,
    /// Fixed rows `h0(x) <= 0`.
    pub h0: AffineMap,
    /// Upper-threshold rows `h+(x) <= phi_plus`.
    pub h_plus: AffineMap,
    /// Lower-threshold rows `h-(x) >= phi_minus_check`.
    pub h_minus: AffineMap,
    pub phi_domain: PhiDomain,
}

impl ParamFop {
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_features(&self) -> usize {
        self.features.rows
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let k = self.vars.len();
        for (label, map) in [
            ("features", &self.features),
            ("h0", &self.h0),
            ("h+", &self.h_plus),
            ("h-", &self.h_minus),
        ] {
            if map.cols != k
                || map.matrix.len() != map.rows * map.cols
                || map.offset.len() != map.rows
            {
                return Err(ModelError::Dimension {
                    what: String::from(label),
                    expected: k,
                    got: map.cols,
                });
            }
        }
        if self.phi_domain.plus.len() != self.h_plus.rows
            || self.phi_domain.minus_check.len() != self.h_minus.rows
        {
            return Err(ModelError::Dimension {
                what: String::from("phi domain"),
                expected: self.h_plus.rows + self.h_minus.rows,
                got: self.phi_domain.plus.len() + self.phi_domain.minus_check.len(),
            });
        }
        Ok(())
    }

    pub fn check_phi_shape(&self, phi: &PhiParams) -> Result<(), ModelError> {
        if phi.plus.len() != self.h_plus.rows || phi.minus_check.len() != self.h_minus.rows {
            return Err(ModelError::Dimension {
                what: String::from("phi"),
                expected: self.h_plus.rows + self.h_minus.rows,
                got: phi.plus.len() + phi.minus_check.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{what}: dimension mismatch (expected {expected}, got {got})")]
    Dimension { what: String, expected: usize, got: usize },
}

/// Compile the forward problem under `(theta, phi)` into a concrete MILP.
///
/// Row order is `h0`, then `h+`, then `h-`, matching the residual order of
/// [`eval_constraints`]. The MILP objective drops the constant
/// `theta' c`; use features to compare objective values across points.
pub fn build_fop(
    model: &ParamFop,
    theta: &ThetaWeights,
    phi: &PhiParams,
) -> Result<MilpProblem, ModelError> {
    model.validate()?;
    model.check_phi_shape(phi)?;
    if theta.dim() != model.num_features() {
        return Err(ModelError::Dimension {
            what: String::from("theta"),
            expected: model.num_features(),
            got: theta.dim(),
        });
    }

    let k = model.num_vars();
    let mut problem = MilpProblem::new(&model.name, model.vars.clone());

    for row in 0..model.h0.rows {
        problem.add_constraint(affine_row(&model.h0, row, Sense::Le, -model.h0.offset[row]));
    }
    for row in 0..model.h_plus.rows {
        problem.add_constraint(affine_row(
            &model.h_plus,
            row,
            Sense::Le,
            phi.plus[row] - model.h_plus.offset[row],
        ));
    }
    for row in 0..model.h_minus.rows {
        problem.add_constraint(affine_row(
            &model.h_minus,
            row,
            Sense::Ge,
            phi.minus_check[row] - model.h_minus.offset[row],
        ));
    }

    let mut obj: Vec<(usize, f64)> = Vec::new();
    for j in 0..k {
        let mut c = 0.0;
        for d in 0..model.features.rows {
            c += theta.0[d] * model.features.matrix[d * k + j];
        }
        if c != 0.0 {
            obj.push((j, c));
        }
    }
    problem.set_objective(&obj);
    Ok(problem)
}

fn affine_row(map: &AffineMap, row: usize, sense: Sense, rhs: f64) -> LinConstraint {
    let coeffs: Vec<(usize, f64)> = map
        .row(row)
        .iter()
        .enumerate()
        .filter(|(_, &a)| a != 0.0)
        .map(|(j, &a)| (j, a))
        .collect();
    LinConstraint::new(&coeffs, sense, rhs)
}

/// `f(x) = F x + c`.
pub fn eval_features(model: &ParamFop, x: &[f64]) -> Result<Vec<f64>, ModelError> {
    if x.len() != model.num_vars() {
        return Err(ModelError::Dimension {
            what: String::from("x"),
            expected: model.num_vars(),
            got: x.len(),
        });
    }
    Ok(model.features.apply(x))
}

/// Constraint residuals in the `<= 0` convention, ordered `h0`, `h+`, `h-`:
/// `g0 = h0(x)`, `g+ = h+(x) - phi_plus`, `g- = phi_minus_check - h-(x)`.
/// `x` is feasible (with respect to the threshold rows) iff all entries are
/// `<= 0` up to tolerance.
pub fn eval_constraints(
    model: &ParamFop,
    phi: &PhiParams,
    x: &[f64],
) -> Result<Vec<f64>, ModelError> {
    if x.len() != model.num_vars() {
        return Err(ModelError::Dimension {
            what: String::from("x"),
            expected: model.num_vars(),
            got: x.len(),
        });
    }
    model.check_phi_shape(phi)?;
    let mut g = model.h0.apply(x);
    let hp = model.h_plus.apply(x);
    for (row, v) in hp.into_iter().enumerate() {
        g.push(v - phi.plus[row]);
    }
    let hm = model.h_minus.apply(x);
    for (row, v) in hm.into_iter().enumerate() {
        g.push(phi.minus_check[row] - v);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::solve_milp;
    use alloc::vec;

    fn tiny_model() -> ParamFop {
        // One variable in [0,1], f(x) = x, no threshold rows.
        let mut features = AffineMap::zero(1, 1);
        features.set(0, 0, 1.0);
        ParamFop {
            name: String::from("tiny"),
            vars: vec![VarSpec::continuous(0.0, 1.0)],
            features,
            h0: AffineMap::empty(1),
            h_plus: AffineMap::empty(1),
            h_minus: AffineMap::empty(1),
            phi_domain: PhiDomain::unbounded(0, 0),
        }
    }

    #[test]
    fn maximize_identity_feature() {
        let model = tiny_model();
        let theta = ThetaWeights(vec![1.0]);
        let phi = PhiParams::new(vec![], vec![]);
        let problem = build_fop(&model, &theta, &phi).unwrap();
        let sol = solve_milp(&problem).unwrap();
        assert_eq!(sol.objective_value.unwrap(), 1.0);
    }

    #[test]
    fn plus_threshold_zero_pins_variable() {
        // h+(x) = x <= phi = 0 forces x = 0.
        let mut model = tiny_model();
        model.h_plus = AffineMap::zero(1, 1);
        model.h_plus.set(0, 0, 1.0);
        model.phi_domain.plus = vec![PhiComponentSet::binary()];
        let theta = ThetaWeights(vec![1.0]);
        let phi = PhiParams::new(vec![0.0], vec![]);
        let problem = build_fop(&model, &theta, &phi).unwrap();
        let sol = solve_milp(&problem).unwrap();
        assert_eq!(sol.objective_value.unwrap(), 0.0);
    }

    #[test]
    fn residuals_zero_on_the_boundary() {
        let mut model = tiny_model();
        model.h_plus = AffineMap::zero(1, 1);
        model.h_plus.set(0, 0, 1.0);
        model.phi_domain.plus = vec![PhiComponentSet::unbounded()];
        let x = [0.4];
        let hp = model.h_plus.apply(&x);
        let phi = PhiParams::new(hp, vec![]);
        let g = eval_constraints(&model, &phi, &x).unwrap();
        assert_eq!(g, vec![0.0]);
        // Raising the threshold by one lowers the residual by one.
        let phi2 = PhiParams::new(vec![phi.plus[0] + 1.0], vec![]);
        let g2 = eval_constraints(&model, &phi2, &x).unwrap();
        assert!((g2[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn feature_eval_matches_hand_values() {
        // Scheduling-style features f_i = -(b_i + p_i) with b=(0,2), p=(2,3).
        let mut features = AffineMap::zero(2, 2);
        features.set(0, 0, -1.0);
        features.set(1, 1, -1.0);
        features.offset = vec![-2.0, -3.0];
        let model = ParamFop {
            name: String::from("sched2"),
            vars: vec![
                VarSpec::continuous(0.0, 10.0),
                VarSpec::continuous(0.0, 10.0),
            ],
            features,
            h0: AffineMap::empty(2),
            h_plus: AffineMap::empty(2),
            h_minus: AffineMap::empty(2),
            phi_domain: PhiDomain::unbounded(0, 0),
        };
        let f = eval_features(&model, &[0.0, 2.0]).unwrap();
        assert_eq!(f, vec![-2.0, -5.0]);
    }

    #[test]
    fn meet_is_componentwise_toward_tightness() {
        let a = PhiParams::new(vec![0.0, 1.0], vec![2.0]);
        let b = PhiParams::new(vec![1.0, 1.0], vec![1.0]);
        let m = a.meet(&b);
        assert_eq!(m.plus, vec![1.0, 1.0]);
        assert_eq!(m.minus_check, vec![1.0]);
        assert!(a.lattice_ge(&m));
        assert!(b.lattice_ge(&m));
    }

    #[test]
    fn binary_component_rounding() {
        let set = PhiComponentSet::binary();
        assert_eq!(set.round_up(0.3, 1e-9), Some(1.0));
        assert_eq!(set.round_down(0.3, 1e-9), Some(0.0));
        assert_eq!(set.round_up(1.2, 1e-9), None);
        assert_eq!(set.round_down(-0.2, 1e-9), None);
        assert_eq!(set.next_below(1.0, 1e-9), Some(0.0));
        assert_eq!(set.next_above(0.0, 1e-9), Some(1.0));
    }
}
