//! Stage one: learn the supremal threshold parameters.
//!
//! For a single sample the supremal parameter has a closed form: evaluate
//! the threshold maps at the expert point and clamp into the admissible
//! set toward feasibility. For a dataset it is the lattice meet of the
//! per-sample parameters, which keeps every expert feasible while staying
//! as tight as the data allows. On synthetic data the result always
//! dominates (is at least as tight as) the generating truth.

use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::dataset::Dataset;
use crate::math;
use crate::model::{ParamFop, PhiParams};

/// Tolerance when comparing threshold-map evaluations; the benchmark data
/// is exact integers, this only guards float noise.
pub const BINDING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstraintError {
    #[error("sample {sample}: expert violates fixed rows {rows:?}")]
    ExpertInfeasible { sample: usize, rows: Vec<usize> },
    #[error("sample {sample}: {what} value {value} has no admissible threshold")]
    DomainExhausted { sample: usize, what: String, value: f64 },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("sample {sample}: {status}")]
    Shape { sample: usize, status: crate::model::ModelError },
}

/// Which threshold block a report row refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdKind {
    Plus,
    MinusCheck,
}

/// Per-component learning summary, one row per threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiComponentReport {
    pub kind: ThresholdKind,
    pub index: usize,
    pub learned: f64,
    /// Sample index attaining the learned value.
    pub binding_sample: usize,
    pub truth: Option<f64>,
    /// Nonnegative tightness slack `learned - truth` in the lattice order,
    /// present when the truth is known.
    pub slack: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct PhiLearnReport {
    pub components: Vec<PhiComponentReport>,
}

/// Supremal thresholds keeping a single expert feasible:
/// `plus = h+(expert)` rounded up to the admissible set,
/// `minus_check = h-(expert)` rounded down.
///
/// Rounding runs toward feasibility: an upper threshold below the expert's
/// evaluation (or a lower threshold above it) would cut the expert off, so
/// when the raw evaluation is not admissible the nearest admissible value
/// on the feasible side is taken.
pub fn phi_sup_single(model: &ParamFop, expert: &[f64]) -> Result<PhiParams, ConstraintError> {
    phi_sup_single_at(model, expert, 0)
}

fn phi_sup_single_at(
    model: &ParamFop,
    expert: &[f64],
    sample: usize,
) -> Result<PhiParams, ConstraintError> {
    model
        .validate()
        .map_err(|status| ConstraintError::Shape { sample, status })?;
    if expert.len() != model.num_vars() {
        return Err(ConstraintError::Shape {
            sample,
            status: crate::model::ModelError::Dimension {
                what: String::from("expert"),
                expected: model.num_vars(),
                got: expert.len(),
            },
        });
    }

    let h0 = model.h0.apply(expert);
    let violated: Vec<usize> = h0
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > crate::milp::FEAS_TOL * (1.0 + math::abs(v)))
        .map(|(i, _)| i)
        .collect();
    if !violated.is_empty() {
        return Err(ConstraintError::ExpertInfeasible { sample, rows: violated });
    }

    let mut plus = model.h_plus.apply(expert);
    for (j, v) in plus.iter_mut().enumerate() {
        *v = model.phi_domain.plus[j].round_up(*v, BINDING_TOL).ok_or(
            ConstraintError::DomainExhausted {
                sample,
                what: String::from("h+"),
                value: *v,
            },
        )?;
    }
    let mut minus_check = model.h_minus.apply(expert);
    for (j, v) in minus_check.iter_mut().enumerate() {
        *v = model.phi_domain.minus_check[j]
            .round_down(*v, BINDING_TOL)
            .ok_or(ConstraintError::DomainExhausted {
                sample,
                what: String::from("h-"),
                value: *v,
            })?;
    }

    Ok(PhiParams { plus, minus_check, domain: Some(model.phi_domain.clone()) })
}

/// Supremal thresholds for a whole dataset: the lattice meet of the
/// per-sample closed forms. Every expert point stays feasible under the
/// result, and the meet decomposition holds bit-for-bit.
pub fn phi_sup_dataset(dataset: &Dataset) -> Result<PhiParams, ConstraintError> {
    Ok(phi_sup_dataset_report(dataset)?.0)
}

/// [`phi_sup_dataset`] plus the per-component report with binding samples
/// and, when the dataset carries a ground truth, slacks against it.
pub fn phi_sup_dataset_report(
    dataset: &Dataset,
) -> Result<(PhiParams, PhiLearnReport), ConstraintError> {
    if dataset.is_empty() {
        return Err(ConstraintError::EmptyDataset);
    }
    let mut singles = Vec::with_capacity(dataset.len());
    for (n, sample) in dataset.samples.iter().enumerate() {
        singles.push(phi_sup_single_at(&sample.model, &sample.expert, n)?);
    }
    let mut result = singles[0].clone();
    for single in &singles[1..] {
        result = result.meet(single);
    }

    let truth = dataset.truth.as_ref().map(|(_, phi)| phi);
    let mut report = PhiLearnReport::default();
    for (j, &learned) in result.plus.iter().enumerate() {
        let binding = singles
            .iter()
            .position(|s| math::abs(s.plus[j] - learned) <= BINDING_TOL)
            .unwrap_or(0);
        let truth_v = truth.and_then(|t| t.plus.get(j).copied());
        report.components.push(PhiComponentReport {
            kind: ThresholdKind::Plus,
            index: j,
            learned,
            binding_sample: binding,
            truth: truth_v,
            slack: truth_v.map(|t| t - learned),
        });
    }
    for (j, &learned) in result.minus_check.iter().enumerate() {
        let binding = singles
            .iter()
            .position(|s| math::abs(s.minus_check[j] - learned) <= BINDING_TOL)
            .unwrap_or(0);
        let truth_v = truth.and_then(|t| t.minus_check.get(j).copied());
        report.components.push(PhiComponentReport {
            kind: ThresholdKind::MinusCheck,
            index: j,
            learned,
            binding_sample: binding,
            truth: truth_v,
            slack: truth_v.map(|t| learned - t),
        });
    }
    Ok((result, report))
}

/// Outcome of checking learned thresholds against a known truth.
#[derive(Debug, Clone, Default)]
pub struct DominanceReport {
    /// True when the learned parameter dominates (is at least as tight as)
    /// the truth in the lattice order, componentwise.
    pub dominates: bool,
    /// Components where dominance fails: `(kind, index, learned, truth)`.
    pub violations: Vec<(ThresholdKind, usize, f64, f64)>,
    /// Nonnegative tightness slack per component when dominance holds,
    /// `plus` block first.
    pub slacks: Vec<f64>,
}

/// Check `learned >= truth` in the lattice order and report per-component
/// slack. On data generated from the truth this must never report a
/// violation.
pub fn verify_dominance(learned: &PhiParams, truth: &PhiParams) -> DominanceReport {
    let mut report = DominanceReport { dominates: true, ..Default::default() };
    for (j, (&l, &t)) in learned.plus.iter().zip(&truth.plus).enumerate() {
        // Upper thresholds: tighter means smaller.
        if l > t + BINDING_TOL {
            report.dominates = false;
            report.violations.push((ThresholdKind::Plus, j, l, t));
        }
        report.slacks.push(t - l);
    }
    for (j, (&l, &t)) in learned.minus_check.iter().zip(&truth.minus_check).enumerate() {
        // Lower thresholds: tighter means larger.
        if l < t - BINDING_TOL {
            report.dominates = false;
            report.violations.push((ThresholdKind::MinusCheck, j, l, t));
        }
        report.slacks.push(l - t);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Sample;
    use crate::milp::VarSpec;
    use crate::model::{AffineMap, PhiComponentSet, PhiDomain};
    use alloc::vec;

    /// Two variables in [0,1]; h+ rows read each variable, h- row reads
    /// their sum.
    fn template(expert: Vec<f64>) -> Sample {
        let mut h_plus = AffineMap::zero(2, 2);
        h_plus.set(0, 0, 1.0);
        h_plus.set(1, 1, 1.0);
        let mut h_minus = AffineMap::zero(1, 2);
        h_minus.set(0, 0, 1.0);
        h_minus.set(0, 1, 1.0);
        let model = ParamFop {
            name: String::from("tmpl"),
            vars: vec![VarSpec::continuous(0.0, 1.0), VarSpec::continuous(0.0, 1.0)],
            features: AffineMap::zero(1, 2),
            h0: AffineMap::empty(2),
            h_plus,
            h_minus,
            phi_domain: PhiDomain::unbounded(2, 1),
        };
        Sample { model, expert }
    }

    #[test]
    fn single_sample_closed_form() {
        let s = template(vec![0.25, 0.75]);
        let phi = phi_sup_single(&s.model, &s.expert).unwrap();
        assert_eq!(phi.plus, vec![0.25, 0.75]);
        assert_eq!(phi.minus_check, vec![1.0]);
    }

    #[test]
    fn expert_sits_on_the_learned_boundary() {
        let s = template(vec![0.25, 0.75]);
        let phi = phi_sup_single(&s.model, &s.expert).unwrap();
        let g = crate::model::eval_constraints(&s.model, &phi, &s.expert).unwrap();
        for v in g {
            assert!(math::abs(v) <= 1e-12);
        }
    }

    #[test]
    fn dataset_meet_keeps_all_experts_feasible() {
        let a = template(vec![0.2, 0.9]);
        let b = template(vec![0.7, 0.3]);
        let ds = Dataset::new(vec![a.clone(), b.clone()]);
        let phi = phi_sup_dataset(&ds).unwrap();
        // Upper thresholds take the max evaluation, lower the min.
        assert_eq!(phi.plus, vec![0.7, 0.9]);
        assert_eq!(phi.minus_check, vec![1.0]);
        for s in [&a, &b] {
            let g = crate::model::eval_constraints(&s.model, &phi, &s.expert).unwrap();
            assert!(g.iter().all(|&v| v <= 1e-12));
        }
    }

    #[test]
    fn single_sample_dataset_equals_single_closed_form() {
        let s = template(vec![0.5, 0.5]);
        let ds = Dataset::new(vec![s.clone()]);
        let from_ds = phi_sup_dataset(&ds).unwrap();
        let single = phi_sup_single(&s.model, &s.expert).unwrap();
        assert!(from_ds.values_eq(&single));
    }

    #[test]
    fn binary_domain_rounds_toward_feasibility() {
        let mut s = template(vec![0.3, 0.0]);
        s.model.phi_domain.plus = vec![PhiComponentSet::binary(), PhiComponentSet::binary()];
        let phi = phi_sup_single(&s.model, &s.expert).unwrap();
        // 0.3 has no admissible value below it that keeps the expert
        // feasible, so the upper threshold rounds up to 1.
        assert_eq!(phi.plus, vec![1.0, 0.0]);
        let g = crate::model::eval_constraints(&s.model, &phi, &s.expert).unwrap();
        assert!(g.iter().all(|&v| v <= 1e-12));
    }

    #[test]
    fn h0_violation_is_rejected_with_rows() {
        let mut s = template(vec![0.5, 0.5]);
        let mut h0 = AffineMap::zero(1, 2);
        h0.set(0, 0, 1.0);
        h0.offset = vec![-0.2]; // x0 - 0.2 <= 0 violated at 0.5
        s.model.h0 = h0;
        match phi_sup_single(&s.model, &s.expert) {
            Err(ConstraintError::ExpertInfeasible { rows, .. }) => assert_eq!(rows, vec![0]),
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }

    #[test]
    fn dominance_direction() {
        let learned = PhiParams::new(vec![0.0, 1.0], vec![0.5]);
        let truth = PhiParams::new(vec![1.0, 1.0], vec![0.0]);
        let rep = verify_dominance(&learned, &truth);
        assert!(rep.dominates);
        assert_eq!(rep.slacks, vec![1.0, 0.0, 0.5]);
        // Equal parameters: all slacks zero.
        let rep_eq = verify_dominance(&truth, &truth);
        assert!(rep_eq.dominates);
        assert!(rep_eq.slacks.iter().all(|&s| s == 0.0));
        // A truth strictly tighter than learned is a violation.
        let rep_bad = verify_dominance(&truth, &learned);
        assert!(!rep_bad.dominates);
        assert_eq!(rep_bad.violations.len(), 2);
    }

    #[test]
    fn empty_dataset_is_a_usage_error() {
        let ds = Dataset::default();
        assert!(matches!(phi_sup_dataset(&ds), Err(ConstraintError::EmptyDataset)));
    }
}
