//! Numeric verification of closed-form constants from the generalization
//! analysis.
//!
//! Two families are checked: the entropy integral bound for the unit ball
//! (`int_0^1 sqrt(log(2/e + 1)) de <= 3.01`) and the zeta-function tail
//! constants behind the high-probability bounds (`2 (zeta(2) - 1) <= 1.3`
//! and `2 (zeta(14/9) - 1) <= 3`). The inequalities hold mathematically,
//! so a failed check indicates a quadrature or series bug and is reported
//! as an error.

use alloc::string::String;
use thiserror::Error;

use crate::math;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("constant check failed: {what} = {value}")]
    CheckFailed { what: String, value: f64 },
}

/// `int_0^1 sqrt(log(2/eps + 1)) d eps`, computed by adaptive Simpson
/// quadrature to absolute error below `1e-8` (plus a provably negligible
/// tail below `1e-11` at the integrable singularity). Checks the bracket
/// `1.0 <= value <= 3.01` before returning.
pub fn dudley_simplex_constant() -> Result<f64, TheoryError> {
    let integrand = |eps: f64| math::sqrt(math::ln(2.0 / eps + 1.0));

    // Geometric panels toward the singularity at zero keep the adaptive
    // recursion shallow.
    let cut = 1e-12_f64;
    let mut total = 0.0;
    let mut hi = 1.0_f64;
    while hi > cut * 1.5 {
        let lo = (hi / 10.0).max(cut);
        total += adaptive_simpson(&integrand, lo, hi, 1e-9, 60)?;
        hi = lo;
    }
    // Tail bound on [0, cut]: integrand <= sqrt(ln(3/eps)) there, and
    // substituting t = ln(3/eps) gives a remainder below
    // 3 e^{-T} (sqrt(T) + 1/(2 sqrt(T))) with T = ln(3/cut) ~ 28.7.
    let t = math::ln(3.0 / cut);
    let tail = 3.0 * math::exp(-t) * (math::sqrt(t) + 0.5 / math::sqrt(t));
    total += 0.5 * tail;

    if !(1.0..=3.01).contains(&total) {
        return Err(TheoryError::CheckFailed {
            what: String::from("entropy integral over the unit interval"),
            value: total,
        });
    }
    Ok(total)
}

fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    depth: usize,
) -> Result<f64, TheoryError> {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64, TheoryError> {
    if depth == 0 {
        return Err(TheoryError::Quadrature(alloc::format!(
            "recursion exhausted on [{a}, {b}]"
        )));
    }
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if math::abs(delta) <= 15.0 * tol {
        Ok(left + right + delta / 15.0)
    } else {
        let half = 0.5 * tol;
        Ok(simpson_rec(f, a, m, fa, flm, fm, left, half, depth - 1)?
            + simpson_rec(f, m, b, fm, frm, fb, right, half, depth - 1)?)
    }
}

/// `2 (zeta(s) - 1)` with the tail of the partial sum bracketed between
/// `int_{n+1}^inf x^-s dx` and `int_n^inf x^-s dx`; terms are added until
/// the bracket width drops below `1e-10`.
fn two_zeta_minus_one(s: f64) -> f64 {
    let mut partial = 0.0; // sum over j >= 2
    let mut j = 2u64;
    loop {
        partial += math::powf(j as f64, -s);
        let n = j as f64;
        let upper = math::powf(n, 1.0 - s) / (s - 1.0);
        let lower = math::powf(n + 1.0, 1.0 - s) / (s - 1.0);
        if upper - lower < 1e-10 || j > 3_000_000 {
            return 2.0 * (partial + 0.5 * (upper + lower));
        }
        j += 1;
    }
}

/// The two tail constants `2 (zeta(C^2/9 - 2) - 1)` for `C = 4 sqrt(2)`
/// (exponent `14/9`) and `C = 6` (exponent `2`), checked against their
/// stated bounds 3 and 1.3.
pub fn zeta_tail_constants() -> Result<(f64, f64), TheoryError> {
    let c_442 = two_zeta_minus_one(14.0 / 9.0);
    let c_6 = two_zeta_minus_one(2.0);
    if c_442 > 3.0 {
        return Err(TheoryError::CheckFailed {
            what: String::from("2(zeta(14/9) - 1)"),
            value: c_442,
        });
    }
    if c_6 > 1.3 {
        return Err(TheoryError::CheckFailed {
            what: String::from("2(zeta(2) - 1)"),
            value: c_6,
        });
    }
    Ok((c_442, c_6))
}
