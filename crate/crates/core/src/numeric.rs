//! Shared numerical plumbing: piecewise quadrature, bracketed root search and
//! a few log helpers that keep limits finite.

use crate::error::{Error, Result};
use roots::{find_root_brent, SearchError, SimpleConvergency};

/// Absolute target per smooth piece handed to the double-exponential rule.
pub const QUAD_PIECE_TOL: f64 = 1e-13;

/// Integrates `f` over `[lo, hi]`, splitting at every breakpoint inside the
/// interval. Breakpoints mark kinks and jumps of the integrand; between them
/// it must be smooth for the double-exponential rule to converge.
pub fn integrate_piecewise<F>(f: F, lo: f64, hi: f64, breakpoints: &[f64]) -> f64
where
    F: Fn(f64) -> f64,
{
    if !(hi > lo) {
        return 0.0;
    }
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > lo && *x < hi)
        .collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    cuts.windows(2)
        .map(|w| quadrature::double_exponential::integrate(&f, w[0], w[1], QUAD_PIECE_TOL).integral)
        .sum()
}

/// Finds a root of `f` in `[lo, hi]` with Brent's bracketing method.
///
/// `f(lo)` and `f(hi)` must differ in sign (or one of them be zero).
/// `tol` bounds both the bracket width and `|f(root)|`.
pub fn bracketed_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::NoRoot { lo, hi, f_lo, f_hi });
    }
    let mut conv = SimpleConvergency {
        eps: tol,
        max_iter: 500,
    };
    match find_root_brent(lo, hi, &f, &mut conv) {
        Ok(x) => Ok(x),
        Err(SearchError::NoBracketing) => Err(Error::NoRoot { lo, hi, f_lo, f_hi }),
        Err(_) => Err(Error::NoConvergence { lo, hi }),
    }
}

/// `x * ln(x / y)`-style products where the prefactor may vanish: returns 0
/// when `a == 0`, otherwise `a * ln(ratio)`.
#[inline]
pub(crate) fn xlog(a: f64, ratio: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * ratio.ln()
    }
}

/// `a * ln(1 + z)` with the same zero-prefactor convention as [`xlog`].
#[inline]
pub(crate) fn xlog1p(a: f64, z: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * z.ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_integral_of_a_kinked_function() {
        // |x - 0.3| on [0, 1] = 0.045 + 0.245
        let v = integrate_piecewise(|x| (x - 0.3f64).abs(), 0.0, 1.0, &[0.3]);
        assert!((v - 0.29).abs() < 1e-14, "{v}");
    }

    #[test]
    fn empty_interval_integrates_to_zero() {
        assert_eq!(integrate_piecewise(|_| 1.0, 0.5, 0.5, &[]), 0.0);
    }

    #[test]
    fn root_of_a_cubic() {
        let r = bracketed_root(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn same_sign_endpoints_are_rejected() {
        let err = bracketed_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::NoRoot { .. }));
    }

    #[test]
    fn xlog_vanishes_with_its_prefactor() {
        assert_eq!(xlog(0.0, 0.0), 0.0);
        assert!((xlog(2.0, std::f64::consts::E) - 2.0).abs() < 1e-15);
        assert_eq!(xlog1p(0.0, -1.0), 0.0);
    }
}
