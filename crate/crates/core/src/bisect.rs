//! Bisection root finding.
//!
//! Every one-dimensional equation in the crate is monotone, so bisection with
//! a fixed iteration cap is used everywhere; no derivative methods.

use alloc::format;

use crate::{Error, Result};

/// Iteration cap for all bisections.
pub const MAX_ITER: usize = 200;

/// Absolute residual tolerance used by the value-targeted solvers.
pub const VALUE_TOL: f64 = 1e-12;

/// Bisect `f` on `[lo, hi]` until `|f(mid)| ≤ value_tol`, requiring
/// `f(lo) ≤ 0 ≤ f(hi)` or the reverse.
pub fn bisect_value<F: FnMut(f64) -> f64>(
    mut lo: f64,
    mut hi: f64,
    mut f: F,
    value_tol: f64,
) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if (flo > 0.0) == (fhi > 0.0) {
        return Err(Error::Bisection(format!(
            "no sign change on [{lo}, {hi}]: f = ({flo:e}, {fhi:e})"
        )));
    }
    let rising = fhi > 0.0;
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if libm::fabs(fm) <= value_tol {
            return Ok(mid);
        }
        if (fm > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(mid)
}

/// Bisect until the bracket width drops below `width_tol`; returns the
/// midpoint of the final bracket. Use when accuracy in the *argument* is what
/// matters (flat functions near the root).
pub fn bisect_width<F: FnMut(f64) -> f64>(
    mut lo: f64,
    mut hi: f64,
    mut f: F,
    width_tol: f64,
) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if (flo > 0.0) == (fhi > 0.0) {
        return Err(Error::Bisection(format!(
            "no sign change on [{lo}, {hi}]: f = ({flo:e}, {fhi:e})"
        )));
    }
    let rising = fhi > 0.0;
    for _ in 0..MAX_ITER {
        if hi - lo <= width_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisect a boolean predicate that flips from `true` to `false` once on
/// `[lo, hi]`; returns the final `(last_true, first_false)` bracket.
/// `pred(lo)` must be true and `pred(hi)` false.
pub fn bisect_flip<F: FnMut(f64) -> bool>(
    mut lo: f64,
    mut hi: f64,
    mut pred: F,
    width_tol: f64,
) -> (f64, f64) {
    for _ in 0..MAX_ITER {
        if hi - lo <= width_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect_value(0.0, 2.0, |x| x * x - 2.0, 1e-13).unwrap();
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-6);
        let r = bisect_width(0.0, 2.0, |x| x * x - 2.0, 1e-13).unwrap();
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(bisect_value(1.0, 2.0, |x| x, 1e-12).is_err());
    }

    #[test]
    fn falling_function() {
        let r = bisect_width(0.0, 3.0, |x| 1.0 - x, 1e-14).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flip_bracket() {
        let (lo, hi) = bisect_flip(0.0, 1.0, |x| x < 0.625, 1e-9);
        assert!(lo < 0.625 && 0.625 <= hi && hi - lo <= 1e-9);
    }
}
