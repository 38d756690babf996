//! Bracketed bisection.

use crate::error::{Error, Result};

/// Bisection on a bracket `[lo, hi]` of a predicate that is `false` at `lo`
/// and `true` at `hi`. Returns the final bracket once its width is `<= tol`.
///
/// Works for sign conditions (`|x| g(x) < 0.0`) as well as for shooting
/// classifications, and is fully deterministic.
pub fn bisect_predicate<P>(mut lo: f64, mut hi: f64, tol: f64, mut pred: P) -> (f64, f64)
where
    P: FnMut(f64) -> bool,
{
    // 200 halvings exhaust any f64 interval.
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Root of `g` in `[lo, hi]` by bisection to bracket width `tol`.
///
/// `g(lo)` and `g(hi)` must have strictly opposite signs.
pub fn bisect_root<G>(lo: f64, hi: f64, tol: f64, g: G) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let (glo, ghi) = (g(lo), g(hi));
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if !(glo.is_finite() && ghi.is_finite()) || glo.signum() == ghi.signum() {
        return Err(Error::BracketInvalid(format!(
            "no sign change on [{lo}, {hi}]: g = ({glo}, {ghi})"
        )));
    }
    let hi_sign = ghi.signum();
    let (a, b) = bisect_predicate(lo, hi, tol, |x| {
        let v = g(x);
        v == 0.0 || v.signum() == hi_sign
    });
    Ok(0.5 * (a + b))
}
