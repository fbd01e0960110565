//! Bracketed bisection with a Newton polish.

use crate::error::{Error, Result};

#[inline]
fn different_signs(a: f64, b: f64) -> bool {
    (a < 0.0) != (b < 0.0)
}

/// Bisect `f` on `[lo, hi]` until the bracket is narrower than `width`.
///
/// Requires `f(lo)` and `f(hi)` to differ in sign or one of them to vanish.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, width: f64) -> Result<f64> {
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !different_signs(flo, fhi) {
        return Err(Error::NumericalBreakdown(format!("no sign change on [{lo}, {hi}]: f = {flo:e}, {fhi:e}")));
    }
    // 200 halvings exhaust any f64 bracket
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if different_signs(flo, fm) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}

/// Run `steps` Newton iterations from `x0`, refusing any step that leaves `[lo, hi]`
/// or does not reduce `|f|`.
pub fn newton_polish<F, D>(f: F, df: D, x0: f64, steps: usize, lo: f64, hi: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut x = x0;
    let mut fx = f(x);
    for _ in 0..steps {
        let d = df(x);
        if fx == 0.0 || d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - fx / d;
        if !(lo..=hi).contains(&next) {
            break;
        }
        let fn_ = f(next);
        if fn_.abs() > fx.abs() {
            break;
        }
        x = next;
        fx = fn_;
    }
    x
}

/// Move `edge` away from `anchor` by doubling the distance until `ok(edge)` holds.
pub fn expand_bracket<P: Fn(f64) -> bool>(anchor: f64, mut edge: f64, ok: P, max_doublings: u32) -> Result<f64> {
    for _ in 0..=max_doublings {
        if ok(edge) {
            return Ok(edge);
        }
        edge = anchor + 2.0 * (edge - anchor);
    }
    Err(Error::NumericalBreakdown(format!("bracket expansion from {anchor} failed")))
}
