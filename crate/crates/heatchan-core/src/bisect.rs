//! Bisection for monotone scalar equations.
//!
//! Every parameter equation in this crate (water level, water table, the
//! time-frequency parameters nu and lambda) is continuous and strictly
//! monotone, so bisection is unconditionally convergent and each evaluation
//! is cheap; nothing faster is needed.

use crate::error::{Error, Result};

/// Solve `f(x) = target` for nondecreasing `f` on `[lo, hi]`.
///
/// Iterates until `|f(x) - target| <= rel_tol * |target|` (or the bracket
/// collapses to machine width, whichever comes first) and returns the final
/// midpoint. The bracket must satisfy `f(lo) <= target <= f(hi)`.
pub fn bisect_increasing<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    target: f64,
    rel_tol: f64,
) -> Result<f64> {
    if lo >= hi || lo.is_nan() || hi.is_nan() {
        return Err(Error::usage(format!("invalid bracket [{lo}, {hi}]")));
    }
    let tol = rel_tol * target.abs();
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket at machine resolution
        }
        let v = f(mid);
        if (v - target).abs() <= tol {
            return Ok(mid);
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}
