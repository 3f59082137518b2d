//! Bracketing root finder for strictly increasing scalar maps through the origin.

use crate::error::{Error, Result};

/// Largest factor by which the initial bracket may be widened before giving up.
const MAX_EXPANSION: f64 = 18_446_744_073_709_551_616.0; // 2^64
const MAX_ITERATIONS: usize = 4000;

/// Solves `φ(s) = y` for a strictly increasing `φ` with `φ(0) = 0`.
///
/// `bound` is a class-specific a-priori bound on `|s|`; the root is searched in
/// `[0, bound]` (mirrored for `y < 0`) and the bracket is doubled if the bound
/// turns out to be wrong. Bisection is combined with Newton steps whenever a
/// derivative is supplied and the step stays inside the bracket.
/// Returns once `|φ(s) − y| ≤ abs_tol` or the bracket can no longer shrink.
pub(crate) fn solve_increasing<F, D>(phi: F, dphi: Option<D>, y: f64, bound: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if y == 0.0 {
        return Ok(0.0);
    }
    if !y.is_finite() {
        return Err(Error::InvalidParameter(format!("cannot invert at {y}")));
    }
    let sign = y.signum();
    let target = y.abs();
    // g(s) = sign·φ(sign·s) − |y| is increasing with g(0) = −|y| < 0
    let g = |s: f64| sign * phi(sign * s) - target;

    let initial = if bound.is_finite() && bound > 0.0 { bound } else { target };
    let mut hi = initial;
    let mut g_hi = g(hi);
    while !(g_hi >= 0.0) {
        if g_hi.is_nan() || hi > initial * MAX_EXPANSION {
            return Err(Error::BracketExpansion { target: y });
        }
        hi *= 2.0;
        g_hi = g(hi);
    }
    if g_hi.abs() <= abs_tol {
        return Ok(sign * hi);
    }
    let mut lo = 0.0_f64;
    let mut g_lo = -target;

    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITERATIONS {
        let gx = g(x);
        if gx.is_nan() {
            return Err(Error::ClassViolation(format!("ψ evaluated to NaN at {}", sign * x)));
        }
        if gx.abs() <= abs_tol {
            return Ok(sign * x);
        }
        if gx < 0.0 {
            lo = x;
            g_lo = gx;
        } else {
            hi = x;
            g_hi = gx;
        }
        if hi - lo <= f64::EPSILON * hi || hi <= f64::MIN_POSITIVE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        x = match &dphi {
            Some(d) => {
                let slope = d(sign * x);
                let step = x - gx / slope;
                if slope.is_finite() && slope > 0.0 && step > lo && step < hi {
                    if (step - x).abs() <= 4.0 * f64::EPSILON * x {
                        return Ok(sign * step);
                    }
                    step
                } else {
                    mid
                }
            }
            None => mid,
        };
        if x == lo || x == hi {
            x = mid;
        }
        if x == lo || x == hi {
            break;
        }
    }
    let best = if (-g_lo) <= g_hi { lo } else { hi };
    Ok(sign * best)
}
