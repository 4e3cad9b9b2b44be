//! Scalar root finding on a bracket.

use crate::error::{Error, Result};

/// Absolute tolerance on the root location.
pub const ROOT_TOL: f64 = 1e-13;
/// Iteration cap shared by all scalar root finds.
pub const MAX_ITER: usize = 200;

/// Safeguarded Newton iteration on `[lo, hi]`.
///
/// `f` returns `(value, derivative)`. Falls back to bisection whenever a Newton
/// step leaves the current bracket or fails to halve it. `f(lo)` and `f(hi)`
/// must have opposite signs (or one of them vanish).
pub fn newton_bisect<F>(f: F, mut lo: f64, mut hi: f64) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return Err(Error::NoSolution(format!(
            "no sign change on [{lo}, {hi}]: f = ({flo:e}, {fhi:e})"
        )));
    }
    // orient so that f(lo) < 0
    if flo > 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x);
    for _ in 0..MAX_ITER {
        let newton_out = ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) > 0.0;
        if newton_out || (2.0 * fx).abs() > (dx_old * dfx).abs() || !dfx.is_finite() {
            dx_old = dx;
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx_old = dx;
            dx = fx / dfx;
            x -= dx;
        }
        if dx.abs() < ROOT_TOL {
            return Ok(x);
        }
        let (nf, ndf) = f(x);
        fx = nf;
        dfx = ndf;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo).abs() < ROOT_TOL {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITER,
        residual: fx.abs(),
    })
}

/// Plain bisection on `[lo, hi]`, used where no derivative is at hand.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoSolution(format!(
            "no sign change on [{lo}, {hi}]: f = ({flo:e}, {fhi:e})"
        )));
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
