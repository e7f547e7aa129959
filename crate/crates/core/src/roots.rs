//! Bracketed scalar root finding.

use crate::error::{Error, Result};

pub const MAX_ITER: usize = 200;

/// Stopping rule for the bracketed solvers.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub f_abs: f64,
    pub x_width: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            f_abs: 1e-12,
            x_width: 1e-14,
        }
    }
}

fn check_bracket(lo: f64, hi: f64, flo: f64, fhi: f64) -> Result<()> {
    if !(flo.is_finite() && fhi.is_finite()) {
        return Err(Error::RootFinding {
            lo,
            hi,
            reason: "non-finite endpoint value".into(),
        });
    }
    if flo * fhi > 0.0 {
        return Err(Error::RootFinding {
            lo,
            hi,
            reason: format!("no sign change (f(lo) = {flo:e}, f(hi) = {fhi:e})"),
        });
    }
    Ok(())
}

/// Hybrid bisection/secant: takes the secant (regula falsi) step when it
/// lands well inside the bracket, otherwise bisects. Each iteration keeps a
/// valid bracket, so convergence is guaranteed.
pub fn hybrid<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: Tolerance) -> Result<f64> {
    let mut flo = f(lo);
    let mut fhi = f(hi);
    check_bracket(lo, hi, flo, fhi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    let mut last_width = hi - lo;
    for _ in 0..MAX_ITER {
        let width = hi - lo;
        let mut x = hi - fhi * (hi - lo) / (fhi - flo);
        // Fall back to bisection when the secant step stalls near an end or
        // the bracket did not shrink enough last time.
        let margin = 0.01 * width;
        if !x.is_finite() || x <= lo + margin || x >= hi - margin || width > 0.5 * last_width {
            x = 0.5 * (lo + hi);
        }
        last_width = width;
        let fx = f(x);
        if fx.abs() < tol.f_abs {
            return Ok(x);
        }
        if (fx < 0.0) == (flo < 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        if hi - lo < tol.x_width {
            return Ok(if flo.abs() < fhi.abs() { lo } else { hi });
        }
    }
    Ok(if flo.abs() < fhi.abs() { lo } else { hi })
}

/// Plain bisection to an interval width of `x_tol`. Used as an independent
/// check on closed-form roots.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    check_bracket(lo, hi, flo, fhi)?;
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo < x_tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt2() {
        let r = hybrid(|x| x * x - 2.0, 0.0, 2.0, Tolerance::default()).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn handles_flat_functions() {
        // Very flat near the root: secant steps stall, bisection must take over.
        let r = hybrid(|x: f64| (x - 0.3).powi(7), 0.0, 1.0, Tolerance { f_abs: 0.0, x_width: 1e-14 }).unwrap();
        assert!((r - 0.3).abs() < 1e-6);
    }

    #[test]
    fn rejects_unbracketed() {
        assert!(hybrid(|x| x * x + 1.0, -1.0, 1.0, Tolerance::default()).is_err());
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-10).is_err());
    }
}
