//! Adaptive Simpson quadrature with interval bisection.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]` to a combined relative/absolute tolerance
/// `tol * max(1, |I|)`.
///
/// Bisection handles integrands that are only continuous at isolated points
/// (such as `|sin(w s)|`) without locating the kinks up front.
pub fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::QuadratureNotConverged { a, b });
    }
    // A coarse 8-panel start so that an integrand vanishing at the three
    // initial Simpson nodes is not mistaken for zero.
    let panels = 8;
    let width = (b - a) / panels as f64;
    let mut coarse = Vec::with_capacity(panels);
    let mut total_estimate = 0.0;
    for p in 0..panels {
        let lo = a + width * p as f64;
        let hi = if p + 1 == panels { b } else { lo + width };
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (f(lo)?, f(mid)?, f(hi)?);
        let whole = simpson(lo, hi, flo, fmid, fhi);
        total_estimate += whole;
        coarse.push((lo, hi, flo, fmid, fhi, whole));
    }
    let abs_tol = tol * total_estimate.abs().max(1.0);
    let mut sum = 0.0;
    for (lo, hi, flo, fmid, fhi, whole) in coarse {
        sum += refine(&mut f, lo, hi, flo, fmid, fhi, whole, abs_tol / panels as f64, MAX_DEPTH)?;
    }
    Ok(sum)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(f: &mut F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    if !(flm.is_finite() && frm.is_finite()) {
        return Err(Error::NonFinite("quadrature integrand"));
    }
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureNotConverged { a, b });
    }
    Ok(refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)? + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_and_trig() {
        let v = adaptive_simpson(|x| Ok(x * x * x - 2.0 * x), 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 0.0).abs() < 1e-12);
        let s = adaptive_simpson(|x| Ok(x.sin()), 0.0, PI, 1e-12).unwrap();
        assert!((s - 2.0).abs() < 1e-11);
    }

    #[test]
    fn kinked_integrand() {
        // int_0^{3pi} s |sin s| ds = pi + 3pi + 5pi
        let v = adaptive_simpson(|s| Ok(s * s.sin().abs()), 0.0, 3.0 * PI, 1e-12).unwrap();
        assert!((v - 9.0 * PI).abs() < 1e-9, "{v}");
    }

    #[test]
    fn empty_interval() {
        assert_eq!(adaptive_simpson(|_| Ok(1.0), 1.0, 1.0, 1e-10).unwrap(), 0.0);
    }
}
