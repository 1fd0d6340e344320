//! Adaptive Dormand–Prince 5(4) integration for complex-valued linear systems.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

// Butcher tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Fifth-order weights minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const MAX_STEPS: usize = 5_000_000;
const LOCAL_TARGET: f64 = 0.1;

pub const MIN_TOL: f64 = 1e-13;
pub const MAX_TOL: f64 = 1e-6;

pub fn check_tolerance(tol: f64) -> Result<()> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(Error::InvalidTolerance(tol));
    }
    Ok(())
}

/// Requires a finite, strictly increasing grid.
pub fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidGrid("empty time grid".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("non-finite time".into()));
    }
    if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!("times not strictly increasing at {} -> {}", w[0], w[1])));
    }
    Ok(())
}

/// Integrates `y' = f(t, y)` from `times[0]`, handing the state at each grid
/// time to `record`. Steps are shortened to land exactly on grid times, so
/// recorded values carry the integrator's controlled local error and no
/// interpolation error.
///
/// The error test is the usual mixed one: each real and imaginary component
/// is weighted by `tol * (1 + max(|y|, |y_new|))`, and a step is accepted when
/// the RMS of the weighted error estimate is at most one. The controller aims
/// at `LOCAL_TARGET * tol` so that errors accumulated over O(10) time units
/// still sit at or below `tol`.
pub fn integrate<F, R>(mut rhs: F, y0: Vec<C64>, times: &[f64], tol: f64, mut record: R) -> Result<()>
where
    F: FnMut(f64, &[C64], &mut [C64]) -> Result<()>,
    R: FnMut(usize, &[C64]),
{
    check_grid(times)?;
    let tol = LOCAL_TARGET * tol;
    let n = y0.len();
    let mut y = y0;
    let mut t = times[0];
    record(0, &y);
    if times.len() == 1 {
        return Ok(());
    }

    let mut k: [Vec<C64>; 7] = std::array::from_fn(|_| vec![C64::new(0.0, 0.0); n]);
    let mut stage = vec![C64::new(0.0, 0.0); n];
    let mut y_new = vec![C64::new(0.0, 0.0); n];

    rhs(t, &y, &mut k[0])?;
    check_finite(&k[0])?;
    let mut h = initial_step(&mut rhs, t, &y, &k[0], tol, times[times.len() - 1] - t)?;
    let mut steps = 0usize;

    for (idx, &target) in times.iter().enumerate().skip(1) {
        while t < target {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::StepUnderflow { t, step: h });
            }
            let min_step = 1e-14 * t.abs().max(1.0);
            if h < min_step {
                return Err(Error::StepUnderflow { t, step: h });
            }
            let remaining = target - t;
            let landing = h >= remaining;
            let step = if landing { remaining } else { h };

            let combo = |out: &mut [C64], k: &[Vec<C64>; 7], coeffs: &[(usize, f64)]| {
                for i in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for &(j, a) in coeffs {
                        acc += k[j][i] * a;
                    }
                    out[i] = y[i] + acc * step;
                }
            };

            combo(&mut stage, &k, &[(0, A21)]);
            rhs(t + C2 * step, &stage, &mut k[1])?;
            combo(&mut stage, &k, &[(0, A31), (1, A32)]);
            rhs(t + C3 * step, &stage, &mut k[2])?;
            combo(&mut stage, &k, &[(0, A41), (1, A42), (2, A43)]);
            rhs(t + C4 * step, &stage, &mut k[3])?;
            combo(&mut stage, &k, &[(0, A51), (1, A52), (2, A53), (3, A54)]);
            rhs(t + C5 * step, &stage, &mut k[4])?;
            combo(&mut stage, &k, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)]);
            rhs(t + step, &stage, &mut k[5])?;
            combo(&mut y_new, &k, &[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)]);
            rhs(t + step, &y_new, &mut k[6])?;
            check_finite(&k[6])?;

            let mut acc = 0.0;
            for i in 0..n {
                let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * step;
                let scale_re = tol * (1.0 + y[i].re.abs().max(y_new[i].re.abs()));
                let scale_im = tol * (1.0 + y[i].im.abs().max(y_new[i].im.abs()));
                acc += (e.re / scale_re).powi(2) + (e.im / scale_im).powi(2);
            }
            let err = (acc / (2 * n) as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::NonFinite("integrator error estimate"));
            }

            let factor = if err == 0.0 { MAX_FACTOR } else { (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR) };
            if err <= 1.0 {
                t = if landing { target } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                // A step shortened to hit the grid says little about the natural step size.
                if !landing || step >= h {
                    h = step * factor;
                }
            } else {
                h = step * factor.min(1.0);
            }
        }
        record(idx, &y);
    }
    Ok(())
}

fn check_finite(v: &[C64]) -> Result<()> {
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("right-hand side evaluation"));
    }
    Ok(())
}

fn weighted_rms(v: &[C64], y: &[C64], tol: f64) -> f64 {
    let acc: f64 = v
        .iter()
        .zip(y)
        .map(|(x, yy)| {
            let sre = tol * (1.0 + yy.re.abs());
            let sim = tol * (1.0 + yy.im.abs());
            (x.re / sre).powi(2) + (x.im / sim).powi(2)
        })
        .sum();
    (acc / (2 * v.len()) as f64).sqrt()
}

/// Starting step from the norms of `y` and `f(y)`, refined by one explicit Euler probe.
fn initial_step<F>(rhs: &mut F, t: f64, y: &[C64], f0: &[C64], tol: f64, span: f64) -> Result<f64>
where
    F: FnMut(f64, &[C64], &mut [C64]) -> Result<()>,
{
    let d0 = weighted_rms(y, y, tol);
    let d1 = weighted_rms(f0, y, tol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1: Vec<C64> = y.iter().zip(f0).map(|(a, b)| a + b * h0).collect();
    let mut f1 = vec![C64::new(0.0, 0.0); y.len()];
    rhs(t + h0, &y1, &mut f1)?;
    check_finite(&f1)?;
    let diff: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = weighted_rms(&diff, y, tol) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    Ok((100.0 * h0).min(h1).min(span))
}
