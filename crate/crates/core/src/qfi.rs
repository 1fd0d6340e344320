//! Quantum Fisher information of pure probes, its bounds and its rate.
//!
//! For a pure probe `|psi0>` the QFI is `F = 4 Var[h]`, with `h` the
//! transformed local generator from [`crate::evolution`]. Two bounds hold for
//! every probe:
//!
//! * `sqrt F(t) <= int_0^t ||dH/dlambda(s)|| ds` (channel bound), and
//! * `|d sqrt F / dt| <= ||dH/dlambda(t)||` (rate bound),
//!
//! where `||.||` is the spectral width. The rate itself is evaluated from
//! `dF/dt = 8 Cov[U^dagger dH/dlambda U, h]`.

use crate::error::{Error, Result};
use crate::evolution::{propagate_unitary, HamiltonianFamily, PropagationRecord};
use crate::operator::{covariance, seminorm, variance, HermitianOp, PureState};
use crate::quadrature::adaptive_simpson;

/// Below this QFI the covariance quotient for the rate is not trusted.
pub const RATE_QFI_FLOOR: f64 = 1e-12;

/// Relative tolerance of the channel-bound quadrature.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Default parameter step of the fidelity oracle.
pub const DEFAULT_FIDELITY_STEP: f64 = 1e-3;

/// `F = 4 Var[h]` on `psi0`.
pub fn qfi_pure(h: &HermitianOp, psi0: &PureState) -> Result<f64> {
    Ok(4.0 * variance(h, psi0)?)
}

/// QFI from the curvature of the pure-state fidelity `|<psi_lambda|psi_lambda+d>|`.
///
/// Evolves `psi0` at `lambda`, `lambda +- d` and `lambda +- d/2`, forms the
/// second difference at both steps and combines them by one Richardson step.
/// Independent of the generator route: only propagators are used.
pub fn qfi_fidelity_oracle<F: HamiltonianFamily + ?Sized>(
    family: &F,
    lambda: f64,
    psi0: &PureState,
    t: f64,
    dlambda: f64,
    tol: f64,
) -> Result<f64> {
    if !(dlambda > 0.0 && dlambda.is_finite()) {
        return Err(Error::Domain { what: "fidelity step", value: dlambda });
    }
    if psi0.dim() != family.dim() {
        return Err(Error::DimensionMismatch { expected: family.dim(), found: psi0.dim() });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let grid = [0.0, t];
    let evolve = |l: f64| -> Result<PureState> {
        let u = propagate_unitary(family, l, &grid, tol)?.pop().unwrap();
        psi0.evolve(&u)
    };
    let center = evolve(lambda)?;
    let f_self = center.inner(&center).norm();
    let curvature = |step: f64| -> Result<f64> {
        let plus = center.inner(&evolve(lambda + step)?).norm();
        let minus = center.inner(&evolve(lambda - step)?).norm();
        Ok(-4.0 * (plus - 2.0 * f_self + minus) / (step * step))
    };
    let coarse = curvature(dlambda)?;
    let fine = curvature(0.5 * dlambda)?;
    Ok(((4.0 * fine - coarse) / 3.0).max(0.0))
}

/// QFI, its rate and both bounds sampled on a propagation grid.
#[derive(Clone, Debug)]
pub struct QfiSeries {
    pub times: Vec<f64>,
    pub qfi: Vec<f64>,
    /// `d sqrt(F) / dt`.
    pub sqrt_qfi_rate: Vec<f64>,
    /// Points where `F` was too small for the covariance route and the rate
    /// is the one-sided limit `2 sqrt(Var[U^dagger dH/dlambda U])` instead.
    pub rate_one_sided: Vec<bool>,
    /// `[int_0^t ||dH/dlambda|| ds]^2`.
    pub channel_bound: Vec<f64>,
    /// `||dH/dlambda(t)||`.
    pub rate_bound: Vec<f64>,
}

impl QfiSeries {
    /// Largest `sqrt(F) - sqrt(channel bound)` over the grid.
    pub fn channel_bound_excess(&self) -> f64 {
        self.qfi
            .iter()
            .zip(&self.channel_bound)
            .map(|(f, c)| f.max(0.0).sqrt() - c.sqrt())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest `|d sqrt F/dt| - ||dH/dlambda||` over the grid.
    pub fn rate_bound_excess(&self) -> f64 {
        self.sqrt_qfi_rate
            .iter()
            .zip(&self.rate_bound)
            .map(|(r, b)| r.abs() - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evaluates [`QfiSeries`] from a propagation record of `family`.
pub fn qfi_series<F: HamiltonianFamily + ?Sized>(
    record: &PropagationRecord,
    psi0: &PureState,
    family: &F,
) -> Result<QfiSeries> {
    if psi0.dim() != family.dim() {
        return Err(Error::DimensionMismatch { expected: family.dim(), found: psi0.dim() });
    }
    let lambda = record.lambda;
    let n = record.len();

    let qfi = record.generators.iter().map(|h| qfi_pure(h, psi0)).collect::<Result<Vec<_>>>()?;
    let sqrt_f: Vec<f64> = qfi.iter().map(|f| f.max(0.0).sqrt()).collect();

    let mut sqrt_qfi_rate = Vec::with_capacity(n);
    let mut rate_one_sided = Vec::with_capacity(n);
    let mut rate_bound = Vec::with_capacity(n);
    for k in 0..n {
        let t = record.times[k];
        let dh = family.dhamiltonian(lambda, t)?;
        rate_bound.push(seminorm(&dh)?);
        let moving = HermitianOp::with_tolerance(dh.conjugate_by(&record.unitaries[k]), 1e-9)?;
        if qfi[k] > RATE_QFI_FLOOR {
            let cov = covariance(&moving, &record.generators[k], psi0)?;
            sqrt_qfi_rate.push(8.0 * cov / (2.0 * sqrt_f[k]));
            rate_one_sided.push(false);
        } else {
            // With h psi0 proportional to psi0 the covariance term vanishes and
            // sqrt(F) grows as 2 |s| sqrt(Var[U^dagger dH U]) on either side.
            sqrt_qfi_rate.push(2.0 * variance(&moving, psi0)?.max(0.0).sqrt());
            rate_one_sided.push(true);
        }
    }

    let mut channel_bound = Vec::with_capacity(n);
    let mut integral = 0.0;
    let mut prev = 0.0;
    for &t in &record.times {
        integral += seminorm_integral(family, lambda, prev, t)?;
        channel_bound.push(integral * integral);
        prev = t;
    }

    Ok(QfiSeries { times: record.times.clone(), qfi, sqrt_qfi_rate, rate_one_sided, channel_bound, rate_bound })
}

/// `int_a^b ||dH/dlambda(lambda, s)|| ds` by adaptive Simpson.
pub fn seminorm_integral<F: HamiltonianFamily + ?Sized>(family: &F, lambda: f64, a: f64, b: f64) -> Result<f64> {
    adaptive_simpson(|s| seminorm(&family.dhamiltonian(lambda, s)?), a, b, QUADRATURE_TOL)
}

/// Quantum Cramér–Rao bound `1 / sqrt(nu F)`; infinite when `F = 0`.
pub fn cramer_rao(qfi: f64, nu: u64) -> f64 {
    assert!(nu >= 1, "at least one trial is required");
    if qfi <= 0.0 {
        return f64::INFINITY;
    }
    1.0 / (nu as f64 * qfi).sqrt()
}

/// Lower bound `1 / (sqrt(nu) int_0^T ||dH/dlambda|| ds)` on the estimation
/// uncertainty of any probe and any measurement after time `t_final`.
pub fn channel_bound_uncertainty<F: HamiltonianFamily + ?Sized>(
    family: &F,
    lambda: f64,
    t_final: f64,
    nu: u64,
) -> Result<f64> {
    if !(t_final > 0.0) {
        return Err(Error::Domain { what: "evolution time", value: t_final });
    }
    if nu == 0 {
        return Err(Error::Domain { what: "trial count", value: 0.0 });
    }
    let integral = seminorm_integral(family, lambda, 0.0, t_final)?;
    if integral <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / ((nu as f64).sqrt() * integral))
}
