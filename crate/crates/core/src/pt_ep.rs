//! Periodically driven PT-symmetric qubit used as an exceptional-point sensor.
//!
//! ```text
//! H(t) = J (1 + cos w t) sigma_x + i G sigma_z + (d/2) cos(w_d t) (I - sigma_z)
//! ```
//!
//! over one drive period `T = 2 pi / w`. The perturbation frequency `w_d` is
//! the estimated parameter. From the propagator `U(T)` two populations are
//! measured,
//!
//! ```text
//! PJ = |<up|U|down>|^2,   PG = |(<up| - <down|) U (|up> + |down>)|^2 / 4,
//! ```
//!
//! and the response energy follows from `PJ - PG = sin^2(E T)`. Near the
//! exceptional point both `|dE/dw_d|` and the projection noise on `E` diverge;
//! their ratio, the sensitivity, stays finite and above the Hermitian bound
//! obtained from the perturbation alone.
//!
//! Gain is kept as written (`+i G sigma_z`); the passive realization only
//! enters through the noise scale `C0 = exp(2 G T)`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::derivative::richardson;
use crate::error::{Error, Result};
use crate::evolution::{propagate_matrix, HamiltonianFamily};
use crate::noise::{propagate_error, scaled_binomial_variance};
use crate::operator::{pauli, ComplexMatrix, HermitianOp};
use crate::pseudo_hermitian::linspace;
use crate::qfi::channel_bound_uncertainty;

/// Rows need `PJ - PG` at least this far inside `(0, 1)`.
pub const DOMAIN_MARGIN: f64 = 1e-9;

/// Variance denominators below this are reported as an infinite variance.
pub const VARIANCE_DENOMINATOR_FLOOR: f64 = 1e-14;

/// Default relative step of the susceptibility difference.
pub const DEFAULT_RELATIVE_STEP: f64 = 1e-5;

/// Default bracket `(lo, hi) * J` for the exceptional-point search.
pub const DEFAULT_EP_BRACKET: (f64, f64) = (0.01, 3.0);

/// Points of the coarse sign pre-scan inside a bracket.
const PRESCAN_POINTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PtEpParams {
    pub j: f64,
    pub gamma: f64,
    pub omega: f64,
    pub delta: f64,
    pub omega_delta: f64,
    pub nu: u64,
}

impl PtEpParams {
    pub fn new(j: f64, gamma: f64, omega: f64, delta: f64, omega_delta: f64, nu: u64) -> Result<Self> {
        let checks: [(&'static str, f64, bool); 5] = [
            ("coupling J", j, j > 0.0),
            ("dissipation rate Gamma", gamma, gamma >= 0.0),
            ("drive frequency omega", omega, omega > 0.0),
            ("perturbation amplitude delta", delta, delta >= 0.0),
            ("perturbation frequency omega_delta", omega_delta, omega_delta > 0.0),
        ];
        for (what, value, ok) in checks {
            if !(ok && value.is_finite()) {
                return Err(Error::Domain { what, value });
            }
        }
        if nu == 0 {
            return Err(Error::Domain { what: "trial count", value: 0.0 });
        }
        Ok(Self { j, gamma, omega, delta, omega_delta, nu })
    }

    pub fn with_omega_delta(self, omega_delta: f64) -> Self {
        Self { omega_delta, ..self }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    /// Noise scale `exp(2 G T)` of the passive realization.
    pub fn c0(&self) -> f64 {
        (2.0 * self.gamma * self.period()).exp()
    }
}

/// `H_PT(t) + H_d(t)`; not Hermitian when `G > 0`.
pub fn hamiltonian_total(p: &PtEpParams, t: f64) -> ComplexMatrix {
    let coupling = pauli::x().scale_real(p.j * (1.0 + (p.omega * t).cos()));
    let gain = pauli::z().scale(C64::new(0.0, p.gamma));
    let perturbation = (&pauli::identity() - &pauli::z()).scale_real(0.5 * p.delta * (p.omega_delta * t).cos());
    &(&coupling + &gain) + &perturbation
}

/// `U(T)` for one drive period. The trace of `H` is real, so `|det U| = 1`;
/// a larger deviation than the integration error allows is reported.
pub fn propagate_period(p: &PtEpParams, tol: f64) -> Result<ComplexMatrix> {
    let u = propagate_matrix(2, |t| Ok(hamiltonian_total(p, t)), &[0.0, p.period()], tol)?.pop().unwrap();
    let det = u.det().norm();
    let allowed = 10.0 * tol * u.max_abs().powi(2).max(1.0);
    if (det - 1.0).abs() > allowed {
        return Err(Error::Domain { what: "propagator |det U|", value: det });
    }
    Ok(u)
}

/// `(PJ, PG)` with `|up> = (1, 0)` and `|down> = (0, 1)`.
pub fn pj_pgamma(u: &ComplexMatrix) -> (f64, f64) {
    let pj = u[(0, 1)].norm_sqr();
    let pg = (0.5 * (u[(0, 0)] + u[(0, 1)] - u[(1, 0)] - u[(1, 1)])).norm_sqr();
    (pj, pg)
}

/// `asin(sqrt(PJ - PG)) / T` on the principal branch.
pub fn response_energy(pj: f64, pg: f64, period: f64) -> Result<f64> {
    let d = pj - pg;
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::Domain { what: "PJ - PGamma (complex response energy)", value: d });
    }
    Ok(d.sqrt().asin() / period)
}

/// `PJ - PG` at `delta = 0`; changes sign at the exceptional point.
pub fn ep_indicator(j: f64, omega: f64, gamma: f64, tol: f64) -> Result<f64> {
    let p = PtEpParams::new(j, gamma, omega, 0.0, 1.0, 1)?;
    let (pj, pg) = pj_pgamma(&propagate_period(&p, tol)?);
    Ok(pj - pg)
}

/// Dissipation rate of the first exceptional point in `(lo, hi)`.
///
/// A coarse pre-scan locates the first sign change of [`ep_indicator`], which
/// is then bisected until the bracket is narrower than `gamma_tol`.
pub fn find_ep(j: f64, omega: f64, lo: f64, hi: f64, gamma_tol: f64, tol: f64) -> Result<f64> {
    first_root(|g| ep_indicator(j, omega, g, tol), lo, hi, gamma_tol)
}

/// First `omega_delta` in `(lo, hi)` where `PJ - PG` changes sign: the
/// response-energy dip.
pub fn find_dip(p: &PtEpParams, lo: f64, hi: f64, x_tol: f64, tol: f64) -> Result<f64> {
    first_root(
        |wd| {
            let (pj, pg) = pj_pgamma(&propagate_period(&p.with_omega_delta(wd), tol)?);
            Ok(pj - pg)
        },
        lo,
        hi,
        x_tol,
    )
}

fn first_root<F>(f: F, lo: f64, hi: f64, x_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if !(lo < hi) || !(x_tol > 0.0) {
        return Err(Error::InvalidGrid(format!("bad bracket [{lo}, {hi}] with tolerance {x_tol}")));
    }
    let grid = linspace(lo, hi, PRESCAN_POINTS + 1);
    let values = grid.par_iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let k = (0..PRESCAN_POINTS)
        .find(|&k| values[k] == 0.0 || values[k].signum() != values[k + 1].signum())
        .ok_or(Error::NoSignChange { lo, hi })?;
    if values[k] == 0.0 {
        return Ok(grid[k]);
    }
    let (mut a, mut b) = (grid[k], grid[k + 1]);
    let mut fa = values[k];
    while b - a > x_tol {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

fn check_difference(pj: f64, pg: f64, c0: f64) -> Result<f64> {
    for (what, v) in [("PJ outside [0, C0]", pj), ("PGamma outside [0, C0]", pg)] {
        if !(v >= 0.0 && v <= c0 * (1.0 + 1e-12)) {
            return Err(Error::Domain { what, value: v });
        }
    }
    let d = pj - pg;
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::Domain { what: "PJ - PGamma outside [0, 1]", value: d });
    }
    Ok(d)
}

/// `Var[E] = [C0 (PJ + PG) - (PJ^2 + PG^2)] / [4 nu T^2 (PJ - PG)(1 - PJ + PG)]`,
/// infinite where the denominator vanishes.
pub fn response_variance(pj: f64, pg: f64, c0: f64, nu: u64, period: f64) -> Result<f64> {
    let d = check_difference(pj, pg, c0)?;
    if nu == 0 {
        return Err(Error::Domain { what: "trial count", value: 0.0 });
    }
    let denominator = d * (1.0 - d);
    if denominator < VARIANCE_DENOMINATOR_FLOOR {
        return Ok(f64::INFINITY);
    }
    let numerator = c0 * (pj + pg) - (pj * pj + pg * pg);
    Ok(numerator / (4.0 * nu as f64 * period * period * denominator))
}

/// The same variance composed by first-order propagation of the two
/// independent scaled-binomial estimates.
pub fn response_variance_delta_method(pj: f64, pg: f64, c0: f64, nu: u64, period: f64) -> Result<f64> {
    let d = check_difference(pj, pg, c0)?;
    let denominator = d * (1.0 - d);
    if denominator < VARIANCE_DENOMINATOR_FLOOR {
        return Ok(f64::INFINITY);
    }
    let g = 1.0 / (2.0 * period * denominator.sqrt());
    let variances = [scaled_binomial_variance(pj, c0, nu)?, scaled_binomial_variance(pg, c0, nu)?];
    propagate_error(&[g, -g], &variances)
}

/// `E_res` at the parameters of `p`.
pub fn response_energy_at(p: &PtEpParams, tol: f64) -> Result<f64> {
    let (pj, pg) = pj_pgamma(&propagate_period(p, tol)?);
    response_energy(pj, pg, p.period())
}

/// `|dE_res/dw_d|` by a Richardson central difference with step `step`
/// (default `1e-5 * w_d`). Fails if either side leaves the real-energy region.
pub fn ep_susceptibility(p: &PtEpParams, step: Option<f64>, tol: f64) -> Result<f64> {
    let h = step.unwrap_or(DEFAULT_RELATIVE_STEP * p.omega_delta);
    Ok(richardson(|wd| response_energy_at(&p.with_omega_delta(wd), tol), p.omega_delta, h)?.abs())
}

/// Everything the sensitivity estimate is built from at one `w_d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpPoint {
    pub pj: f64,
    pub pgamma: f64,
    pub e_res: f64,
    pub var_e: f64,
    pub chi_e: f64,
    /// `sqrt(Var[E]) / |dE/dw_d|`.
    pub sensitivity: f64,
}

pub fn ep_sensitivity(p: &PtEpParams, step: Option<f64>, tol: f64) -> Result<EpPoint> {
    let (pj, pg) = pj_pgamma(&propagate_period(p, tol)?);
    let e_res = response_energy(pj, pg, p.period())?;
    let var_e = response_variance(pj, pg, p.c0(), p.nu, p.period())?;
    let chi_e = ep_susceptibility(p, step, tol)?;
    let sensitivity = if chi_e == 0.0 { f64::INFINITY } else { var_e.sqrt() / chi_e };
    Ok(EpPoint { pj, pgamma: pg, e_res, var_e, chi_e, sensitivity })
}

/// The perturbation `(d/2) cos(w_d t)(I - sigma_z)` as a Hermitian family in `w_d`.
#[derive(Clone, Copy, Debug)]
pub struct PerturbationFamily {
    pub delta: f64,
}

impl HamiltonianFamily for PerturbationFamily {
    fn dim(&self) -> usize {
        2
    }

    fn hamiltonian(&self, omega_delta: f64, t: f64) -> Result<HermitianOp> {
        HermitianOp::new((&pauli::identity() - &pauli::z()).scale_real(0.5 * self.delta * (omega_delta * t).cos()))
    }

    fn dhamiltonian(&self, omega_delta: f64, t: f64) -> Result<HermitianOp> {
        HermitianOp::new((&pauli::identity() - &pauli::z()).scale_real(-0.5 * self.delta * t * (omega_delta * t).sin()))
    }
}

/// Hermitian bound on `delta w_d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianBoundEp {
    /// `1 / (sqrt(nu) int_0^T d s |sin(w_d s)| ds)` by quadrature.
    pub integral: f64,
    /// `w_d^4 / (sqrt(nu) d^2 [sin(w_d T) - w_d T cos(w_d T)]^2)`, the squared
    /// closed form kept for comparison only.
    pub as_printed: f64,
}

pub fn hermitian_bound_ep(p: &PtEpParams) -> Result<HermitianBoundEp> {
    let integral = if p.delta == 0.0 {
        f64::INFINITY
    } else {
        channel_bound_uncertainty(&PerturbationFamily { delta: p.delta }, p.omega_delta, p.period(), p.nu)?
    };
    let x = p.omega_delta * p.period();
    let bracket = x.sin() - x * x.cos();
    let as_printed = p.omega_delta.powi(4) / ((p.nu as f64).sqrt() * p.delta * p.delta * bracket * bracket);
    Ok(HermitianBoundEp { integral, as_printed })
}

/// `w_d^2 / (sqrt(nu) d [sin(w_d T) - w_d T cos(w_d T)])`, equal to the
/// integral bound while `w_d T <= pi`.
pub fn hermitian_bound_ep_closed(p: &PtEpParams) -> f64 {
    let x = p.omega_delta * p.period();
    p.omega_delta.powi(2) / ((p.nu as f64).sqrt() * p.delta * (x.sin() - x * x.cos()))
}

/// One `w_d` of a scan; excluded rows carry `NaN` and a reason.
#[derive(Clone, Debug, PartialEq)]
pub struct EpScanRow {
    pub omega_delta: f64,
    pub pj: f64,
    pub pgamma: f64,
    pub e_res: f64,
    pub var_e: f64,
    pub chi_e: f64,
    pub sensitivity: f64,
    pub hermitian_bound: f64,
    pub excluded_reason: Option<String>,
}

impl EpScanRow {
    pub const COLUMNS: [&'static str; 9] =
        ["omega_delta", "PJ", "PGamma", "E_res", "var_E", "chi_E", "sensitivity", "hermitian_bound", "excluded_reason"];

    /// Numeric values in [`Self::COLUMNS`] order, without the reason.
    pub fn values(&self) -> [f64; 8] {
        [self.omega_delta, self.pj, self.pgamma, self.e_res, self.var_e, self.chi_e, self.sensitivity, self.hermitian_bound]
    }

    pub fn is_excluded(&self) -> bool {
        self.excluded_reason.is_some()
    }
}

/// Inputs of a scan over `w_d`. `params.omega_delta` is ignored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanSpec {
    pub params: PtEpParams,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub tol: f64,
    /// Relative susceptibility step; `None` uses [`DEFAULT_RELATIVE_STEP`].
    pub relative_step: Option<f64>,
}

/// Rows in grid order, evaluated in parallel.
pub fn scan(spec: &ScanSpec) -> Result<Vec<EpScanRow>> {
    if spec.count < 1 {
        return Err(Error::InvalidGrid("empty omega_delta grid".into()));
    }
    crate::ode::check_tolerance(spec.tol)?;
    let grid = linspace(spec.start, spec.stop, spec.count);
    grid.into_par_iter().map(|wd| scan_row(&spec.params.with_omega_delta(wd), spec)).collect()
}

fn scan_row(p: &PtEpParams, spec: &ScanSpec) -> Result<EpScanRow> {
    let bound = hermitian_bound_ep(p)?.integral;
    let excluded = |pj: f64, pg: f64, reason: String| EpScanRow {
        omega_delta: p.omega_delta,
        pj,
        pgamma: pg,
        e_res: f64::NAN,
        var_e: f64::NAN,
        chi_e: f64::NAN,
        sensitivity: f64::NAN,
        hermitian_bound: bound,
        excluded_reason: Some(reason),
    };
    let (pj, pg) = match propagate_period(p, spec.tol) {
        Ok(u) => pj_pgamma(&u),
        Err(e) => return Ok(excluded(f64::NAN, f64::NAN, e.to_string())),
    };
    let d = pj - pg;
    if !(d > DOMAIN_MARGIN && d < 1.0 - DOMAIN_MARGIN) {
        return Ok(excluded(pj, pg, format!("PJ - PGamma = {d:.6e} outside (0, 1)")));
    }
    let step = spec.relative_step.map(|r| r * p.omega_delta);
    match ep_sensitivity(p, step, spec.tol) {
        Ok(point) => Ok(EpScanRow {
            omega_delta: p.omega_delta,
            pj,
            pgamma: pg,
            e_res: point.e_res,
            var_e: point.var_e,
            chi_e: point.chi_e,
            sensitivity: point.sensitivity,
            hermitian_bound: bound,
            excluded_reason: None,
        }),
        Err(e) => Ok(excluded(pj, pg, e.to_string())),
    }
}

/// Defaults: `J = 1`, `w = 3`, `d = 0.05`, `nu = 1`, and `G` at the first
/// exceptional point in the default bracket.
pub fn default_params(tol: f64) -> Result<PtEpParams> {
    let (j, omega) = (1.0, 3.0);
    let gamma = find_ep(j, omega, DEFAULT_EP_BRACKET.0 * j, DEFAULT_EP_BRACKET.1 * j, 1e-13, tol)?;
    PtEpParams::new(j, gamma, omega, 0.05 * j, 2.0, 1)
}
