//! Inequality and agreement checks behind the `verify` command.
//!
//! Each group returns named [`Check`]s; [`run_all`] assembles them into a
//! [`VerificationReport`] in a fixed order, so the report depends only on the
//! seed, the tolerance and the sample sizes.

use rayon::prelude::*;

use qsense::evolution::{propagate, propagate_unitary};
use qsense::noise::{
    mean_and_variance, multinomial_variance, sample_multinomial, sample_projection_with, scaled_binomial_fourth_moment,
    scaled_binomial_variance, stream, variance_standard_error,
};
use qsense::operator::{covariance, seminorm, tensor, variance, ComplexMatrix, HermitianOp};
use qsense::pseudo_hermitian::{
    conditional_populations, hermitian_bound, linspace, max_susceptibility, p1_closed, probe_state, qfi_closed,
    qfi_rate_closed, sensitivity, two_level_population, DilatedFamily, PseudoHermitianParams, Sensitivity,
};
use qsense::pt_ep::{
    default_params, ep_sensitivity, find_dip, response_energy, response_variance, response_variance_delta_method, scan,
    ScanSpec,
};
use qsense::qfi::{qfi_series, QfiSeries};
use qsense::random::{self, RandomFamily};
use qsense::Result;

use crate::config::VerifyConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `observed <= target + tolerance`.
    AtMost,
    /// `observed >= target - tolerance`.
    AtLeast,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub relation: Relation,
    pub target: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, observed: f64, target: f64, tolerance: f64) -> Self {
        let pass = observed <= target + tolerance;
        Self { name: name.into(), relation: Relation::AtMost, target, observed, tolerance, pass }
    }

    pub fn at_least(name: impl Into<String>, observed: f64, target: f64, tolerance: f64) -> Self {
        let pass = observed >= target - tolerance;
        Self { name: name.into(), relation: Relation::AtLeast, target, observed, tolerance, pass }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    /// Conjunction of every check.
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Inputs shared by every group.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Suite {
    pub seed: u64,
    pub tol: f64,
    pub sizes: VerifyConfig,
}

/// Stream index of the `k`-th draw of group `group`, so groups never share randomness.
fn stream_index(group: u64, k: usize) -> u64 {
    (group << 32) | k as u64
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.min(b) })
}

/// QFI series of the dilated sensor at `t in {tau/4, tau/2, tau, 2 tau}` for
/// `epsilon in {0.1, 0.01}`, `omega = 1` and `lambda in {-0.2, 0, 0.3}`.
fn dilated_sensor_series(tol: f64) -> Result<Vec<(PseudoHermitianParams, QfiSeries)>> {
    let mut cases = Vec::new();
    for eps in [0.1, 0.01] {
        for lam in [-0.2, 0.0, 0.3] {
            cases.push(PseudoHermitianParams::new(eps, 1.0, lam)?);
        }
    }
    cases
        .into_par_iter()
        .map(|p| {
            let family = DilatedFamily::new(p.epsilon, p.omega)?;
            let tau = p.tau();
            let times = [0.0, 0.25 * tau, 0.5 * tau, tau, 2.0 * tau];
            let record = propagate(&family, p.lam, &times, tol)?;
            Ok((p, qfi_series(&record, &probe_state(p.epsilon)?, &family)?))
        })
        .collect()
}

/// Numerical QFI of the dilated sensor against its closed form.
pub fn qfi_closed_form(suite: &Suite) -> Result<Vec<Check>> {
    let series = dilated_sensor_series(suite.tol)?;
    let worst = max_of(series.iter().flat_map(|(p, s)| {
        s.times.iter().zip(&s.qfi).skip(1).map(move |(&t, &f)| {
            let exact = qfi_closed(p, t);
            (f - exact).abs() / exact
        })
    }));
    Ok(vec![Check::at_most("qfi_closed_form_relative_error", worst, 0.0, 1e-8)])
}

/// Exact QFI rate of the dilated sensor against the numerical one, and `|rate| <= 2`.
pub fn qfi_rate(suite: &Suite) -> Result<Vec<Check>> {
    let series = dilated_sensor_series(suite.tol)?;
    let mut diff = Vec::new();
    let mut size = Vec::new();
    for (p, s) in &series {
        for (&t, &r) in s.times.iter().zip(&s.sqrt_qfi_rate).skip(1) {
            let exact = qfi_rate_closed(p, t);
            diff.push((r - exact).abs());
            size.push(exact.abs());
        }
    }
    Ok(vec![
        Check::at_most("qfi_rate_closed_vs_numeric", max_of(diff), 0.0, 1e-5),
        Check::at_most("qfi_rate_below_seminorm", max_of(size), 2.0, 1e-12),
    ])
}

/// `sqrt(F) <= int ||dH/dlambda||` for the dilated sensor and for random families.
pub fn channel_bound(suite: &Suite) -> Result<Vec<Check>> {
    let series = dilated_sensor_series(suite.tol)?;
    let sensor = max_of(series.iter().flat_map(|(_, s)| s.times.iter().zip(&s.qfi).map(|(t, f)| f.max(0.0).sqrt() - 2.0 * t)));
    let times = linspace(0.0, 4.0, 21);
    let excess: Vec<f64> = (0..suite.sizes.families)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(suite.seed, stream_index(3, k));
            let family = RandomFamily::new(&mut rng, 4);
            let psi = random::state(&mut rng, 4);
            let record = propagate(&family, 0.2, &times, suite.tol)?;
            Ok(qfi_series(&record, &psi, &family)?.channel_bound_excess())
        })
        .collect::<Result<_>>()?;
    Ok(vec![
        Check::at_most("channel_bound_dilated_sensor", sensor, 0.0, 1e-8),
        Check::at_most("channel_bound_random_families", max_of(excess), 0.0, 1e-8),
    ])
}

/// Post-selected dilation against the two-level population, and the ancilla
/// population against direct propagation.
pub fn dilation(suite: &Suite) -> Result<Vec<Check>> {
    let base = PseudoHermitianParams::new(0.1, 1.0, 0.0)?;
    let times = linspace(0.0, 2.0 * base.tau(), 20);
    let conditional: Vec<f64> = linspace(-1.0, 1.0, 50)
        .into_par_iter()
        .map(|lam| {
            let p = base.with_lambda(lam);
            let rows = conditional_populations(&p, &times, suite.tol)?;
            Ok(max_of(times.iter().zip(rows).map(|(&t, c)| match c.value {
                Some(v) => (v - two_level_population(&p, t)).abs(),
                None => f64::INFINITY,
            })))
        })
        .collect::<Result<_>>()?;

    let family = DilatedFamily::new(0.1, 1.0)?;
    let psi = probe_state(0.1)?;
    let times = linspace(0.0, 3.0 * base.tau(), 13);
    let direct: Vec<f64> = linspace(-0.5, 0.5, 11)
        .into_par_iter()
        .map(|lam| {
            let us = propagate_unitary(&family, lam, &times, suite.tol)?;
            let mut worst: f64 = 0.0;
            for (&t, u) in times.iter().zip(&us) {
                let p1 = psi.evolve(u)?.probability(0);
                worst = worst.max((p1 - p1_closed(&base.with_lambda(lam), t)?).abs());
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    Ok(vec![
        Check::at_most("dilation_conditional_population", max_of(conditional), 0.0, 1e-8),
        Check::at_most("dilation_ancilla_population", max_of(direct), 0.0, 1e-10),
    ])
}

/// Sensitivity of the pseudo-Hermitian sensor never beats `1 / (2 tau)` while
/// its susceptibility peak grows at least fivefold per decade of `epsilon`.
pub fn pseudo_hermitian_bound(_suite: &Suite) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let grid = linspace(-0.5, 0.5, 501);
    let mut peaks = Vec::new();
    for eps in [0.1, 0.01, 0.001] {
        let base = PseudoHermitianParams::new(eps, 1.0, 0.0)?;
        let t = base.tau();
        let values: Vec<Sensitivity> = grid.par_iter().map(|&lam| sensitivity(&base.with_lambda(lam), t, 1)).collect::<Result<_>>()?;
        let worst = min_of(values.iter().filter(|s| s.is_defined()).map(|s| s.value()));
        checks.push(Check::at_least(format!("pseudo_hermitian_sensitivity_eps_{eps}"), worst, hermitian_bound(t, 1)?, 1e-9));
        peaks.push(max_susceptibility(eps, 1.0, -0.5, 0.5, 501)?.chi);
    }
    let growth = min_of(peaks.windows(2).map(|w| w[1] / w[0]));
    checks.push(Check::at_least("pseudo_hermitian_susceptibility_growth", growth, 5.0, 0.0));
    Ok(checks)
}

/// Response-energy variance: closed form against the delta-method composition,
/// and against Monte Carlo sampling of both projections.
pub fn response_variance_checks(suite: &Suite) -> Result<Vec<Check>> {
    let (c0, period, nu) = (1.8, 2.0, 7);
    let mut composition = Vec::with_capacity(100);
    for k in 0..100 {
        let pg = 0.05 + 0.6 * (k as f64 / 99.0);
        let pj = pg + 0.01 + 0.97 * ((k * 37 % 100) as f64 / 99.0);
        let direct = response_variance(pj, pg, c0, nu, period)?;
        let composed = response_variance_delta_method(pj, pg, c0, nu, period)?;
        composition.push((direct - composed).abs() / direct.max(1.0));
    }

    let (c0, period, nu) = (1.5, 1.3, 10_000);
    let points = [(0.6, 0.2), (0.8, 0.3), (0.5, 0.1)];
    let trials = suite.sizes.trials;
    let deviation: Vec<f64> = points
        .par_iter()
        .enumerate()
        .map(|(k, &(pj, pg))| {
            let expected = response_variance(pj, pg, c0, nu, period)?;
            let mut rng = stream(suite.seed, stream_index(6, k));
            let mut energies = Vec::with_capacity(trials);
            for _ in 0..trials {
                let sj = sample_projection_with(pj, c0, nu, &mut rng)?;
                let sg = sample_projection_with(pg, c0, nu, &mut rng)?;
                energies.push(response_energy(sj, sg, period)?);
            }
            let (_, var) = mean_and_variance(&energies);
            Ok((var - expected).abs() / expected)
        })
        .collect::<Result<_>>()?;
    Ok(vec![
        Check::at_most("response_variance_delta_method", max_of(composition), 0.0, 1e-12),
        Check::at_most("response_variance_monte_carlo", max_of(deviation), 0.0, 0.1),
    ])
}

/// Near the response-energy dip the sensitivity stays in a narrow band while
/// susceptibility and noise both grow; every scan row respects the bound.
pub fn exceptional_point(suite: &Suite) -> Result<Vec<Check>> {
    let p = default_params(suite.tol)?;
    let dip = find_dip(&p, 1.5, 3.5, 1e-13, suite.tol)?;
    let points = (0..20)
        .into_par_iter()
        .map(|k| {
            let d = 1e-2 * 10f64.powf(-4.0 * k as f64 / 19.0);
            ep_sensitivity(&p.with_omega_delta(dip - d), Some(d / 20.0), suite.tol)
        })
        .collect::<Result<Vec<_>>>()?;
    let sens: Vec<f64> = points.iter().map(|q| q.sensitivity).collect();
    let band = max_of(sens.iter().copied()) / min_of(sens.iter().copied());
    let (first, last) = (&points[0], &points[points.len() - 1]);

    let spec = ScanSpec { params: p, start: 1.5, stop: 3.5, count: 201, tol: suite.tol, relative_step: None };
    let rows = scan(&spec)?;
    let kept: Vec<_> = rows.iter().filter(|r| !r.is_excluded()).collect();
    let margin = min_of(kept.iter().map(|r| r.sensitivity - r.hermitian_bound));
    Ok(vec![
        Check::at_most("ep_sensitivity_band", band, 1.5, 0.0),
        Check::at_least("ep_susceptibility_growth", last.chi_e / first.chi_e, 10.0, 0.0),
        Check::at_least("ep_noise_growth", (last.var_e / first.var_e).sqrt(), 10.0, 0.0),
        Check::at_least("ep_scan_rows_evaluated", kept.len() as f64, 1.0, 0.0),
        Check::at_least("ep_scan_sensitivity_minus_bound", margin, 0.0, 1e-9),
    ])
}

/// Empirical projection-noise variances within five standard errors.
pub fn projection_noise(suite: &Suite) -> Result<Vec<Check>> {
    let repeats = suite.sizes.repeats;
    let mut lattice = Vec::new();
    for p in [0.05, 0.3, 0.5, 0.9] {
        for nu in [1u64, 10, 100, 1000] {
            lattice.push((p, nu));
        }
    }
    let binomial: Vec<f64> = lattice
        .par_iter()
        .enumerate()
        .map(|(k, &(p, nu))| {
            let mut rng = stream(suite.seed, stream_index(8, k));
            let samples = (0..repeats).map(|_| sample_projection_with(p, 1.0, nu, &mut rng)).collect::<Result<Vec<_>>>()?;
            let (_, var) = mean_and_variance(&samples);
            let expected = scaled_binomial_variance(p, 1.0, nu)?;
            let se = variance_standard_error(expected, scaled_binomial_fourth_moment(p, nu, 1.0), repeats);
            Ok((var - expected).abs() / se)
        })
        .collect::<Result<_>>()?;

    let probs = [0.4, 0.3, 0.2, 0.1];
    let multinomial: Vec<f64> = [10u64, 100, 1000]
        .par_iter()
        .enumerate()
        .map(|(k, &n)| {
            let mut rng = stream(suite.seed, stream_index(8, 1000 + k));
            let mut freqs = vec![Vec::with_capacity(repeats); probs.len()];
            for _ in 0..repeats {
                for (f, c) in freqs.iter_mut().zip(sample_multinomial(&probs, n, &mut rng)?) {
                    f.push(c as f64 / n as f64);
                }
            }
            let mut worst: f64 = 0.0;
            for (&p, f) in probs.iter().zip(&freqs) {
                let (_, var) = mean_and_variance(f);
                let expected = multinomial_variance(p, n)?;
                let se = variance_standard_error(expected, scaled_binomial_fourth_moment(p, n, 1.0), repeats);
                worst = worst.max((var - expected).abs() / se);
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    Ok(vec![
        Check::at_most("projection_noise_binomial_z", max_of(binomial), 5.0, 0.0),
        Check::at_most("projection_noise_multinomial_z", max_of(multinomial), 5.0, 0.0),
    ])
}

/// Violations of the operator inequalities for one random instance.
fn operator_violations(seed: u64, k: usize) -> Result<[f64; 5]> {
    let mut rng = stream(seed, stream_index(9, k));
    let dim = 1 + k % 5;
    let a = random::hermitian(&mut rng, dim, 1.0);
    let b = random::hermitian(&mut rng, dim, 1.0);
    let u = random::unitary(&mut rng, dim)?;
    let psi = random::state(&mut rng, dim);
    let (na, nb) = (seminorm(&a)?, seminorm(&b)?);

    let triangle = seminorm(&(&a + &b))? - na - nb;
    let rotated = HermitianOp::with_tolerance(a.conjugate_by(&u), 1e-11)?;
    let invariance = (seminorm(&rotated)? - na).abs();
    let (va, vb) = (variance(&a, &psi)?, variance(&b, &psi)?);
    let spread = va - na * na / 4.0;
    let schwarz = covariance(&a, &b, &psi)?.abs() - (va * vb).max(0.0).sqrt();

    let sites = 1 + k % 4;
    let h = random::hermitian(&mut rng, 2, 1.0);
    let id = ComplexMatrix::identity(2);
    let mut total = ComplexMatrix::zeros(1 << sites);
    for site in 0..sites {
        let mut term = ComplexMatrix::identity(1);
        for j in 0..sites {
            term = tensor(&term, if j == site { h.matrix() } else { &id });
        }
        total = &total + &term;
    }
    let additivity = (seminorm(&HermitianOp::new(total)?)? - sites as f64 * seminorm(&h)?).abs();
    Ok([triangle, invariance, spread, schwarz, additivity])
}

/// Seminorm and variance inequalities over seeded random instances.
pub fn operator_inequalities(suite: &Suite) -> Result<Vec<Check>> {
    let rows: Vec<[f64; 5]> =
        (0..suite.sizes.instances).into_par_iter().map(|k| operator_violations(suite.seed, k)).collect::<Result<_>>()?;
    let names = [
        "seminorm_triangle_inequality",
        "seminorm_unitary_invariance",
        "variance_below_quarter_seminorm_squared",
        "covariance_cauchy_schwarz",
        "seminorm_additivity",
    ];
    Ok(names.iter().enumerate().map(|(i, name)| Check::at_most(*name, max_of(rows.iter().map(|r| r[i])), 0.0, 1e-10)).collect())
}

/// Every group, in report order.
pub const GROUPS: [(&str, fn(&Suite) -> Result<Vec<Check>>); 9] = [
    ("qfi_closed_form", qfi_closed_form),
    ("qfi_rate", qfi_rate),
    ("channel_bound", channel_bound),
    ("dilation", dilation),
    ("pseudo_hermitian_bound", pseudo_hermitian_bound),
    ("response_variance", response_variance_checks),
    ("exceptional_point", exceptional_point),
    ("projection_noise", projection_noise),
    ("operator_inequalities", operator_inequalities),
];

pub fn run_all(suite: &Suite) -> Result<VerificationReport> {
    let mut checks = Vec::new();
    for (_, group) in GROUPS {
        checks.extend(group(suite)?);
    }
    Ok(VerificationReport { checks })
}
