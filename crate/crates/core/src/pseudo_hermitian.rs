//! Pseudo-Hermitian sensor simulated by a two-qubit dilation.
//!
//! The non-Hermitian qubit is embedded in an ancilla-plus-system Hamiltonian
//!
//! ```text
//! H_tot = (b + lambda) I (x) sigma_x - c sigma_y (x) sigma_y
//! b = 4 w eps (1 + eps) / (1 + 2 eps),   c = 2 w sqrt(eps (1 + eps)) / (1 + 2 eps)
//! ```
//!
//! with the ancilla as the first tensor factor (basis index `2 a + s`).
//! Post-selecting the ancilla on `|0>` gives the normalized system population
//! `S`, whose susceptibility grows without bound as `eps -> 0`. The
//! unconditioned probability `P1 = |<0_a 0_s|psi(t)>|^2` carries the
//! projection noise, and the resulting sensitivity never beats the Hermitian
//! bound `1 / (2 sqrt(nu) t)`.
//!
//! The evolution time is always `tau = pi / (4 w sqrt(eps (1 + eps)))`, the
//! first dip of `S` at `lambda = 0`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::derivative::richardson;
use crate::error::{Error, Result};
use crate::evolution::{propagate, propagate_unitary, HamiltonianFamily};
use crate::noise::binomial_variance;
use crate::operator::{pauli, tensor, HermitianOp, PureState};
use crate::qfi::qfi_pure;

/// Conditioning probabilities below this leave the post-selected population undefined.
pub const SUCCESS_FLOOR: f64 = 1e-14;

/// Shot-noise amplitudes `sqrt(P1 (1 - P1))` below this mark a `0/0` dip point.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Slopes below this make the sensitivity infinite.
pub const SLOPE_FLOOR: f64 = 1e-12;

/// Relative step for parameter derivatives of the closed forms.
pub const DERIVATIVE_STEP: f64 = 1e-5;

/// Largest population change tolerated between neighbouring points of the
/// refined susceptibility search.
const PEAK_REFINE_DS: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PseudoHermitianParams {
    pub epsilon: f64,
    pub omega: f64,
    pub lam: f64,
}

impl PseudoHermitianParams {
    pub fn new(epsilon: f64, omega: f64, lam: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Domain { what: "dilation parameter epsilon", value: epsilon });
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Domain { what: "qubit frequency omega", value: omega });
        }
        if !lam.is_finite() {
            return Err(Error::Domain { what: "lambda", value: lam });
        }
        Ok(Self { epsilon, omega, lam })
    }

    pub fn with_lambda(self, lam: f64) -> Self {
        Self { lam, ..self }
    }

    pub fn b(&self) -> f64 {
        let e = self.epsilon;
        4.0 * self.omega * e * (1.0 + e) / (1.0 + 2.0 * e)
    }

    pub fn c(&self) -> f64 {
        let e = self.epsilon;
        2.0 * self.omega * (e * (1.0 + e)).sqrt() / (1.0 + 2.0 * e)
    }

    /// `Omega = sqrt((b + lambda)^2 + c^2)`, the block frequency at this lambda.
    pub fn big_omega(&self) -> f64 {
        (self.b() + self.lam).hypot(self.c())
    }

    /// Evolution time at which `S(lambda = 0)` first vanishes.
    pub fn tau(&self) -> f64 {
        tau(self.epsilon, self.omega)
    }
}

/// `pi / (4 w sqrt(eps (1 + eps)))`.
pub fn tau(epsilon: f64, omega: f64) -> f64 {
    PI / (4.0 * omega * (epsilon * (1.0 + epsilon)).sqrt())
}

/// `H_tot` as a family in `lambda`; `dH/dlambda = I (x) sigma_x`.
#[derive(Clone, Copy, Debug)]
pub struct DilatedFamily {
    pub epsilon: f64,
    pub omega: f64,
}

impl DilatedFamily {
    pub fn new(epsilon: f64, omega: f64) -> Result<Self> {
        PseudoHermitianParams::new(epsilon, omega, 0.0)?;
        Ok(Self { epsilon, omega })
    }
}

impl HamiltonianFamily for DilatedFamily {
    fn dim(&self) -> usize {
        4
    }

    fn hamiltonian(&self, lambda: f64, _t: f64) -> Result<HermitianOp> {
        dilated_hamiltonian(&PseudoHermitianParams::new(self.epsilon, self.omega, lambda)?)
    }

    fn dhamiltonian(&self, _lambda: f64, _t: f64) -> Result<HermitianOp> {
        HermitianOp::new(tensor(&pauli::identity(), &pauli::x()))
    }
}

pub fn dilated_hamiltonian(p: &PseudoHermitianParams) -> Result<HermitianOp> {
    let drive = tensor(&pauli::identity(), &pauli::x()).scale_real(p.b() + p.lam);
    let coupling = tensor(&pauli::y(), &pauli::y()).scale_real(p.c());
    HermitianOp::new(&drive - &coupling)
}

/// `(sqrt((1+eps)/(1+2eps)) |0>_a + sqrt(eps/(1+2eps)) |1>_a) (x) |0>_s`.
pub fn probe_state(epsilon: f64) -> Result<PureState> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain { what: "dilation parameter epsilon", value: epsilon });
    }
    let norm = 1.0 + 2.0 * epsilon;
    let a0 = ((1.0 + epsilon) / norm).sqrt();
    let a1 = (epsilon / norm).sqrt();
    PureState::from_real(&[a0, 0.0, a1, 0.0])
}

/// Normalized system population `S = 1 / (1 + d^2 tan^2(E t))` with
/// `E = Omega` and `d = (lambda + 2 eps w) / E`, written as
/// `cos^2 / (cos^2 + d^2 sin^2)` so the tangent poles give the limit `S = 0`.
pub fn two_level_population(p: &PseudoHermitianParams, t: f64) -> f64 {
    let e = p.big_omega();
    let d = (p.lam + 2.0 * p.epsilon * p.omega) / e;
    if d == 0.0 {
        return 1.0;
    }
    let (s, c) = (e * t).sin_cos();
    let c2 = c * c;
    c2 / (c2 + d * d * s * s)
}

/// Post-selected population from the dilated evolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalPopulation {
    /// `P(0_a 0_s) / P(0_a)`, `None` when `P(0_a)` is below [`SUCCESS_FLOOR`].
    pub value: Option<f64>,
    /// Post-selection success probability `P(0_a)`.
    pub success_probability: f64,
    /// Unconditioned `P(0_a 0_s)`.
    pub p00: f64,
}

fn conditional_from_state(psi: &PureState) -> ConditionalPopulation {
    let p00 = psi.probability(0);
    let success = p00 + psi.probability(1);
    let value = (success >= SUCCESS_FLOOR).then(|| p00 / success);
    ConditionalPopulation { value, success_probability: success, p00 }
}

/// Evolves the probe under `H_tot` and conditions on the ancilla in `|0>`.
pub fn conditional_population_from_dilation(p: &PseudoHermitianParams, t: f64, tol: f64) -> Result<ConditionalPopulation> {
    if t == 0.0 {
        return Ok(conditional_from_state(&probe_state(p.epsilon)?));
    }
    Ok(conditional_populations(p, &[0.0, t], tol)?.pop().unwrap())
}

/// [`conditional_population_from_dilation`] along a time grid starting at 0.
pub fn conditional_populations(p: &PseudoHermitianParams, times: &[f64], tol: f64) -> Result<Vec<ConditionalPopulation>> {
    let family = DilatedFamily::new(p.epsilon, p.omega)?;
    let psi0 = probe_state(p.epsilon)?;
    propagate_unitary(&family, p.lam, times, tol)?
        .iter()
        .map(|u| Ok(conditional_from_state(&psi0.evolve(u)?)))
        .collect()
}

/// `P1 = (1+eps)/(1+2eps) cos^2(t sqrt(lambda^2 + 8 eps(1+eps) lambda w/(1+2eps) + 4 eps(1+eps) w^2))`.
pub fn p1_closed(p: &PseudoHermitianParams, t: f64) -> Result<f64> {
    let (e, w, l) = (p.epsilon, p.omega, p.lam);
    let radicand = l * l + 8.0 * e * (1.0 + e) * l * w / (1.0 + 2.0 * e) + 4.0 * e * (1.0 + e) * w * w;
    if radicand < 0.0 {
        return Err(Error::Domain { what: "P1 radicand (lambda outside the real-frequency range)", value: l });
    }
    Ok((1.0 + e) / (1.0 + 2.0 * e) * (t * radicand.sqrt()).cos().powi(2))
}

fn derivative_step(lam: f64) -> f64 {
    DERIVATIVE_STEP * lam.abs().max(1.0)
}

/// `dS/dlambda` at fixed `t`.
pub fn susceptibility(p: &PseudoHermitianParams, t: f64) -> Result<f64> {
    richardson(|l| Ok(two_level_population(&p.with_lambda(l), t)), p.lam, derivative_step(p.lam))
}

/// `dP1/dlambda` at fixed `t`.
pub fn p1_slope(p: &PseudoHermitianParams, t: f64) -> Result<f64> {
    richardson(|l| p1_closed(&p.with_lambda(l), t), p.lam, derivative_step(p.lam))
}

/// Location and size of the largest `|dS/dlambda|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SusceptibilityPeak {
    pub lam: f64,
    pub chi: f64,
}

/// Largest `|dS/dlambda|` at `t = tau` over `[lo, hi]`.
///
/// The dips of `S` narrow as `eps` shrinks and fall between the points of any
/// fixed grid, so the `count`-point grid is first bisected until neighbouring
/// populations differ by at most 0.01, and the best point is then polished by
/// golden-section search between its neighbours.
pub fn max_susceptibility(epsilon: f64, omega: f64, lo: f64, hi: f64, count: usize) -> Result<SusceptibilityPeak> {
    if count < 2 || !(lo < hi) {
        return Err(Error::InvalidGrid(format!("need count >= 2 and lo < hi, got {count} points on [{lo}, {hi}]")));
    }
    let base = PseudoHermitianParams::new(epsilon, omega, lo)?;
    let t = base.tau();
    let s = |l: f64| two_level_population(&base.with_lambda(l), t);
    let chi = |l: f64| -> Result<f64> { Ok(susceptibility(&base.with_lambda(l), t)?.abs()) };

    let grid = linspace(lo, hi, count);
    let mut points = vec![grid[0]];
    for w in grid.windows(2) {
        refine_interval(&s, w[0], w[1], s(w[0]), s(w[1]), &mut points, 40);
    }

    let chis = points.par_iter().map(|&l| chi(l)).collect::<Result<Vec<_>>>()?;
    let best = (0..points.len()).fold(0, |b, i| if chis[i] > chis[b] { i } else { b });
    let a = points[best.saturating_sub(1)];
    let b = points[(best + 1).min(points.len() - 1)];
    let (lam, value) = golden_max(&chi, a, b)?;
    if value > chis[best] {
        Ok(SusceptibilityPeak { lam, chi: value })
    } else {
        Ok(SusceptibilityPeak { lam: points[best], chi: chis[best] })
    }
}

fn refine_interval(s: &impl Fn(f64) -> f64, a: f64, b: f64, sa: f64, sb: f64, out: &mut Vec<f64>, depth: u32) {
    if depth > 0 && (sa - sb).abs() > PEAK_REFINE_DS {
        let m = 0.5 * (a + b);
        let sm = s(m);
        refine_interval(s, a, m, sa, sm, out, depth - 1);
        refine_interval(s, m, b, sm, sb, out, depth - 1);
    } else {
        out.push(b);
    }
}

fn golden_max(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if (b - a) <= 1e-12 * a.abs().max(b.abs()).max(1.0) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 > f2 { (x1, f1) } else { (x2, f2) })
}

/// Sensitivity `sqrt(Var[P1]) / |dP1/dlambda|` or why it has no finite value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sensitivity {
    Finite(f64),
    /// Nonzero shot noise over a vanishing slope.
    Divergent,
    /// Shot noise and slope vanish together (exact dip point).
    Undefined,
}

impl Sensitivity {
    /// The value as a float: `inf` when divergent, `NaN` when undefined.
    pub fn value(&self) -> f64 {
        match *self {
            Sensitivity::Finite(v) => v,
            Sensitivity::Divergent => f64::INFINITY,
            Sensitivity::Undefined => f64::NAN,
        }
    }

    pub fn is_defined(&self) -> bool {
        !matches!(self, Sensitivity::Undefined)
    }
}

/// Error-propagated sensitivity of a `P1` measurement repeated `nu` times.
pub fn sensitivity(p: &PseudoHermitianParams, t: f64, nu: u64) -> Result<Sensitivity> {
    let p1 = p1_closed(p, t)?;
    let var = binomial_variance(p1, nu)?;
    if (p1 * (1.0 - p1)).max(0.0).sqrt() < NOISE_FLOOR {
        return Ok(Sensitivity::Undefined);
    }
    let slope = p1_slope(p, t)?;
    if slope.abs() < SLOPE_FLOOR {
        return Ok(Sensitivity::Divergent);
    }
    Ok(Sensitivity::Finite(var.sqrt() / slope.abs()))
}

/// `F = 4 (b+lambda)^2 t^2 / Omega^2 + 4 c^2 sin^2(Omega t) / Omega^4`.
pub fn qfi_closed(p: &PseudoHermitianParams, t: f64) -> f64 {
    let om = p.big_omega();
    let a = p.b() + p.lam;
    let c = p.c();
    4.0 * a * a * t * t / (om * om) + 4.0 * c * c * (om * t).sin().powi(2) / om.powi(4)
}

/// `d sqrt(F) / dt = 2 (cos^2 th + sin^2 th sinc(2 Omega t)) / sqrt(cos^2 th + sin^2 th sinc^2(Omega t))`
/// with `cos th = (b + lambda) / Omega`, `sin th = c / Omega`.
pub fn qfi_rate_closed(p: &PseudoHermitianParams, t: f64) -> f64 {
    let om = p.big_omega();
    let cos2 = ((p.b() + p.lam) / om).powi(2);
    let sin2 = (p.c() / om).powi(2);
    let x = om * t;
    2.0 * (cos2 + sin2 * sinc(2.0 * x)) / (cos2 + sin2 * sinc(x).powi(2)).sqrt()
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Transformed local generator in closed form:
/// `|+y><+y| (x) (hx X + hy Y + hz Z) + |-y><-y| (x) (hx X - hy Y - hz Z)`.
pub fn generator_closed(p: &PseudoHermitianParams, t: f64) -> Result<HermitianOp> {
    let om = p.big_omega();
    let a = p.b() + p.lam;
    let c = p.c();
    let s2 = (2.0 * om * t).sin();
    let hx = t * a * a / (om * om) + c * c * s2 / (2.0 * om.powi(3));
    let hy = c * a / (om * om) * (s2 / (2.0 * om) - t);
    let hz = -c * (om * t).sin().powi(2) / (om * om);
    let half = C64::new(0.5, 0.0);
    let up = (&pauli::identity() + &pauli::y()).scale(half);
    let down = (&pauli::identity() - &pauli::y()).scale(half);
    let x = pauli::x().scale_real(hx);
    let yz = &pauli::y().scale_real(hy) + &pauli::z().scale_real(hz);
    let block_up = &x + &yz;
    let block_down = &x - &yz;
    HermitianOp::new(&tensor(&up, &block_up) + &tensor(&down, &block_down))
}

/// `1 / (2 sqrt(nu) t)`: the bound for encoding through `I (x) sigma_x`.
pub fn hermitian_bound(t: f64, nu: u64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain { what: "evolution time", value: t });
    }
    if nu == 0 {
        return Err(Error::Domain { what: "trial count", value: 0.0 });
    }
    Ok(1.0 / (2.0 * (nu as f64).sqrt() * t))
}

/// Numerical QFI at `t` from the integrated generator.
pub fn qfi_numeric(p: &PseudoHermitianParams, t: f64, tol: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let family = DilatedFamily::new(p.epsilon, p.omega)?;
    let record = propagate(&family, p.lam, &[0.0, t], tol)?;
    qfi_pure(&record.generators[1], &probe_state(p.epsilon)?)
}

/// One row of a lambda sweep at `t = tau`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub lam: f64,
    pub s: f64,
    pub chi: f64,
    pub p1: f64,
    pub dp1_dlam: f64,
    pub sensitivity: Sensitivity,
    pub qfi_closed: f64,
    pub qfi_numeric: f64,
    pub rate_closed: f64,
    pub hermitian_bound: f64,
    /// Why some fields are `NaN`, if they are.
    pub flag: Option<String>,
}

impl SweepRow {
    pub const COLUMNS: [&'static str; 10] =
        ["lam", "S", "chi", "P1", "dP1_dlam", "sensitivity", "qfi_closed", "qfi_numeric", "rate_closed", "hermitian_bound"];

    /// Values in [`Self::COLUMNS`] order.
    pub fn values(&self) -> [f64; 10] {
        [
            self.lam,
            self.s,
            self.chi,
            self.p1,
            self.dp1_dlam,
            self.sensitivity.value(),
            self.qfi_closed,
            self.qfi_numeric,
            self.rate_closed,
            self.hermitian_bound,
        ]
    }
}

/// Inputs of a lambda sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSpec {
    pub epsilon: f64,
    pub omega: f64,
    pub nu: u64,
    pub lam_start: f64,
    pub lam_stop: f64,
    pub count: usize,
    pub tol: f64,
}

impl SweepSpec {
    pub fn grid(&self) -> Vec<f64> {
        linspace(self.lam_start, self.lam_stop, self.count)
    }
}

/// Evaluates every lambda of the sweep at `t = tau`. Rows are computed in
/// parallel and returned in grid order; per-row domain failures are flagged
/// in the row rather than aborting the sweep.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.count < 1 {
        return Err(Error::InvalidGrid("empty lambda grid".into()));
    }
    let base = PseudoHermitianParams::new(spec.epsilon, spec.omega, 0.0)?;
    let t = base.tau();
    let bound = hermitian_bound(t, spec.nu)?;
    crate::ode::check_tolerance(spec.tol)?;
    Ok(spec.grid().into_par_iter().map(|lam| sweep_row(&base.with_lambda(lam), t, spec, bound)).collect())
}

fn sweep_row(p: &PseudoHermitianParams, t: f64, spec: &SweepSpec, bound: f64) -> SweepRow {
    let mut flags = Vec::new();
    let mut take = |r: Result<f64>| r.unwrap_or_else(|e| {
        flags.push(e.to_string());
        f64::NAN
    });
    let s = two_level_population(p, t);
    let chi = take(susceptibility(p, t));
    let p1 = take(p1_closed(p, t));
    let dp1 = take(p1_slope(p, t));
    let qfi_numeric = take(qfi_numeric(p, t, spec.tol));
    let sensitivity = match sensitivity(p, t, spec.nu) {
        Ok(v) => v,
        Err(e) => {
            flags.push(e.to_string());
            Sensitivity::Undefined
        }
    };
    if sensitivity == Sensitivity::Undefined && flags.is_empty() {
        flags.push("sensitivity undefined: shot noise and slope vanish together".into());
    }
    flags.dedup();
    SweepRow {
        lam: p.lam,
        s,
        chi,
        p1,
        dp1_dlam: dp1,
        sensitivity,
        qfi_closed: qfi_closed(p, t),
        qfi_numeric,
        rate_closed: qfi_rate_closed(p, t),
        hermitian_bound: bound,
        flag: (!flags.is_empty()).then(|| flags.join("; ")),
    }
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count).map(|k| if k + 1 == count { hi } else { lo + step * k as f64 }).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::eig_hermitian;

    fn params(lam: f64) -> PseudoHermitianParams {
        PseudoHermitianParams::new(0.1, 1.0, lam).unwrap()
    }

    #[test]
    fn coefficients_and_tau() {
        let p = params(0.0);
        assert!((p.b() - 0.366_666_666_666_666_7).abs() < 1e-15);
        assert!((p.c() - 0.552_770_798_392_566_8).abs() < 1e-15);
        assert!((p.big_omega() - 0.663_324_958_071_079_9).abs() < 1e-15);
        assert!((p.tau() - 2.368_064_562_748_707).abs() < 1e-12);
        assert!((p.big_omega() * p.tau() - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn spectrum_and_symmetry() {
        let h = dilated_hamiltonian(&params(0.0)).unwrap();
        let eig = eig_hermitian(&h).unwrap();
        let om = 0.663_324_958_071_079_9;
        for (v, e) in eig.values.iter().zip([-om, -om, om, om]) {
            assert!((v - e).abs() < 1e-12);
        }
        let sy = tensor(&pauli::y(), &pauli::identity());
        assert!(h.matrix().commutator(&sy).max_abs() <= 1e-14);
    }

    #[test]
    fn probe_amplitudes() {
        let psi = probe_state(0.1).unwrap();
        let a = psi.amplitudes();
        assert!((a[0].re - 0.957_427_107_756_338).abs() < 1e-12);
        assert!((a[2].re - 0.288_675_134_594_813).abs() < 1e-12);
        assert_eq!(a[1], C64::new(0.0, 0.0));
        let tiny = probe_state(1e-12).unwrap();
        assert!((tiny.probability(0) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn population_examples() {
        let p = params(0.0);
        assert_eq!(two_level_population(&p, 0.0), 1.0);
        assert!(two_level_population(&p, p.tau()) < 1e-30);
        let still = params(-0.2);
        for t in [0.0, 0.7, 3.1, 10.0] {
            assert_eq!(two_level_population(&still, t), 1.0);
        }
    }

    #[test]
    fn p1_examples() {
        let p = params(0.0);
        assert!((p1_closed(&p, 0.0).unwrap() - 1.1 / 1.2).abs() < 1e-15);
        assert!(p1_closed(&p, p.tau()).unwrap() < 1e-30);
        for k in 0..=40 {
            let l = -1.0 + 0.05 * k as f64;
            let q = params(l);
            let e = q.epsilon;
            let radicand = l * l + 8.0 * e * (1.0 + e) * l / (1.0 + 2.0 * e) + 4.0 * e * (1.0 + e);
            assert!((radicand - q.big_omega().powi(2)).abs() < 1e-12);
        }
        let small = PseudoHermitianParams::new(0.5, 1.0, -10.0).unwrap();
        assert!(p1_closed(&small, 1.0).is_ok());
    }

    #[test]
    fn susceptibility_matches_hand_derivative() {
        let p = params(0.05);
        let t = p.tau();
        let (e, w, l) = (p.epsilon, p.omega, p.lam);
        let big_e = p.big_omega();
        let d = (l + 2.0 * e * w) / big_e;
        let x = big_e * t;
        let g = d * d * x.tan().powi(2);
        let de = (p.b() + l) / big_e;
        let dd = 1.0 / big_e - (l + 2.0 * e * w) * (p.b() + l) / big_e.powi(3);
        let dg = 2.0 * d * dd * x.tan().powi(2) + 2.0 * d * d * x.tan() / x.cos().powi(2) * t * de;
        let exact = -dg / (1.0 + g).powi(2);
        let chi = susceptibility(&p, t).unwrap();
        assert!((chi - exact).abs() < 1e-7, "{chi} vs {exact}");
    }

    #[test]
    fn sensitivity_cases() {
        let p = params(0.0);
        assert_eq!(sensitivity(&p, p.tau(), 1).unwrap(), Sensitivity::Undefined);
        let q = params(0.1);
        match sensitivity(&q, q.tau(), 1).unwrap() {
            Sensitivity::Finite(v) => assert!(v >= hermitian_bound(q.tau(), 1).unwrap()),
            other => panic!("{other:?}"),
        }
        let four = sensitivity(&q, q.tau(), 4).unwrap().value();
        let one = sensitivity(&q, q.tau(), 1).unwrap().value();
        assert!((four - 0.5 * one).abs() < 1e-14);
    }

    #[test]
    fn qfi_closed_examples() {
        let p = params(0.0);
        assert_eq!(qfi_closed(&p, 0.0), 0.0);
        assert!((qfi_closed(&p, p.tau()) - 13.167_023_258).abs() < 1e-8);
        assert!((qfi_rate_closed(&p, 0.0) - 2.0).abs() < 1e-15);
        for k in 0..200 {
            let t = 0.05 * k as f64;
            assert!(qfi_rate_closed(&p, t).abs() <= 2.0 + 1e-12);
            assert!(qfi_closed(&p, t).sqrt() <= 2.0 * t + 1e-12);
        }
    }

    #[test]
    fn hermitian_bound_examples() {
        assert_eq!(hermitian_bound(1.0, 1).unwrap(), 0.5);
        let t = params(0.0).tau();
        assert!((hermitian_bound(t, 1).unwrap() - 0.211_142_891_9).abs() < 1e-10);
        assert!((hermitian_bound(t, 4).unwrap() - 0.5 * hermitian_bound(t, 1).unwrap()).abs() < 1e-16);
        assert!(hermitian_bound(0.0, 1).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(-0.5, 0.5, 201);
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], -0.5);
        assert_eq!(g[200], 0.5);
        assert!((g[100]).abs() < 1e-16);
    }
}
