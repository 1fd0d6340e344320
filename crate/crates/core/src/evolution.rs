//! Time-ordered propagation and the transformed local generator.
//!
//! [`propagate`] integrates the propagator `U(t)` together with the generator
//! `h(t) = i U^dagger dU/dlambda` in one augmented system:
//!
//! ```text
//! dU/dt = -i H(lambda, t) U,          U(0) = I
//! dh/dt = U^dagger dH/dlambda U,      h(0) = 0
//! ```
//!
//! Both blocks share every step, so `h` is never reconstructed after the fact.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::ode;
use crate::operator::{ComplexMatrix, HermitianOp};

/// Integration tolerance used when callers have no reason to pick another.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A Hamiltonian `H(lambda, t)` together with its parameter derivative.
pub trait HamiltonianFamily: Sync {
    fn dim(&self) -> usize;

    fn hamiltonian(&self, lambda: f64, t: f64) -> Result<HermitianOp>;

    fn dhamiltonian(&self, lambda: f64, t: f64) -> Result<HermitianOp>;
}

/// `H = H0 + lambda * H1`, time independent.
#[derive(Clone, Debug)]
pub struct LinearFamily {
    pub h0: HermitianOp,
    pub h1: HermitianOp,
}

impl LinearFamily {
    pub fn new(h0: HermitianOp, h1: HermitianOp) -> Result<Self> {
        if h0.dim() != h1.dim() {
            return Err(Error::DimensionMismatch { expected: h0.dim(), found: h1.dim() });
        }
        Ok(Self { h0, h1 })
    }
}

impl HamiltonianFamily for LinearFamily {
    fn dim(&self) -> usize {
        self.h0.dim()
    }

    fn hamiltonian(&self, lambda: f64, _t: f64) -> Result<HermitianOp> {
        Ok(&self.h0 + &self.h1.scale(lambda))
    }

    fn dhamiltonian(&self, _lambda: f64, _t: f64) -> Result<HermitianOp> {
        Ok(self.h1.clone())
    }
}

/// A family given by two closures returning raw matrices; each evaluation is
/// checked for Hermiticity.
pub struct FnFamily<H, D> {
    dim: usize,
    h: H,
    dh: D,
}

impl<H, D> FnFamily<H, D>
where
    H: Fn(f64, f64) -> ComplexMatrix + Sync,
    D: Fn(f64, f64) -> ComplexMatrix + Sync,
{
    pub fn new(dim: usize, h: H, dh: D) -> Self {
        Self { dim, h, dh }
    }
}

impl<H, D> HamiltonianFamily for FnFamily<H, D>
where
    H: Fn(f64, f64) -> ComplexMatrix + Sync,
    D: Fn(f64, f64) -> ComplexMatrix + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn hamiltonian(&self, lambda: f64, t: f64) -> Result<HermitianOp> {
        HermitianOp::new((self.h)(lambda, t))
    }

    fn dhamiltonian(&self, lambda: f64, t: f64) -> Result<HermitianOp> {
        HermitianOp::new((self.dh)(lambda, t))
    }
}

/// Propagators and generators sampled on a time grid at fixed `lambda`.
#[derive(Clone, Debug)]
pub struct PropagationRecord {
    pub lambda: f64,
    pub times: Vec<f64>,
    pub unitaries: Vec<ComplexMatrix>,
    pub generators: Vec<HermitianOp>,
    /// Requested per-step tolerance.
    pub tol: f64,
    /// Largest `max |U^dagger U - I|` seen on the grid.
    pub unitarity_error: f64,
}

impl PropagationRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn check_start(times: &[f64]) -> Result<()> {
    ode::check_grid(times)?;
    if times[0] != 0.0 {
        return Err(Error::InvalidGrid(format!("grid must start at 0, got {}", times[0])));
    }
    Ok(())
}

fn flatten(m: &ComplexMatrix, out: &mut [C64]) {
    out.copy_from_slice(m.as_slice());
}

fn unflatten(dim: usize, v: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |i, j| v[i * dim + j])
}

/// `out = -i * H * U` for row-major `n x n` blocks.
fn minus_i_h_times(h: &ComplexMatrix, u: &[C64], out: &mut [C64]) {
    let n = h.dim();
    let minus_i = C64::new(0.0, -1.0);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += h[(i, k)] * u[k * n + j];
            }
            out[i * n + j] = minus_i * acc;
        }
    }
}

/// Integrates `U` and `h` for `family` at `lambda`, recording both at every grid time.
pub fn propagate<F: HamiltonianFamily + ?Sized>(
    family: &F,
    lambda: f64,
    times: &[f64],
    tol: f64,
) -> Result<PropagationRecord> {
    ode::check_tolerance(tol)?;
    check_start(times)?;
    let n = family.dim();
    let nn = n * n;

    let mut y0 = vec![C64::new(0.0, 0.0); 2 * nn];
    flatten(&ComplexMatrix::identity(n), &mut y0[..nn]);

    let mut records: Vec<Option<(ComplexMatrix, ComplexMatrix)>> = vec![None; times.len()];
    ode::integrate(
        |t, y, dy| {
            let h = family.hamiltonian(lambda, t)?;
            let dh = family.dhamiltonian(lambda, t)?;
            let (u, _) = y.split_at(nn);
            let (du, dgen) = dy.split_at_mut(nn);
            minus_i_h_times(h.matrix(), u, du);
            let um = unflatten(n, u);
            let rate = dh.conjugate_by(&um);
            flatten(&rate, dgen);
            Ok(())
        },
        y0,
        times,
        tol,
        |k, y| records[k] = Some((unflatten(n, &y[..nn]), unflatten(n, &y[nn..]))),
    )?;

    let mut unitaries = Vec::with_capacity(times.len());
    let mut generators = Vec::with_capacity(times.len());
    let mut unitarity_error = 0.0_f64;
    for rec in records {
        let (u, g) = rec.expect("integrator records every grid point");
        unitarity_error = unitarity_error.max(u.unitarity_deviation());
        generators.push(HermitianOp::with_tolerance(g, 10.0 * tol)?);
        unitaries.push(u);
    }
    Ok(PropagationRecord { lambda, times: times.to_vec(), unitaries, generators, tol, unitarity_error })
}

/// Propagator `U(t)` alone on a grid starting at 0, for any (possibly
/// non-Hermitian) time-dependent generator.
pub fn propagate_matrix<G>(dim: usize, generator: G, times: &[f64], tol: f64) -> Result<Vec<ComplexMatrix>>
where
    G: Fn(f64) -> Result<ComplexMatrix>,
{
    ode::check_tolerance(tol)?;
    ode::check_grid(times)?;
    let mut y0 = vec![C64::new(0.0, 0.0); dim * dim];
    flatten(&ComplexMatrix::identity(dim), &mut y0);
    let mut out = vec![ComplexMatrix::zeros(dim); times.len()];
    ode::integrate(
        |t, y, dy| {
            let h = generator(t)?;
            if h.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: h.dim() });
            }
            minus_i_h_times(&h, y, dy);
            Ok(())
        },
        y0,
        times,
        tol,
        |k, y| out[k] = unflatten(dim, y),
    )?;
    Ok(out)
}

/// `U(lambda; 0 -> t)` on a grid starting at 0.
pub fn propagate_unitary<F: HamiltonianFamily + ?Sized>(
    family: &F,
    lambda: f64,
    times: &[f64],
    tol: f64,
) -> Result<Vec<ComplexMatrix>> {
    check_start(times)?;
    propagate_matrix(family.dim(), |t| Ok(family.hamiltonian(lambda, t)?.into_matrix()), times, tol)
}

/// Generator by direct differencing of the propagator:
/// `i U(lambda)^dagger [U(lambda + d) - U(lambda - d)] / (2d)`, Hermitized.
pub fn generator_finite_difference<F: HamiltonianFamily + ?Sized>(
    family: &F,
    lambda: f64,
    t: f64,
    dlambda: f64,
    tol: f64,
) -> Result<HermitianOp> {
    if !(dlambda > 0.0 && dlambda.is_finite()) {
        return Err(Error::Domain { what: "finite-difference step", value: dlambda });
    }
    if t == 0.0 {
        return Ok(HermitianOp::zeros(family.dim()));
    }
    let grid = [0.0, t];
    let end = |l: f64| -> Result<ComplexMatrix> { Ok(propagate_unitary(family, l, &grid, tol)?.pop().unwrap()) };
    let u = end(lambda)?;
    let up = end(lambda + dlambda)?;
    let um = end(lambda - dlambda)?;
    let du = (&up - &um).scale(C64::new(0.0, 0.5 / dlambda));
    let raw = u.adjoint().matmul(&du);
    HermitianOp::new(raw.hermitian_part())
}
