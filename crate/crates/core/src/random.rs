//! Seeded random operators, states and Hamiltonian families for property checks.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::evolution::HamiltonianFamily;
use crate::operator::{expm_hermitian, ComplexMatrix, HermitianOp, PureState};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Hermitian part of a complex Gaussian matrix, scaled by `scale`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> HermitianOp {
    let g = ComplexMatrix::from_fn(dim, |_, _| gaussian(rng));
    HermitianOp::new(g.hermitian_part().scale_real(scale)).expect("Hermitian part is Hermitian")
}

/// Normalized complex Gaussian vector (Haar-distributed pure state).
pub fn state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
    PureState::normalized(v).expect("a Gaussian vector is nonzero")
}

/// `exp(-i H)` for a random Hermitian `H` of unit scale.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<ComplexMatrix> {
    expm_hermitian(&hermitian(rng, dim, 2.0), 1.0)
}

/// `H(lambda, t) = A + cos(w t) B + lambda (C + sin(v t) D)` with random
/// Hermitian `A, B, C, D` and frequencies in `[0.5, 2]`.
#[derive(Clone, Debug)]
pub struct RandomFamily {
    pub a: HermitianOp,
    pub b: HermitianOp,
    pub c: HermitianOp,
    pub d: HermitianOp,
    pub w: f64,
    pub v: f64,
}

impl RandomFamily {
    pub fn new<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Self {
        Self {
            a: hermitian(rng, dim, 1.0),
            b: hermitian(rng, dim, 0.5),
            c: hermitian(rng, dim, 1.0),
            d: hermitian(rng, dim, 0.5),
            w: rng.random_range(0.5..2.0),
            v: rng.random_range(0.5..2.0),
        }
    }
}

impl HamiltonianFamily for RandomFamily {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn hamiltonian(&self, lambda: f64, t: f64) -> Result<HermitianOp> {
        let drive = &self.a + &self.b.scale((self.w * t).cos());
        Ok(&drive + &self.dhamiltonian(lambda, t)?.scale(lambda))
    }

    fn dhamiltonian(&self, _lambda: f64, t: f64) -> Result<HermitianOp> {
        Ok(&self.c + &self.d.scale((self.v * t).sin()))
    }
}
