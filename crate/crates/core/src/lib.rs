//! Quantum Fisher information bounds for parameter estimation under unitary
//! encoding, and two non-Hermitian sensor models checked against them.

pub mod derivative;
pub mod error;
pub mod evolution;
pub mod noise;
mod ode;
pub mod operator;
pub mod pseudo_hermitian;
pub mod pt_ep;
pub mod qfi;
pub mod quadrature;
pub mod random;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use ode::{MAX_TOL, MIN_TOL};
pub use operator::{ComplexMatrix, HermitianOp, PureState};
