//! Dense complex linear algebra for small operators.
//!
//! Everything here is sized for qubit-scale problems (dimension up to about
//! 16): matrices are stored row-major in a flat `Vec`, and the Hermitian
//! eigensolver is a cyclic complex Jacobi iteration.
//!
//! Eigenvectors inside a degenerate eigenvalue cluster are returned in
//! whatever basis the rotations converge to. Nothing downstream depends on
//! that choice: seminorms, exponentials and expectation values are all
//! basis-independent.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Absolute tolerance on `max |A - A^dagger|` for an operator to count as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Allowed deviation of a state's Euclidean norm from one.
pub const NORMALIZATION_TOL: f64 = 1e-12;

const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting non-square or
    /// non-finite input.
    pub fn from_rows(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::NotSquare { dim, rows: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(dim: usize, data: &[f64]) -> Result<Self> {
        Self::from_rows(dim, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn diagonal(values: &[C64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { C64::new(0.0, 0.0) })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * factor).collect() }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * factor).collect() }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        Self { dim: n, data: out }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "apply dimension mismatch");
        let n = self.dim;
        (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = C64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
                .unwrap();
            if a[pivot * n + col].norm() == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let factor = a[r * n + col] / p;
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= factor * v;
                }
            }
        }
        det
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |A - A^dagger|` over all entries.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `max |U^dagger U - I|` over all entries.
    pub fn unitarity_deviation(&self) -> f64 {
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.dim))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// Returns `(A + A^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let q = other.dim;
        Self::from_fn(self.dim * q, |r, c| self[(r / q, c / q)] * other[(r % q, c % q)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product of two square matrices.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Pauli matrices and identity in the computational basis `|0>, |1>`.
pub mod pauli {
    use super::{ComplexMatrix, C64};

    const O: C64 = C64::new(0.0, 0.0);
    const ONE: C64 = C64::new(1.0, 0.0);
    const I: C64 = C64::new(0.0, 1.0);

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_rows(2, vec![O, ONE, ONE, O]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(2, vec![O, -I, I, O]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_rows(2, vec![ONE, O, O, -ONE]).unwrap()
    }
}

/// Normalized pure state `|psi>`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized to within [`NORMALIZATION_TOL`].
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NotNormalized { norm: n });
        }
        Self::new(amplitudes.into_iter().map(|z| z / n).collect())
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|k>`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[k] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// Applies `op` and renormalizes away integration drift; fails on mismatched
    /// dimensions or a vanishing result.
    pub fn evolve(&self, op: &ComplexMatrix) -> Result<PureState> {
        check_dim(op.dim(), self.dim())?;
        PureState::normalized(op.apply(&self.amplitudes))
    }

    /// Population of basis state `k`.
    pub fn probability(&self, k: usize) -> f64 {
        self.amplitudes[k].norm_sqr()
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A matrix that has passed a Hermiticity check.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOp(ComplexMatrix);

impl HermitianOp {
    /// Accepts `matrix` if it is Hermitian to within [`HERMITICITY_TOL`].
    /// Nearly-Hermitian input is rejected, never symmetrized.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, HERMITICITY_TOL)
    }

    /// Like [`HermitianOp::new`] with a caller-supplied tolerance, for operators
    /// produced by an integrator whose error budget is known.
    pub fn with_tolerance(matrix: ComplexMatrix, tolerance: f64) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::NonFinite("operator entries"));
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > tolerance {
            return Err(Error::NotHermitian { deviation, tolerance });
        }
        Ok(Self(matrix))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// `U^dagger A U` for unitary `U`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> ComplexMatrix {
        u.adjoint().matmul(&self.0).matmul(u)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.scale_real(factor))
    }
}

impl Add for &HermitianOp {
    type Output = HermitianOp;

    fn add(self, rhs: &HermitianOp) -> HermitianOp {
        HermitianOp(&self.0 + &rhs.0)
    }
}

impl Sub for &HermitianOp {
    type Output = HermitianOp;

    fn sub(self, rhs: &HermitianOp) -> HermitianOp {
        HermitianOp(&self.0 - &rhs.0)
    }
}

/// Eigenvalues in ascending order, with the matching eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Sweeps stop once the off-diagonal Frobenius norm drops below
/// `1e-13 * max(1, ||H||_F)`; more than 100 sweeps is reported as
/// non-convergence.
pub fn eig_hermitian(h: &HermitianOp) -> Result<EigenDecomposition> {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_TOL * a.frobenius_norm().max(1.0);

    let off_diagonal = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_diagonal(&a);
        if off < threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNotConverged { sweeps, residual: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(EigenDecomposition { values, vectors })
}

/// One Jacobi rotation annihilating `a[p, q]`.
///
/// The rotation is `G = diag(1, e^{-i phi}) R(theta)` on the `(p, q)` plane,
/// where the phase makes the pivot real and `R` is the real symmetric Jacobi
/// rotation.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase_conj = (apq / r).conj();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = 0.5 * (2.0 * r).atan2(app - aqq);
    let (s, c) = theta.sin_cos();
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(-s, 0.0);
    let g_qp = phase_conj * s;
    let g_qq = phase_conj * c;
    let n = a.dim();

    // A <- A G and V <- V G touch columns p and q.
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
    // A <- G^dagger A touches rows p and q.
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
}

/// Spectral width: largest minus smallest eigenvalue.
pub fn seminorm(h: &HermitianOp) -> Result<f64> {
    let eig = eig_hermitian(h)?;
    Ok(eig.values[eig.values.len() - 1] - eig.values[0])
}

/// `exp(-i H t)` via the eigendecomposition of `H`.
pub fn expm_hermitian(h: &HermitianOp, t: f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(h)?;
    let phases: Vec<C64> = eig.values.iter().map(|&e| C64::from_polar(1.0, -e * t)).collect();
    let v = &eig.vectors;
    Ok(v.matmul(&ComplexMatrix::diagonal(&phases)).matmul(&v.adjoint()))
}

/// `<psi|A|psi>`.
pub fn expectation(op: &HermitianOp, psi: &PureState) -> Result<f64> {
    check_dim(op.dim(), psi.dim())?;
    let a_psi = op.matrix().apply(psi.amplitudes());
    Ok(inner(psi.amplitudes(), &a_psi).re)
}

/// `Var[A] = <psi|A^2|psi> - <psi|A|psi>^2`, evaluated as `||(A - <A>) psi||^2`.
pub fn variance(op: &HermitianOp, psi: &PureState) -> Result<f64> {
    covariance(op, op, psi)
}

/// Symmetrized covariance `(1/2)<AB + BA> - <A><B>`.
pub fn covariance(a: &HermitianOp, b: &HermitianOp, psi: &PureState) -> Result<f64> {
    let da = centered(a, psi)?;
    let db = centered(b, psi)?;
    Ok(inner(&da, &db).re)
}

/// `(A - <A>) |psi>`.
fn centered(op: &HermitianOp, psi: &PureState) -> Result<Vec<C64>> {
    check_dim(op.dim(), psi.dim())?;
    let a_psi = op.matrix().apply(psi.amplitudes());
    let mean = inner(psi.amplitudes(), &a_psi).re;
    Ok(a_psi.iter().zip(psi.amplitudes()).map(|(x, p)| x - p * mean).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn herm(m: ComplexMatrix) -> HermitianOp {
        HermitianOp::new(m).unwrap()
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = tensor(&pauli::identity(), &pauli::identity());
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn double_bit_flip() {
        let xx = tensor(&pauli::x(), &pauli::x());
        let out = xx.apply(PureState::basis(4, 0).amplitudes());
        assert_eq!(out, PureState::basis(4, 3).amplitudes());
    }

    #[test]
    fn tensor_matches_index_formula() {
        let a = ComplexMatrix::from_rows(2, vec![c(0.3, -1.2), c(2.0, 0.5), c(-0.7, 0.1), c(1.1, 1.9)]).unwrap();
        let b = ComplexMatrix::from_rows(2, vec![c(-0.4, 0.8), c(0.0, -2.2), c(1.5, 0.3), c(0.9, -0.6)]).unwrap();
        let k = tensor(&a, &b);
        let q = 2;
        for i in 0..2 {
            for j in 0..2 {
                for kk in 0..2 {
                    for l in 0..2 {
                        assert!((k[(i * q + kk, j * q + l)] - a[(i, j)] * b[(kk, l)]).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn from_rows_rejects_bad_shapes() {
        assert!(matches!(
            ComplexMatrix::from_real_rows(2, &[1.0, 2.0, 3.0]),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            ComplexMatrix::from_real_rows(1, &[f64::NAN]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn pauli_spectra() {
        let ez = eig_hermitian(&herm(pauli::z())).unwrap();
        assert!((ez.values[0] + 1.0).abs() < 1e-15 && (ez.values[1] - 1.0).abs() < 1e-15);

        let ex = eig_hermitian(&herm(pauli::x())).unwrap();
        assert!((ex.values[0] + 1.0).abs() < 1e-14 && (ex.values[1] - 1.0).abs() < 1e-14);
        // (|0> - |1>)/sqrt2 and (|0> + |1>)/sqrt2 up to phase.
        let minus = [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)];
        let plus = [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)];
        let col = |k: usize| [ex.vectors[(0, k)], ex.vectors[(1, k)]];
        assert!((inner(&minus, &col(0)).norm() - 1.0).abs() < 1e-14);
        assert!((inner(&plus, &col(1)).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigendecomposition_reconstructs() {
        let m = ComplexMatrix::from_rows(
            3,
            vec![c(2.0, 0.0), c(0.5, -1.0), c(0.0, 0.3), c(0.5, 1.0), c(-1.0, 0.0), c(0.7, 0.0), c(0.0, -0.3), c(0.7, 0.0), c(0.4, 0.0)],
        )
        .unwrap();
        let eig = eig_hermitian(&herm(m.clone())).unwrap();
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        assert!(eig.vectors.unitarity_deviation() < 1e-12);
        let lam = ComplexMatrix::diagonal(&eig.values.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
        let back = eig.vectors.matmul(&lam).matmul(&eig.vectors.adjoint());
        assert!(back.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn seminorm_examples() {
        assert!((seminorm(&herm(pauli::x())).unwrap() - 2.0).abs() < 1e-14);
        assert!(seminorm(&HermitianOp::identity(3)).unwrap().abs() < 1e-15);
        let i_minus_z = &pauli::identity() - &pauli::z();
        assert!((seminorm(&herm(i_minus_z)).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_is_rejected_not_symmetrized() {
        let mut m = pauli::x();
        m[(0, 1)] = c(1.0 + 1e-9, 0.0);
        assert!(matches!(HermitianOp::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn expm_examples() {
        let u = expm_hermitian(&herm(pauli::z()), PI).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2).scale_real(-1.0)) < 1e-14);
        let h = herm(pauli::y());
        assert!(expm_hermitian(&h, 0.0).unwrap().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn expm_matches_rabi_formula() {
        // H1 = (b + lam) sx - c sy with the dilated-sensor coefficients at eps = 0.1.
        let (bl, cc) = (0.366_666_666_666_666_7 + 0.2, 0.552_770_798_392_566_7);
        let h1 = &pauli::x().scale_real(bl) - &pauli::y().scale_real(cc);
        let omega = (bl * bl + cc * cc).sqrt();
        for &t in &[0.3, 1.7, 4.2] {
            let u = expm_hermitian(&herm(h1.clone()), t).unwrap();
            let psi = u.apply(PureState::basis(2, 0).amplitudes());
            // exp(-i n.sigma W t)|0> = cos(Wt)|0> - i sin(Wt) (n_x + i n_y)|1>, n = (bl, -cc)/W.
            let expect1 = c(0.0, -1.0) * (t * omega).sin() * c(bl, -cc) / omega;
            assert!((psi[0] - c((omega * t).cos(), 0.0)).norm() < 1e-12);
            assert!((psi[1] - expect1).norm() < 1e-12);
        }
    }

    #[test]
    fn variance_examples() {
        let z = herm(pauli::z());
        assert!(variance(&z, &PureState::basis(2, 0)).unwrap().abs() < 1e-15);
        let plus = PureState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert!((variance(&z, &plus).unwrap() - 1.0).abs() < 1e-15);
        let cov = covariance(&herm(pauli::x()), &herm(pauli::y()), &PureState::basis(2, 0)).unwrap();
        assert!(cov.abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_reported() {
        let err = expectation(&herm(pauli::z()), &PureState::basis(4, 0)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 4 });
    }

    #[test]
    fn state_normalization_checked() {
        assert!(matches!(PureState::from_real(&[1.0, 1.0]), Err(Error::NotNormalized { .. })));
        let s = PureState::normalized(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((s.probability(1) - 0.64).abs() < 1e-15);
    }

    #[test]
    fn determinant_of_product() {
        let a = ComplexMatrix::from_rows(2, vec![c(1.0, 2.0), c(0.5, 0.0), c(0.0, -1.0), c(3.0, 0.0)]).unwrap();
        let expected = c(1.0, 2.0) * c(3.0, 0.0) - c(0.5, 0.0) * c(0.0, -1.0);
        assert!((a.det() - expected).norm() < 1e-14);
        let xx = tensor(&pauli::x(), &pauli::z());
        assert!((xx.det() - c(1.0, 0.0)).norm() < 1e-14);
    }
}
