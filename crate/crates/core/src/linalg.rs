//! Dense complex linear algebra and quantum-information primitives.
//!
//! Operators are `nalgebra` dense matrices of `Complex64`. Tensor factors are
//! ordered so that the first factor is the most significant index, matching
//! `kronecker`: `(A ⊗ B)[(a, b), (a', b')] = A[a, a'] B[b, b']` with the
//! composite index `a * dim(B) + b`.
//!
//! Superoperators act on column-stacked operators, so
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. Since `nalgebra` stores column-major, the
//! raw storage of a matrix already is its column-stacked vector.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

#[inline]
pub fn zeros(n: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(n, n)
}

/// Builds a matrix from real row-major entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| c(x, 0.0)))
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b + b * a
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.adjoint()))
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    hermitian_deviation(m) <= tol
}

/// Induced 1-norm (max column sum).
pub fn norm_one(m: &ComplexMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `Tr[a b]` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.is_square() {
        Ok(m.nrows())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

pub fn ensure_dim(m: &ComplexMatrix, expected: usize) -> Result<()> {
    ensure_square(m)?;
    if m.nrows() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: m.nrows(),
        });
    }
    Ok(())
}

/// Pauli matrices and ladder operators in the basis `{|+⟩, |−⟩}` with
/// `σz|±⟩ = ±|±⟩`.
pub mod pauli {
    use super::*;

    pub fn sigma_x() -> ComplexMatrix {
        real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
    }

    pub fn sigma_z() -> ComplexMatrix {
        real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0])
    }

    /// `σ = |−⟩⟨+|`.
    pub fn lowering() -> ComplexMatrix {
        real_matrix(2, 2, &[0.0, 0.0, 1.0, 0.0])
    }

    /// `σ† = |+⟩⟨−|`.
    pub fn raising() -> ComplexMatrix {
        real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0])
    }
}

pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list of factors, left to right.
pub fn tensor_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    let mut it = factors.iter();
    let first = match it.next() {
        Some(f) => f.clone(),
        None => return identity(1),
    };
    it.fold(first, |acc, f| acc.kronecker(f))
}

/// Partial trace over every factor not listed in `keep`.
///
/// The kept factors stay in their original order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let n = ensure_square(m)?;
    let total: usize = dims.iter().product();
    if total != n {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: n,
        });
    }
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::InvalidParameter(format!(
                "factor index {k} out of range"
            )));
        }
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|i| keep.contains(i)).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let kept_dim: usize = kept.iter().map(|&i| dims[i]).product();
    let traced_dim: usize = traced.iter().map(|&i| dims[i]).product();

    // strides of each factor in the composite index
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offset = |factors: &[usize], mut idx: usize| -> usize {
        let mut full = 0;
        for &f in factors.iter().rev() {
            full += (idx % dims[f]) * strides[f];
            idx /= dims[f];
        }
        full
    };
    let kept_off: Vec<usize> = (0..kept_dim).map(|r| offset(&kept, r)).collect();
    let traced_off: Vec<usize> = (0..traced_dim).map(|t| offset(&traced, t)).collect();

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for (r, &ro) in kept_off.iter().enumerate() {
        for (cc, &co) in kept_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_off {
                acc += m[(ro + t, co + t)];
            }
            out[(r, cc)] = acc;
        }
    }
    Ok(out)
}

/// Column-stacking vectorization.
pub fn vectorize(m: &ComplexMatrix) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

pub fn devectorize(v: &DVector<C64>, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(dim, dim, v.as_slice())
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
// 1-norm thresholds for which the degree-m approximant is accurate to unit roundoff
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;

fn scale(m: &ComplexMatrix, s: f64) -> ComplexMatrix {
    m.map(|z| z * s)
}

fn pade_low(a: &ComplexMatrix, b: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.nrows();
    let a2 = a * a;
    let mut power = identity(n);
    let mut u = zeros(n);
    let mut v = zeros(n);
    for k in (0..b.len()).step_by(2) {
        v += scale(&power, b[k]);
        if k + 1 < b.len() {
            u += scale(&power, b[k + 1]);
        }
        power = &power * &a2;
    }
    (a * u, v)
}

fn pade13(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let b = &PADE13;
    let n = a.nrows();
    let id = identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = scale(&a6, b[13]) + scale(&a4, b[11]) + scale(&a2, b[9]);
    let u = a
        * (&a6 * inner_u
            + scale(&a6, b[7])
            + scale(&a4, b[5])
            + scale(&a2, b[3])
            + scale(&id, b[1]));
    let inner_v = scale(&a6, b[12]) + scale(&a4, b[10]) + scale(&a2, b[8]);
    let v =
        &a6 * inner_v + scale(&a6, b[6]) + scale(&a4, b[4]) + scale(&a2, b[2]) + scale(&id, b[0]);
    (u, v)
}

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant of degree up to 13, without any spectral shortcut.
pub fn pade_exponential(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = ensure_square(m)?;
    if n == 0 {
        return Ok(zeros(0));
    }
    let norm = norm_one(m);
    let (u, v, squarings) = match THETA.iter().find(|(_, theta)| norm <= *theta) {
        Some((3, _)) => {
            let (u, v) = pade_low(m, &PADE3);
            (u, v, 0)
        }
        Some((5, _)) => {
            let (u, v) = pade_low(m, &PADE5);
            (u, v, 0)
        }
        Some((7, _)) => {
            let (u, v) = pade_low(m, &PADE7);
            (u, v, 0)
        }
        Some(_) => {
            let (u, v) = pade_low(m, &PADE9);
            (u, v, 0)
        }
        None => {
            let s = (norm / THETA13).log2().ceil().max(0.0) as i32;
            let scaled = scale(m, 2f64.powi(-s));
            let (u, v) = pade13(&scaled);
            (u, v, s)
        }
    };
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::Numerical("singular Padé denominator".into()))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

/// `exp(m)` for a square matrix.
///
/// Exactly Hermitian or anti-Hermitian inputs go through their spectral
/// decomposition (which keeps propagators unitary to rounding); everything
/// else uses [`pade_exponential`].
pub fn matrix_exponential(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(m)?;
    let scale_ref = max_abs(m).max(1.0);
    let anti = m + m.adjoint();
    if max_abs(&anti) <= 1e-14 * scale_ref {
        // m = iK with K Hermitian
        let k = m.map(|z| z * -I);
        let k = (&k + k.adjoint()).map(|z| z * 0.5);
        let spec = SymmetricEigen::new(k);
        return Ok(spectral_apply(&spec.eigenvectors, &spec.eigenvalues, |x| {
            c(x.cos(), x.sin())
        }));
    }
    let herm = m - m.adjoint();
    if max_abs(&herm) <= 1e-14 * scale_ref {
        let h = (m + m.adjoint()).map(|z| z * 0.5);
        let spec = SymmetricEigen::new(h);
        return Ok(spectral_apply(&spec.eigenvectors, &spec.eigenvalues, |x| {
            c(x.exp(), 0.0)
        }));
    }
    pade_exponential(m)
}

/// `V f(Λ) V†`.
fn spectral_apply(
    vectors: &ComplexMatrix,
    values: &DVector<f64>,
    f: impl Fn(f64) -> C64,
) -> ComplexMatrix {
    let mut scaled = vectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        let fj = f(values[j]);
        col.iter_mut().for_each(|z| *z *= fj);
    }
    scaled * vectors.adjoint()
}

/// Real spectrum of a Hermitian operator with orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `j` is the eigenvector of `eigenvalues[j]`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    pub fn eigenvector(&self, j: usize) -> DVector<C64> {
        self.eigenvectors.column(j).into_owned()
    }

    /// `|v_j⟩⟨v_j|`.
    pub fn projector(&self, j: usize) -> ComplexMatrix {
        let v = self.eigenvector(j);
        &v * v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let values = DVector::from_column_slice(&self.eigenvalues);
        spectral_apply(&self.eigenvectors, &values, |x| c(x, 0.0))
    }

    /// Applies a real function to the spectrum: `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let values = DVector::from_column_slice(&self.eigenvalues);
        spectral_apply(&self.eigenvectors, &values, |x| c(f(x), 0.0))
    }
}

pub fn hermitian_eigensystem(h: &ComplexMatrix) -> Result<Spectrum> {
    hermitian_eigensystem_tol(h, Tolerances::default().hermitian_input)
}

pub fn hermitian_eigensystem_tol(h: &ComplexMatrix, tol: f64) -> Result<Spectrum> {
    ensure_square(h)?;
    let deviation = hermitian_deviation(h);
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = (h + h.adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let n = order.len();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Spectrum {
        eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        eigenvectors: vectors,
    })
}

/// Trace distance `½‖a − b‖₁` between Hermitian operators.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let spec = hermitian_eigensystem(&(a - b))?;
    Ok(0.5 * spec.eigenvalues.iter().map(|x| x.abs()).sum::<f64>())
}

/// Entrywise complex conjugate.
pub fn conjugate(m: &ComplexMatrix) -> ComplexMatrix {
    m.map(|z| z.conj())
}

/// Density matrix: Hermitian, unit trace, positive semidefinite, with the
/// dimensions of its tensor factors.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl QuantumState {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let n = ensure_square(&matrix)?;
        Self::with_dims(matrix, vec![n])
    }

    pub fn with_dims(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        Self::with_tolerance(matrix, dims, Tolerances::default().validity)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, dims: Vec<usize>, tol: f64) -> Result<Self> {
        let n = ensure_square(&matrix)?;
        let total: usize = dims.iter().product();
        if total != n {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: n,
            });
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > tol {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {deviation:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let spec = hermitian_eigensystem_tol(&matrix, f64::INFINITY)?;
        if spec.min_eigenvalue() < -tol {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:e}",
                spec.min_eigenvalue()
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// Normalized projector onto `psi`.
    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = psi.map(|z| z / norm);
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: identity(dim).map(|z| z / dim as f64),
            dims: vec![dim],
        }
    }

    /// Qubit state `cos(θ/2)|+⟩ + e^{iφ} sin(θ/2)|−⟩`.
    pub fn bloch(theta: f64, phi: f64) -> Self {
        let psi = DVector::from_column_slice(&[
            c((theta / 2.0).cos(), 0.0),
            c(phi.cos(), phi.sin()) * (theta / 2.0).sin(),
        ]);
        let m = &psi * psi.adjoint();
        Self {
            matrix: m,
            dims: vec![2],
        }
    }

    /// Qubit state with Bloch vector `(x, y, z)`, `|r| ≤ 1`.
    pub fn from_bloch_vector(x: f64, y: f64, z: f64) -> Result<Self> {
        let m = (identity(2)
            + pauli::sigma_x() * c(x, 0.0)
            + pauli::sigma_y() * c(y, 0.0)
            + pauli::sigma_z() * c(z, 0.0))
        .map(|e| e * 0.5);
        Self::new(m)
    }

    pub fn product(&self, other: &QuantumState) -> QuantumState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        QuantumState {
            matrix: self.matrix.kronecker(&other.matrix),
            dims,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `Tr[op ρ]`.
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        trace_product(op, &self.matrix)
    }

    pub fn spectrum(&self) -> Spectrum {
        // validated on construction
        hermitian_eigensystem_tol(&self.matrix, f64::INFINITY).expect("square by construction")
    }

    /// Reduced state on the listed factors.
    pub fn reduce(&self, keep: &[usize]) -> Result<QuantumState> {
        let m = partial_trace(&self.matrix, &self.dims, keep)?;
        let dims = (0..self.dims.len())
            .filter(|i| keep.contains(i))
            .map(|i| self.dims[i])
            .collect();
        Ok(QuantumState { matrix: m, dims })
    }

    pub(crate) fn from_parts_unchecked(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        Self { matrix, dims }
    }
}

/// Wootters concurrence of a two-qubit state.
///
/// `C = max(0, μ₁ − μ₂ − μ₃ − μ₄)` with `μᵢ` the descending square roots of
/// the eigenvalues of `ρ (σy⊗σy) ρ* (σy⊗σy)`, obtained here from the
/// Hermitian form `√ρ ρ̃ √ρ`.
pub fn concurrence(rho: &QuantumState) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    // λ_i are the singular values of τ = Wᵀ(σy⊗σy)W for ρ = WW†; small
    // eigenvalues of ρ enter τ only at second order
    let yy = pauli::sigma_y().kronecker(&pauli::sigma_y());
    let spec = rho.spectrum();
    let mut w = spec.eigenvectors.clone();
    for (k, &p) in spec.eigenvalues.iter().enumerate() {
        w.column_mut(k).scale_mut(p.max(0.0).sqrt());
    }
    let tau = w.transpose() * yy * &w;
    let mut mu: Vec<f64> = tau
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).max(0.0))
}
