//! Dense complex linear algebra: the unitary and Hermitian newtypes, the
//! discrete Fourier unitary, and the eigensolvers everything else builds on.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>` (column-major). The newtypes
//! certify their invariant once at construction, so downstream code can take
//! `&Unitary` / `&Hermitian` without re-checking.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type StateVector = DVector<C64>;

/// Default bound on the max-entry norm of `U†U − I`.
pub const DEFAULT_UNITARY_TOL: f64 = 1e-8;
/// Bound on the max-entry norm of `H − H†`.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// `e^{iθ}`
#[inline]
pub fn cis(theta: f64) -> C64 {
    let (s, c) = theta.sin_cos();
    C64::new(c, s)
}

/// Largest entry modulus of `a − b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Max-entry norm of `M†M − I`; infinite for non-square input.
pub fn unitarity_defect(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let g = m.adjoint() * m;
    let mut worst = 0.0f64;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    if worst.is_nan() {
        f64::INFINITY
    } else {
        worst
    }
}

/// Max-entry norm of `M − M†`.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// A square complex matrix certified unitary to a tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    matrix: ComplexMatrix,
    defect: f64,
}

impl Unitary {
    /// Certifies `matrix` against [`DEFAULT_UNITARY_TOL`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, DEFAULT_UNITARY_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidDimension(matrix.nrows()));
        }
        let defect = unitarity_defect(&matrix);
        if defect.is_nan() || defect >= tol {
            return Err(Error::contract(format!(
                "unitarity defect {defect:e} exceeds tolerance {tol:e}"
            )));
        }
        Ok(Unitary { matrix, defect })
    }

    pub fn identity(n: usize) -> Self {
        Unitary {
            matrix: ComplexMatrix::identity(n, n),
            defect: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Max-entry norm of `U†U − I` measured at construction.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary {
            matrix: self.matrix.adjoint(),
            defect: self.defect,
        }
    }

    /// Product `self · rhs`, re-certified.
    pub fn compose(&self, rhs: &Unitary) -> Result<Unitary> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rhs.dim(),
            });
        }
        Unitary::new(&self.matrix * &rhs.matrix)
    }

    /// `tr(self · other†)`, computed without forming the product.
    pub fn trace_inner(&self, other: &Unitary) -> C64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(u, v)| u * v.conj())
            .sum()
    }
}

/// A square complex matrix certified Hermitian to [`HERMITIAN_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian {
    matrix: ComplexMatrix,
}

impl Hermitian {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidDimension(matrix.nrows()));
        }
        let defect = hermiticity_defect(&matrix);
        if defect.is_nan() || defect >= HERMITIAN_TOL {
            return Err(Error::contract(format!(
                "matrix is not Hermitian (defect {defect:e})"
            )));
        }
        Ok(Hermitian { matrix })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0)));
        Hermitian {
            matrix: ComplexMatrix::from_diagonal(&d),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Largest absolute eigenvalue bound used to scale residual checks
    /// (the max-entry norm times the dimension).
    pub fn norm_bound(&self) -> f64 {
        let m = self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        m * self.dim() as f64
    }
}

/// The discrete Fourier unitary `Q_FT` with entries `ω^{jk}/√N`, `ω = e^{2πi/N}`.
///
/// Its columns are the eigenvectors of the momentum operator: `p̂ = Q φ̂ Q†`.
pub fn dft_matrix(n: usize) -> Result<Unitary> {
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let m = ComplexMatrix::from_fn(n, n, |j, k| {
        // reduce jk mod N before scaling to keep the phase argument small
        let e = (j * k) % n;
        cis(TAU * e as f64 / n as f64) * scale
    });
    Unitary::new(m)
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `j` is the eigenvector of `eigenvalues[j]`.
    pub eigenvectors: Unitary,
}

pub fn eig_hermitian(h: &Hermitian) -> Result<HermitianEigen> {
    let n = h.dim();
    let eig = h.matrix.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors: Unitary::new(vectors)?,
    })
}

/// Eigen-decomposition of a unitary: phases in `[0, 2π)` ascending, with the
/// matching eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct UnitaryEigen {
    pub phases: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

/// Reduce an angle into `[0, 2π)`.
#[inline]
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

pub fn eig_unitary(u: &Unitary) -> UnitaryEigen {
    let n = u.dim();
    // A unitary is normal, so its complex Schur form is diagonal and the
    // Schur vectors are eigenvectors.
    let (q, t) = u.matrix.clone().schur().unpack();
    let raw: Vec<f64> = (0..n)
        .map(|i| {
            let z = t[(i, i)];
            // project onto the unit circle before taking the argument
            let z = z / z.norm();
            wrap_angle(z.arg())
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));
    UnitaryEigen {
        phases: order.iter().map(|&i| raw[i]).collect(),
        eigenvectors: ComplexMatrix::from_fn(n, n, |i, j| q[(i, order[j])]),
    }
}

/// Quasi-energies: eigenphases of `u` in `[0, 2π)`, ascending.
pub fn eigenphases(u: &Unitary) -> Vec<f64> {
    let n = u.dim();
    let t = u.matrix.clone().schur().unpack().1;
    let mut phases: Vec<f64> = (0..n)
        .map(|i| {
            let z = t[(i, i)];
            wrap_angle((z / z.norm()).arg())
        })
        .collect();
    phases.sort_by(f64::total_cmp);
    phases
}

/// `exp(−i·s·H)` via the spectral decomposition `V diag(e^{−isλ}) V†`.
pub fn expm_hermitian(h: &Hermitian, s: f64) -> Result<Unitary> {
    let eig = eig_hermitian(h)?;
    let v = eig.eigenvectors.matrix();
    let n = h.dim();
    let mut scaled = v.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = cis(-s * lambda);
        for i in 0..n {
            scaled[(i, j)] *= phase;
        }
    }
    Unitary::new(scaled * v.adjoint())
}

/// Batched discrete Fourier transforms over the columns of a column-major
/// `N×N` buffer.
///
/// `to_momentum` applies `Q_FT†` and `to_angle` applies `Q_FT` to every
/// column; the `_unscaled` variants omit the `1/√N` factor so callers can
/// fold it into a diagonal multiply.
#[derive(Clone)]
pub struct FourierTransform {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FourierTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierTransform").field("n", &self.n).finish()
    }
}

impl FourierTransform {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        FourierTransform {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn scratch(&self) -> Vec<C64> {
        let len = self
            .forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len());
        vec![ZERO; len]
    }

    /// `Σ_j e^{−2πi jk/N} x_j` on each length-N chunk of `buf`.
    pub fn forward_unscaled(&self, buf: &mut [C64], scratch: &mut [C64]) {
        self.forward.process_with_scratch(buf, scratch);
    }

    /// `Σ_k e^{+2πi jk/N} x_k` on each length-N chunk of `buf`.
    pub fn inverse_unscaled(&self, buf: &mut [C64], scratch: &mut [C64]) {
        self.inverse.process_with_scratch(buf, scratch);
    }

    pub fn to_momentum(&self, buf: &mut [C64]) {
        let mut scratch = self.scratch();
        self.forward_unscaled(buf, &mut scratch);
        let s = 1.0 / (self.n as f64).sqrt();
        buf.iter_mut().for_each(|z| *z *= s);
    }

    pub fn to_angle(&self, buf: &mut [C64]) {
        let mut scratch = self.scratch();
        self.inverse_unscaled(buf, &mut scratch);
        let s = 1.0 / (self.n as f64).sqrt();
        buf.iter_mut().for_each(|z| *z *= s);
    }
}
