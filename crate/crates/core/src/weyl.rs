//! Clock, shift and displacement operators, the displacement-operator
//! decomposition of a matrix, and frame potentials of displacement twirls.
//!
//! `X|j⟩ = |j+1 mod N⟩`, `Z = diag(ω^j)`, `ZX = ωXZ` and
//! `D_jk = τ^{−jk} Z^j X^k` with `τ² = ω`. For odd `N` the root is
//! `τ = −e^{iπ/N}`, which has order `N` and makes `D` periodic in both
//! indices; for even `N` no such root exists and `τ = e^{iπ/N}`.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harper::{floquet_propagator, HarperParams};
use crate::linalg::{cis, max_abs_diff, ComplexMatrix, FourierTransform, Unitary, C64, ZERO};

/// Largest dimension accepted by the brute-force twirl enumeration.
pub const BRUTE_FORCE_MAX_DIM: usize = 8;

/// Index pair `(j, k)` of a displacement operator, reduced mod `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DisplacementIndex {
    pub j: usize,
    pub k: usize,
}

impl DisplacementIndex {
    pub fn new(n: usize, j: i64, k: i64) -> Self {
        let n = n as i64;
        DisplacementIndex {
            j: j.rem_euclid(n) as usize,
            k: k.rem_euclid(n) as usize,
        }
    }

    /// Index of `D†`.
    pub fn negated(self, n: usize) -> Self {
        DisplacementIndex::new(n, -(self.j as i64), -(self.k as i64))
    }
}

/// `ω^x` with `ω = e^{2πi/N}`.
fn omega_pow(n: usize, x: i64) -> C64 {
    let e = x.rem_euclid(n as i64);
    cis(TAU * e as f64 / n as f64)
}

/// `τ^x` for the square root `τ` of `ω` described in the module docs.
pub fn half_omega_pow(n: usize, x: i64) -> C64 {
    let n_i = n as i64;
    let c = if n % 2 == 1 { n_i + 1 } else { 1 };
    let e = (c * x).rem_euclid(2 * n_i);
    cis(PI * e as f64 / n as f64)
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidDimension(n))
    } else {
        Ok(())
    }
}

/// `Z = diag(ω^j)`.
pub fn clock(n: usize) -> Result<Unitary> {
    check_dim(n)?;
    clock_shift_power(n, 1, 0)
}

/// `X = Σ |j+1⟩⟨j|`.
pub fn shift(n: usize) -> Result<Unitary> {
    check_dim(n)?;
    clock_shift_power(n, 0, 1)
}

/// `Z^j X^k` for any integers `j, k`.
pub fn clock_shift_power(n: usize, j: i64, k: i64) -> Result<Unitary> {
    check_dim(n)?;
    let kk = k.rem_euclid(n as i64) as usize;
    let mut m = ComplexMatrix::zeros(n, n);
    for col in 0..n {
        let row = (col + kk) % n;
        m[(row, col)] = omega_pow(n, j * row as i64);
    }
    Unitary::new(m)
}

/// `D_jk = τ^{−jk} Z^j X^k`.
pub fn displacement(n: usize, idx: DisplacementIndex) -> Result<Unitary> {
    let base = clock_shift_power(n, idx.j as i64, idx.k as i64)?;
    let phase = half_omega_pow(n, -((idx.j * idx.k) as i64));
    Unitary::new(base.into_matrix() * phase)
}

/// Coefficients `w_jk = tr(D_jk† W)/√N` of `W = Σ w_jk D_jk / √N`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorCoefficients {
    pub dim: usize,
    /// `w[(j, k)]`
    pub w: ComplexMatrix,
}

impl OperatorCoefficients {
    /// `Σ|w_jk|²`, equal to `N` for a unitary source.
    pub fn parseval_sum(&self) -> f64 {
        self.w.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `p_jk = |w_jk|²`, row-major over `(j, k)`.
    pub fn weights(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                out.push(self.w[(j, k)].norm_sqr());
            }
        }
        out
    }

    /// `S_op = {N |w_jk|²}`; mean 1 for a unitary source.
    pub fn scaled_weights(&self) -> Vec<f64> {
        let n = self.dim as f64;
        self.weights().into_iter().map(|p| n * p).collect()
    }

    /// `(1/√N) Σ w_jk D_jk`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim;
        let s = 1.0 / (n as f64).sqrt();
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            for col in 0..n {
                let row = (col + k) % n;
                let mut acc = ZERO;
                for j in 0..n {
                    acc += self.w[(j, k)]
                        * half_omega_pow(n, -((j * k) as i64))
                        * omega_pow(n, (j * row) as i64);
                }
                out[(row, col)] = acc * s;
            }
        }
        out
    }

    /// Grid of `|w_jk|²` as CSV rows `j,k,weight`.
    pub fn write_weights_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "j,k,weight")?;
        for j in 0..self.dim {
            for k in 0..self.dim {
                writeln!(out, "{},{},{:.17e}", j, k, self.w[(j, k)].norm_sqr())?;
            }
        }
        Ok(())
    }
}

/// Displacement-operator decomposition of an arbitrary square matrix.
///
/// Uses `tr(D_jk† W) = τ^{jk} ω^{−jk} Σ_m ω^{−jm} W_{m+k, m}`: one FFT per
/// cyclic diagonal of `W`.
pub fn op_decompose(w: &ComplexMatrix) -> Result<OperatorCoefficients> {
    if !w.is_square() || w.nrows() == 0 {
        return Err(Error::InvalidDimension(w.nrows()));
    }
    let n = w.nrows();
    let ft = FourierTransform::new(n);
    let mut scratch = ft.scratch();
    let s = 1.0 / (n as f64).sqrt();
    let mut coeffs = ComplexMatrix::zeros(n, n);
    let mut diag = vec![ZERO; n];
    for k in 0..n {
        for (m, d) in diag.iter_mut().enumerate() {
            *d = w[((m + k) % n, m)];
        }
        ft.forward_unscaled(&mut diag, &mut scratch);
        for j in 0..n {
            let jk = (j * k) as i64;
            coeffs[(j, k)] = diag[j] * half_omega_pow(n, jk) * omega_pow(n, -jk) * s;
        }
    }
    Ok(OperatorCoefficients { dim: n, w: coeffs })
}

/// Max-entry norm of `U(b + 2πj/N, φ₀ + 2πk/N) − Z^j X^k U(b, φ₀) X^{−k} Z^{−j}`.
pub fn verify_shift_conjugation(p: &HarperParams, j: i64, k: i64, n_tau: usize) -> Result<f64> {
    let n = p.n;
    let mut shifted = *p;
    shifted.b += TAU * j as f64 / n as f64;
    shifted.phi0 += TAU * k as f64 / n as f64;
    let lhs = floquet_propagator(&shifted, n_tau)?;
    let base = floquet_propagator(p, n_tau)?;
    let c = clock_shift_power(n, j, k)?;
    let rhs = c.matrix() * base.matrix() * c.matrix().adjoint();
    Ok(max_abs_diff(lhs.matrix(), &rhs))
}

/// Exact `k`-frame potential of the uniform distribution on
/// `S_HW(W) = {D W D† : D displacement}`:
/// `F = (1/N²) Σ_ab |Σ_jn p_jn ω^{an − bj}|^{2k}` with `p = |w|²`.
pub fn twirl_frame_potential(w: &Unitary, k: u32) -> Result<f64> {
    let coeffs = op_decompose(w.matrix())?;
    let n = coeffs.dim;
    // Column-major buffer indexed [j + n·m]: column m holds p_{·, m}.
    let mut buf: Vec<C64> = Vec::with_capacity(n * n);
    for m in 0..n {
        for j in 0..n {
            buf.push(C64::new(coeffs.w[(j, m)].norm_sqr(), 0.0));
        }
    }
    let ft = FourierTransform::new(n);
    let mut scratch = ft.scratch();
    // forward over j gives the ω^{−bj} factor for every column
    ft.forward_unscaled(&mut buf, &mut scratch);
    // transpose, then inverse over m gives ω^{+an}
    let mut t = vec![ZERO; n * n];
    for m in 0..n {
        for b in 0..n {
            t[m + n * b] = buf[b + n * m];
        }
    }
    ft.inverse_unscaled(&mut t, &mut scratch);
    let total: f64 = t.iter().map(|z| z.norm_sqr().powi(k as i32)).sum();
    Ok(total / (n * n) as f64)
}

/// Brute-force enumeration of all `N⁴` conjugate pairs; `N ≤ 8`.
pub fn twirl_frame_potential_brute(w: &Unitary, k: u32) -> Result<f64> {
    let n = w.dim();
    if n > BRUTE_FORCE_MAX_DIM {
        return Err(Error::invalid(format!(
            "brute-force twirl enumeration limited to N <= {BRUTE_FORCE_MAX_DIM}"
        )));
    }
    check_dim(n)?;
    let mut conjugates = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let d = displacement(n, DisplacementIndex { j: a, k: b })?;
            conjugates.push(Unitary::new(d.matrix() * w.matrix() * d.matrix().adjoint())?);
        }
    }
    let mut total = 0.0;
    for x in &conjugates {
        for y in &conjugates {
            total += x.trace_inner(y).norm_sqr().powi(k as i32);
        }
    }
    Ok(total / (n as f64).powi(4))
}

/// `(1/N²)(Σp)^{2k}`: the `a = b = 0` Fourier term alone.
pub fn twirl_lower_bound(w: &Unitary, k: u32) -> Result<f64> {
    let total = op_decompose(w.matrix())?.parseval_sum();
    let n = w.dim() as f64;
    Ok(total.powi(2 * k as i32) / (n * n))
}
