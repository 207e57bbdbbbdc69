//! Random-matrix diagnostics: quasi-energy spacings against the CUE surmise,
//! Porter-Thomas statistics of transition probabilities, inverse
//! participation ratios and Husimi distributions.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harper::{Basis, BasisLabel};
use crate::linalg::{cis, StateVector, Unitary, C64, ZERO};

/// Quasi-energy spacings normalized to unit mean.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacingSample {
    pub spacings: Vec<f64>,
}

/// Circular nearest-neighbour spacings of ascending phases in `[0, 2π)`,
/// including the wrap-around gap, divided by their mean.
pub fn spacing_sample(phases: &[f64]) -> Result<SpacingSample> {
    if phases.len() < 2 {
        return Err(Error::invalid("spacing statistics need at least two phases"));
    }
    if phases.iter().any(|&t| !(0.0..TAU).contains(&t)) {
        return Err(Error::invalid("phases must lie in [0, 2π)"));
    }
    if phases.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("phases must be ascending"));
    }
    let n = phases.len();
    let mut gaps: Vec<f64> = phases.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.push(TAU - (phases[n - 1] - phases[0]));
    // the gaps sum to 2π exactly, so the mean is 2π/n
    let mean = gaps.iter().sum::<f64>() / n as f64;
    if mean <= 0.0 {
        return Err(Error::invalid("degenerate spectrum"));
    }
    Ok(SpacingSample {
        spacings: gaps.into_iter().map(|g| g / mean).collect(),
    })
}

impl SpacingSample {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,s")?;
        for (i, s) in self.spacings.iter().enumerate() {
            writeln!(w, "{},{:.17e}", i, s)?;
        }
        Ok(())
    }
}

/// Which form of the CUE spacing density to evaluate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurmiseForm {
    /// `(32/π²) s² e^{−4s²/π}`: normalized, unit mean.
    #[default]
    Normalized,
    /// `(32/π²) e^{−4s²/π}` without the `s²` factor; integrates to `8/π`.
    WithoutQuadraticFactor,
}

pub fn cue_surmise_pdf(s: f64, form: SurmiseForm) -> Result<f64> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::Domain(format!("spacing must be non-negative, got {s}")));
    }
    let g = 32.0 / (PI * PI) * (-4.0 * s * s / PI).exp();
    Ok(match form {
        SurmiseForm::Normalized => s * s * g,
        SurmiseForm::WithoutQuadraticFactor => g,
    })
}

/// CDF of the normalized surmise: `erf(2s/√π) − (4s/π) e^{−4s²/π}`.
pub fn cue_surmise_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    erf(2.0 * s / PI.sqrt()) - 4.0 * s / PI * (-4.0 * s * s / PI).exp()
}

/// Error function, accurate to ~1e−15 (series below 3, continued fraction above).
pub(crate) fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x < 3.0 {
        // erf(x) = 2/√π · e^{−x²} Σ 2ⁿ x^{2n+1} / (1·3·…·(2n+1))
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        let mut k = 0.0;
        while term.abs() > 1e-17 * sum.abs() {
            k += 1.0;
            term *= 2.0 * x2 / (2.0 * k + 1.0);
            sum += term;
        }
        2.0 / PI.sqrt() * (-x2).exp() * sum
    } else {
        // erfc continued fraction (Lentz)
        let x2 = x * x;
        let mut f = x;
        let mut c = x;
        let mut d = 0.0;
        for i in 1..200 {
            let a = i as f64 / 2.0;
            d = x + a * d;
            d = 1.0 / d;
            c = x + a / c;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        1.0 - (-x2).exp() / (PI.sqrt() * f)
    }
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// `z_jk = |⟨v_j|U|v_k⟩|²` in an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    pub z: DMatrix<f64>,
    pub basis_label: BasisLabel,
}

impl TransitionMatrix {
    pub fn dim(&self) -> usize {
        self.z.nrows()
    }

    /// `{N z_jk}`, mean 1.
    pub fn scaled_values(&self) -> Vec<f64> {
        let n = self.dim() as f64;
        self.z.iter().map(|&z| n * z).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "j,k,z")?;
        for j in 0..self.dim() {
            for k in 0..self.dim() {
                writeln!(w, "{},{},{:.17e}", j, k, self.z[(j, k)])?;
            }
        }
        Ok(())
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

pub fn transition_matrix(u: &Unitary, basis: &Basis) -> Result<TransitionMatrix> {
    check_dims(u.dim(), basis.dim())?;
    let v = basis.vectors.matrix();
    let m = match basis.label {
        BasisLabel::Angle => u.matrix().clone(),
        _ => v.adjoint() * u.matrix() * v,
    };
    Ok(TransitionMatrix {
        z: m.map(|x| x.norm_sqr()),
        basis_label: basis.label,
    })
}

/// Second and third moments of a unit-mean sample with standard errors
/// `√(⟨x^{2q}⟩ − ⟨x^q⟩²)/√n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub m2: f64,
    pub m3: f64,
    pub se2: f64,
    pub se3: f64,
}

pub fn scaled_moments(values: &[f64]) -> Result<MomentReport> {
    if values.is_empty() {
        return Err(Error::invalid("moments of an empty sample"));
    }
    let n = values.len() as f64;
    let mean_pow = |q: i32| values.iter().map(|x| x.powi(q)).sum::<f64>() / n;
    let (m2, m3, m4, m6) = (mean_pow(2), mean_pow(3), mean_pow(4), mean_pow(6));
    Ok(MomentReport {
        m2,
        m3,
        se2: ((m4 - m2 * m2).max(0.0) / n).sqrt(),
        se3: ((m6 - m3 * m3).max(0.0) / n).sqrt(),
    })
}

/// `m^(q) = (1/N²) Σ (N z_jk)^q` for `q = 2, 3`.
pub fn trans_moments(t: &TransitionMatrix) -> MomentReport {
    scaled_moments(&t.scaled_values()).expect("transition matrix is non-empty")
}

/// `F(z) = 1 − e^{−Nz}`.
pub fn porter_thomas_cdf(z: f64, n: usize) -> f64 {
    1.0 - (-(n as f64) * z).exp()
}

fn check_normalized(psi: &StateVector) -> Result<()> {
    let norm = psi.norm();
    if norm.is_nan() || (norm - 1.0).abs() > 1e-8 {
        return Err(Error::contract(format!("state is not normalized (‖ψ‖ = {norm})")));
    }
    Ok(())
}

/// `I_q(B, ψ) = Σ_j |⟨v_j|ψ⟩|^{2q}`.
pub fn ipr(psi: &StateVector, basis: &Basis, q: u32) -> Result<f64> {
    check_dims(basis.dim(), psi.len())?;
    if q < 2 {
        return Err(Error::invalid("inverse participation ratio needs q >= 2"));
    }
    check_normalized(psi)?;
    let amps = match basis.label {
        BasisLabel::Angle => psi.clone(),
        _ => basis.vectors.matrix().adjoint() * psi,
    };
    Ok(ipr_of_amplitudes(amps.iter(), q))
}

fn ipr_of_amplitudes<'a>(amps: impl Iterator<Item = &'a C64>, q: u32) -> f64 {
    amps.map(|z| z.norm_sqr().powi(q as i32)).sum()
}

/// `{I_q(B, U|v_j⟩)}` over the basis vectors.
pub fn ipr_set(u: &Unitary, basis: &Basis, q: u32) -> Result<Vec<f64>> {
    check_dims(u.dim(), basis.dim())?;
    if q < 2 {
        return Err(Error::invalid("inverse participation ratio needs q >= 2"));
    }
    let v = basis.vectors.matrix();
    let m = match basis.label {
        BasisLabel::Angle => u.matrix().clone(),
        _ => v.adjoint() * u.matrix() * v,
    };
    Ok(m.column_iter().map(|c| ipr_of_amplitudes(c.iter(), q)).collect())
}

/// Husimi distribution on an `R×R` grid; row `r` is momentum `2πr/R`,
/// column `c` is angle `2πc/R`.
#[derive(Clone, Debug, PartialEq)]
pub struct HusimiGrid {
    pub resolution: usize,
    /// Row-major.
    pub values: Vec<f64>,
}

impl HusimiGrid {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.resolution + col]
    }

    /// `(row, col)` of the largest value.
    pub fn argmax(&self) -> (usize, usize) {
        let i = self
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        (i / self.resolution, i % self.resolution)
    }

    /// Fraction of cells above `rel` times the maximum.
    pub fn occupancy(&self, rel: f64) -> f64 {
        let max = self.values.iter().cloned().fold(0.0, f64::max);
        let cut = rel * max;
        self.values.iter().filter(|&&v| v > cut).count() as f64 / self.values.len() as f64
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "row,col,phi,p,q")?;
        let r = self.resolution;
        for row in 0..r {
            for col in 0..r {
                writeln!(
                    w,
                    "{},{},{:.17e},{:.17e},{:.17e}",
                    row,
                    col,
                    TAU * col as f64 / r as f64,
                    TAU * row as f64 / r as f64,
                    self.get(row, col)
                )?;
            }
        }
        Ok(())
    }
}

/// Torus coherent state centred on `(phi, p)`: a periodized Gaussian of
/// angular variance `π/N` carrying momentum phase `e^{ip(j + Nm)}` on image
/// `m`, normalized to unit norm.
pub fn coherent_state(n: usize, phi: f64, p: f64) -> StateVector {
    let inv_4var = n as f64 / (4.0 * PI);
    let images = 3i64;
    let mut v = StateVector::from_fn(n, |j, _| {
        let theta = TAU * j as f64 / n as f64;
        let mut acc = ZERO;
        for m in -images..=images {
            let d = theta - phi + TAU * m as f64;
            acc += cis(p * (j as f64 + (n as i64 * m) as f64)) * (-d * d * inv_4var).exp();
        }
        acc
    });
    let norm = v.norm();
    v /= C64::new(norm, 0.0);
    v
}

pub fn husimi_grid(psi: &StateVector, resolution: usize) -> Result<HusimiGrid> {
    if resolution == 0 {
        return Err(Error::invalid("resolution must be positive"));
    }
    check_normalized(psi)?;
    let n = psi.len();
    let mut values = Vec::with_capacity(resolution * resolution);
    for row in 0..resolution {
        let p = TAU * row as f64 / resolution as f64;
        for col in 0..resolution {
            let phi = TAU * col as f64 / resolution as f64;
            let c = coherent_state(n, phi, p);
            values.push(c.dotc(psi).norm_sqr());
        }
    }
    Ok(HusimiGrid { resolution, values })
}
