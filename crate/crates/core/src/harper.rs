//! The quantized perturbed Harper model on an `N`-site torus and its
//! Floquet / drifting propagators.
//!
//! With `θ_j = 2πj/N` and `p̂ = Q_FT φ̂ Q_FT†`,
//!
//! ```text
//! ĥ₀    = a(1 − cos(p̂ − b)) − ε cos(φ̂ − φ₀)
//! ĥ₁(τ) = −μ cos(φ̂ − φ₀ + τ − τ₀) − μ′ cos(φ̂ − φ₀ − τ + τ₀)
//! U     = T exp(−i (N/2π) ∫ ĥ(τ) dτ)
//! ```
//!
//! Propagators use Strang splitting: a kinetic half step (diagonal in the
//! Fourier basis), the full potential + perturbation step (diagonal in the
//! angle basis) at the step's midpoint time, then another kinetic half step.
//! Adjacent kinetic half steps are merged, so each step costs one batched
//! FFT pair over the columns of the propagator.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    cis, eig_hermitian, ComplexMatrix, FourierTransform, Hermitian, Unitary, C64, ONE,
};

/// One of the seven real control parameters of the Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    A,
    B,
    Epsilon,
    Mu,
    MuPrime,
    Phi0,
    Tau0,
}

impl Param {
    pub const ALL: [Param; 7] = [
        Param::A,
        Param::B,
        Param::Epsilon,
        Param::Mu,
        Param::MuPrime,
        Param::Phi0,
        Param::Tau0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::A => "a",
            Param::B => "b",
            Param::Epsilon => "epsilon",
            Param::Mu => "mu",
            Param::MuPrime => "mu_prime",
            Param::Phi0 => "phi0",
            Param::Tau0 => "tau0",
        }
    }

    /// Angles live on the circle; amplitudes do not.
    pub fn is_angle(self) -> bool {
        matches!(self, Param::B | Param::Phi0 | Param::Tau0)
    }
}

impl std::str::FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown parameter `{s}`")))
    }
}

/// Control-parameter vector of one Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarperParams {
    /// Hilbert-space dimension.
    #[serde(rename = "N")]
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
    pub mu: f64,
    pub mu_prime: f64,
    pub phi0: f64,
    pub tau0: f64,
}

impl HarperParams {
    /// All amplitudes and phases zero.
    pub fn zero(n: usize) -> Self {
        HarperParams {
            n,
            a: 0.0,
            b: 0.0,
            epsilon: 0.0,
            mu: 0.0,
            mu_prime: 0.0,
            phi0: 0.0,
            tau0: 0.0,
        }
    }

    /// The fully ergodic reference propagator `U_Ta`.
    pub fn u_ta(n: usize) -> Self {
        HarperParams {
            a: 3.0,
            b: 0.2,
            epsilon: 3.1,
            mu: 3.0,
            mu_prime: 3.1,
            ..Self::zero(n)
        }
    }

    /// The hybrid (islands + chaotic sea) reference propagator `U_Tb`.
    pub fn u_tb(n: usize) -> Self {
        HarperParams {
            a: 3.0,
            b: 0.0,
            epsilon: 3.1,
            mu: 1.0,
            mu_prime: 0.0,
            ..Self::zero(n)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidDimension(self.n));
        }
        for p in Param::ALL {
            if !self.get(p).is_finite() {
                return Err(Error::invalid(format!("parameter {} is not finite", p.name())));
            }
        }
        Ok(())
    }

    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::A => self.a,
            Param::B => self.b,
            Param::Epsilon => self.epsilon,
            Param::Mu => self.mu,
            Param::MuPrime => self.mu_prime,
            Param::Phi0 => self.phi0,
            Param::Tau0 => self.tau0,
        }
    }

    pub fn set(&mut self, p: Param, value: f64) {
        match p {
            Param::A => self.a = value,
            Param::B => self.b = value,
            Param::Epsilon => self.epsilon = value,
            Param::Mu => self.mu = value,
            Param::MuPrime => self.mu_prime = value,
            Param::Phi0 => self.phi0 = value,
            Param::Tau0 => self.tau0 = value,
        }
    }

    /// Parameters after drifting for time `tau` at constant `rates`.
    pub fn drifted(&self, rates: &HarperRates, tau: f64) -> Self {
        let mut out = *self;
        for p in Param::ALL {
            out.set(p, self.get(p) + rates.get(p) * tau);
        }
        out
    }

    pub fn hbar_eff(&self) -> EffectivePlanck {
        EffectivePlanck::new(self.n)
    }
}

/// `ħ_eff = 2π/N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectivePlanck(f64);

impl EffectivePlanck {
    pub fn new(n: usize) -> Self {
        EffectivePlanck(TAU / n as f64)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Constant time derivatives `d/dτ` of each parameter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HarperRates {
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
    pub mu: f64,
    pub mu_prime: f64,
    pub phi0: f64,
    pub tau0: f64,
}

impl HarperRates {
    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::A => self.a,
            Param::B => self.b,
            Param::Epsilon => self.epsilon,
            Param::Mu => self.mu,
            Param::MuPrime => self.mu_prime,
            Param::Phi0 => self.phi0,
            Param::Tau0 => self.tau0,
        }
    }

    pub fn set(&mut self, p: Param, value: f64) {
        match p {
            Param::A => self.a = value,
            Param::B => self.b = value,
            Param::Epsilon => self.epsilon = value,
            Param::Mu => self.mu = value,
            Param::MuPrime => self.mu_prime = value,
            Param::Phi0 => self.phi0 = value,
            Param::Tau0 => self.tau0 = value,
        }
    }

    pub fn is_zero(&self) -> bool {
        Param::ALL.iter().all(|&p| self.get(p) == 0.0)
    }
}

/// Parameters drifting linearly from `initial` over `n_periods` periods of 2π.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftSchedule {
    pub initial: HarperParams,
    pub rates: HarperRates,
    pub n_periods: usize,
}

impl DriftSchedule {
    /// The drifting reference propagator `U_Drift`: `b: 0 → 1.9`,
    /// `μ: 1 → 7`, `μ′: 0.5 → 6.5` over three periods.
    pub fn u_drift(n: usize) -> Self {
        let n_periods = 3;
        let span = TAU * n_periods as f64;
        DriftSchedule {
            initial: HarperParams {
                a: 3.0,
                epsilon: 3.0,
                mu: 1.0,
                mu_prime: 0.5,
                ..HarperParams::zero(n)
            },
            rates: HarperRates {
                b: 1.9 / span,
                mu: 6.0 / span,
                mu_prime: 6.0 / span,
                ..HarperRates::default()
            },
            n_periods,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.initial.validate()?;
        if self.n_periods == 0 {
            return Err(Error::invalid("n_periods must be at least 1"));
        }
        for p in Param::ALL {
            if !self.rates.get(p).is_finite() {
                return Err(Error::invalid(format!("rate of {} is not finite", p.name())));
            }
        }
        Ok(())
    }

    /// Parameter values at the end of the schedule.
    pub fn final_params(&self) -> HarperParams {
        self.initial
            .drifted(&self.rates, TAU * self.n_periods as f64)
    }
}

/// Default number of Trotter steps per 2π period.
pub fn default_n_tau(n: usize) -> usize {
    4 * n
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisLabel {
    Angle,
    H0Eigen,
    Custom,
}

/// An orthonormal basis stored as the columns of a unitary.
#[derive(Clone, Debug)]
pub struct Basis {
    pub vectors: Unitary,
    pub label: BasisLabel,
}

impl Basis {
    pub fn angle(n: usize) -> Self {
        Basis {
            vectors: Unitary::identity(n),
            label: BasisLabel::Angle,
        }
    }

    pub fn custom(vectors: Unitary) -> Self {
        Basis {
            vectors,
            label: BasisLabel::Custom,
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }
}

fn theta(j: usize, n: usize) -> f64 {
    TAU * j as f64 / n as f64
}

/// `ĥ₀` in the angle basis.
///
/// Built from clock and shift operators, `cos(p̂ − b) = (e^{ib} X + e^{−ib} X†)/2`
/// and `cos(φ̂ − φ₀) = (e^{−iφ₀} Z + e^{iφ₀} Z†)/2`, which equals the
/// Fourier-conjugated diagonal form entry for entry.
pub fn build_h0(p: &HarperParams) -> Result<Hermitian> {
    p.validate()?;
    let n = p.n;
    let mut h = ComplexMatrix::zeros(n, n);
    let hop = cis(p.b) * (-p.a / 2.0);
    for j in 0..n {
        h[(j, j)] = C64::new(p.a - p.epsilon * (theta(j, n) - p.phi0).cos(), 0.0);
        // X|j⟩ = |j+1⟩
        let up = (j + 1) % n;
        h[(up, j)] += hop;
        h[(j, up)] += hop.conj();
    }
    Hermitian::new(h)
}

/// Diagonal entries of `ĥ₁(τ)` in the angle basis.
pub fn h1_diagonal(p: &HarperParams, tau: f64) -> Vec<f64> {
    let n = p.n;
    let t = tau - p.tau0;
    (0..n)
        .map(|j| {
            let x = theta(j, n) - p.phi0;
            -p.mu * (x + t).cos() - p.mu_prime * (x - t).cos()
        })
        .collect()
}

/// `ĥ₁(τ)`, diagonal in the angle basis.
pub fn build_h1(p: &HarperParams, tau: f64) -> Result<Hermitian> {
    p.validate()?;
    Ok(Hermitian::from_real_diagonal(&h1_diagonal(p, tau)))
}

/// Eigenvectors of `ĥ₀` ordered by ascending eigenvalue.
pub fn h0_eigenbasis(p: &HarperParams) -> Result<Basis> {
    let eig = eig_hermitian(&build_h0(p)?)?;
    Ok(Basis {
        vectors: eig.eigenvectors,
        label: BasisLabel::H0Eigen,
    })
}

/// Floquet propagator over one period `τ ∈ [0, 2π]` with `n_tau` Strang steps.
pub fn floquet_propagator(p: &HarperParams, n_tau: usize) -> Result<Unitary> {
    p.validate()?;
    split_step(p, &HarperRates::default(), n_tau, n_tau)
}

/// Propagator of a drifting system over `n_periods · 2π`, with
/// `n_tau_per_period` steps per period.
pub fn drift_propagator(s: &DriftSchedule, n_tau_per_period: usize) -> Result<Unitary> {
    s.validate()?;
    let total = n_tau_per_period
        .checked_mul(s.n_periods)
        .ok_or_else(|| Error::invalid("step count overflow"))?;
    split_step(&s.initial, &s.rates, n_tau_per_period, total)
}

/// Kinetic half-step phases `exp(−i (N/n_tau)/2 · a(1 − cos(2πk/N − b)))`
/// in the Fourier basis.
fn kinetic_half(p: &HarperParams, weight: f64, out: &mut [C64]) {
    let n = p.n;
    for (k, z) in out.iter_mut().enumerate() {
        let e = p.a * (1.0 - (theta(k, n) - p.b).cos());
        *z = cis(-0.5 * weight * e);
    }
}

/// Potential + perturbation phases in the angle basis at time `tau`.
fn potential_full(p: &HarperParams, tau: f64, weight: f64, out: &mut [C64]) {
    let n = p.n;
    let t = tau - p.tau0;
    for (j, z) in out.iter_mut().enumerate() {
        let x = theta(j, n) - p.phi0;
        let e = -p.epsilon * x.cos() - p.mu * (x + t).cos() - p.mu_prime * (x - t).cos();
        *z = cis(-weight * e);
    }
}

fn scale_rows(buf: &mut [C64], n: usize, diag: &[C64]) {
    for col in buf.chunks_exact_mut(n) {
        for (z, d) in col.iter_mut().zip(diag) {
            *z *= d;
        }
    }
}

fn split_step(
    initial: &HarperParams,
    rates: &HarperRates,
    n_tau_per_period: usize,
    total_steps: usize,
) -> Result<Unitary> {
    if n_tau_per_period == 0 || total_steps == 0 {
        return Err(Error::invalid("number of Trotter steps must be at least 1"));
    }
    let n = initial.n;
    let dt = TAU / n_tau_per_period as f64;
    // (N/2π)·dt multiplies ĥ in each exponent
    let weight = n as f64 / n_tau_per_period as f64;
    let inv_n = 1.0 / n as f64;

    let ft = FourierTransform::new(n);
    let mut scratch = ft.scratch();
    let mut u = ComplexMatrix::identity(n, n);
    let buf = u.as_mut_slice();

    let kinetic_constant = rates.a == 0.0 && rates.b == 0.0;
    let mut prev_half = vec![ONE; n];
    let mut half = vec![ONE; n];
    let mut merged = vec![ONE; n];
    let mut potential = vec![ONE; n];

    for m in 0..total_steps {
        let tau = (m as f64 + 0.5) * dt;
        let q = initial.drifted(rates, tau);
        if m == 0 || !kinetic_constant {
            kinetic_half(&q, weight, &mut half);
        }
        for k in 0..n {
            let carry = if m == 0 { ONE } else { prev_half[k] };
            merged[k] = carry * half[k] * inv_n;
        }
        ft.forward_unscaled(buf, &mut scratch);
        scale_rows(buf, n, &merged);
        ft.inverse_unscaled(buf, &mut scratch);

        potential_full(&q, tau, weight, &mut potential);
        scale_rows(buf, n, &potential);

        std::mem::swap(&mut prev_half, &mut half);
        if kinetic_constant {
            half.copy_from_slice(&prev_half);
        }
    }
    for k in 0..n {
        merged[k] = prev_half[k] * inv_n;
    }
    ft.forward_unscaled(buf, &mut scratch);
    scale_rows(buf, n, &merged);
    ft.inverse_unscaled(buf, &mut scratch);

    Unitary::new(u)
}
