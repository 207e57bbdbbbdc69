//! Classical limit of the perturbed Harper model on the torus.
//!
//! `H(φ, p, τ) = a(1 − cos(p − b)) − ε cos(φ − φ₀)
//!              − μ cos(φ − φ₀ + τ − τ₀) − μ′ cos(φ − φ₀ − τ + τ₀)`
//!
//! The Hamiltonian is separable, so a kick-drift-kick splitting integrates
//! it symplectically: the drift in `φ` is exact for fixed `p`, and each kick
//! in `p` is exact for fixed `φ` and `τ`. The default scheme composes three
//! such steps with Yoshida's weights, which is fourth order and keeps both
//! symplecticity and time reversibility.

use std::f64::consts::TAU;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harper::HarperParams;
use crate::linalg::wrap_angle;

/// Smallest accepted step count per perturbation period.
pub const MIN_STEPS_PER_PERIOD: usize = 100;
pub const DEFAULT_STEPS_PER_PERIOD: usize = 1000;

/// A point `(φ, p)` on the torus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub phi: f64,
    pub p: f64,
}

impl PhasePoint {
    /// Reduces both coordinates into `[0, 2π)`.
    pub fn new(phi: f64, p: f64) -> Self {
        PhasePoint {
            phi: wrap_angle(phi),
            p: wrap_angle(p),
        }
    }
}

/// Full time-dependent classical Hamiltonian.
pub fn hamiltonian(x: PhasePoint, tau: f64, p: &HarperParams) -> f64 {
    h0_energy(x, p) + perturbation(x.phi, tau, p)
}

/// The unperturbed part `H₀(φ, p)`.
pub fn h0_energy(x: PhasePoint, p: &HarperParams) -> f64 {
    p.a * (1.0 - (x.p - p.b).cos()) - p.epsilon * (x.phi - p.phi0).cos()
}

fn perturbation(phi: f64, tau: f64, p: &HarperParams) -> f64 {
    let x = phi - p.phi0;
    let t = tau - p.tau0;
    -p.mu * (x + t).cos() - p.mu_prime * (x - t).cos()
}

/// `∂H/∂p`
fn velocity(mom: f64, p: &HarperParams) -> f64 {
    p.a * (mom - p.b).sin()
}

/// `−∂H/∂φ`
fn force(phi: f64, tau: f64, p: &HarperParams) -> f64 {
    let x = phi - p.phi0;
    let t = tau - p.tau0;
    -p.epsilon * x.sin() - p.mu * (x + t).sin() - p.mu_prime * (x - t).sin()
}

/// Hamilton's equations: `(dφ/dτ, dp/dτ) = (∂H/∂p, −∂H/∂φ)`.
pub fn classical_eom(x: PhasePoint, tau: f64, p: &HarperParams) -> (f64, f64) {
    (velocity(x.p, p), force(x.phi, tau, p))
}

/// `(ω₀, λ) = (√(aε), 1/√(aε))`: libration frequency at the stable fixed
/// point and the ratio of the (unit) perturbation frequency to it.
pub fn libration_ratio(p: &HarperParams) -> Result<(f64, f64)> {
    let product = p.a * p.epsilon;
    if product.is_nan() || product <= 0.0 {
        return Err(Error::Domain(format!(
            "libration frequency needs a·ε > 0, got {product}"
        )));
    }
    let omega0 = product.sqrt();
    Ok((omega0, 1.0 / omega0))
}

/// One kick-drift-kick step of length `dt` starting at time `tau`, on
/// unwrapped coordinates. A negative `dt` retraces the step exactly.
#[inline]
fn kdk_step(phi: &mut f64, mom: &mut f64, tau: f64, dt: f64, p: &HarperParams) {
    *mom += 0.5 * dt * force(*phi, tau, p);
    *phi += dt * velocity(*mom, p);
    *mom += 0.5 * dt * force(*phi, tau + dt, p);
}

/// Symmetric composition `w₁, w₀, w₁` of kick-drift-kick steps.
#[inline]
fn yoshida4_step(phi: &mut f64, mom: &mut f64, tau: f64, dt: f64, p: &HarperParams) {
    let cbrt2 = 2f64.cbrt();
    let w1 = 1.0 / (2.0 - cbrt2);
    let w0 = -cbrt2 * w1;
    kdk_step(phi, mom, tau, w1 * dt, p);
    kdk_step(phi, mom, tau + w1 * dt, w0 * dt, p);
    kdk_step(phi, mom, tau + (w1 + w0) * dt, w1 * dt, p);
}

/// Splitting scheme used by [`Integrator`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Plain kick-drift-kick, second order.
    Leapfrog,
    /// Three leapfrog substeps per step, fourth order.
    #[default]
    Yoshida4,
}

/// Symplectic integrator on a fixed time grid.
#[derive(Clone, Copy, Debug)]
pub struct Integrator {
    pub params: HarperParams,
    pub steps_per_period: usize,
    pub scheme: Scheme,
}

impl Integrator {
    pub fn new(params: HarperParams, steps_per_period: usize) -> Result<Self> {
        if steps_per_period < MIN_STEPS_PER_PERIOD {
            return Err(Error::invalid(format!(
                "steps_per_period must be at least {MIN_STEPS_PER_PERIOD}, got {steps_per_period}"
            )));
        }
        Ok(Integrator {
            params,
            steps_per_period,
            scheme: Scheme::default(),
        })
    }

    pub fn with_scheme(self, scheme: Scheme) -> Self {
        Integrator { scheme, ..self }
    }

    #[inline]
    fn step(&self, phi: &mut f64, mom: &mut f64, tau: f64, dt: f64) {
        match self.scheme {
            Scheme::Leapfrog => kdk_step(phi, mom, tau, dt, &self.params),
            Scheme::Yoshida4 => yoshida4_step(phi, mom, tau, dt, &self.params),
        }
    }

    pub fn dt(&self) -> f64 {
        TAU / self.steps_per_period as f64
    }

    /// Advances `(φ, p)` (unwrapped) by `steps` steps from time `tau`.
    /// Returns the final time.
    pub fn advance(&self, phi: &mut f64, mom: &mut f64, tau: f64, steps: usize) -> f64 {
        let dt = self.dt();
        for s in 0..steps {
            self.step(phi, mom, tau + s as f64 * dt, dt);
        }
        tau + steps as f64 * dt
    }

    /// Inverse of [`Integrator::advance`]: runs the same grid backwards from
    /// time `tau`.
    pub fn retreat(&self, phi: &mut f64, mom: &mut f64, tau: f64, steps: usize) -> f64 {
        let dt = self.dt();
        for s in 0..steps {
            self.step(phi, mom, tau - s as f64 * dt, -dt);
        }
        tau - steps as f64 * dt
    }

    /// Occupancy of a `grid × grid` partition by the whole trajectory,
    /// sampled after every step for `n_periods` periods.
    pub fn trajectory_occupancy(&self, start: PhasePoint, n_periods: usize, grid: usize) -> f64 {
        assert!(grid > 0, "grid must be positive");
        let mut seen = vec![false; grid * grid];
        let (mut phi, mut mom) = (start.phi, start.p);
        for period in 0..n_periods {
            let mut tau = TAU * period as f64;
            for _ in 0..self.steps_per_period {
                tau = self.advance(&mut phi, &mut mom, tau, 1);
                let x = PhasePoint::new(phi, mom);
                seen[cell(x.phi, grid) * grid + cell(x.p, grid)] = true;
            }
        }
        seen.iter().filter(|&&s| s).count() as f64 / (grid * grid) as f64
    }

    /// Largest `|H₀(τ) − H₀(0)|` seen at every step of an orbit. Only a
    /// conservation measure when `μ = μ′ = 0`.
    pub fn max_h0_drift(&self, start: PhasePoint, n_periods: usize) -> f64 {
        let e0 = h0_energy(start, &self.params);
        let (mut phi, mut mom) = (start.phi, start.p);
        let mut tau = 0.0;
        let mut worst = 0.0f64;
        for _ in 0..n_periods * self.steps_per_period {
            tau = self.advance(&mut phi, &mut mom, tau, 1);
            let e = h0_energy(PhasePoint { phi, p: mom }, &self.params);
            worst = worst.max((e - e0).abs());
        }
        worst
    }
}

/// One orbit of a stroboscopic map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub initial: PhasePoint,
    /// Points at `τ = 2πn`, `n = 1..=n_periods`, reduced mod 2π.
    pub points: Vec<PhasePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareSection {
    pub orbits: Vec<Orbit>,
    pub params: HarperParams,
}

impl PoincareSection {
    /// Writes `orbit_id,n,phi,p` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "orbit_id,n,phi,p")?;
        for (id, orbit) in self.orbits.iter().enumerate() {
            for (i, x) in orbit.points.iter().enumerate() {
                writeln!(w, "{},{},{:.17e},{:.17e}", id, i + 1, x.phi, x.p)?;
            }
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        self.orbits.iter().map(|o| o.points.len()).sum()
    }
}

/// Stroboscopic section: each orbit is integrated for `n_periods` periods and
/// recorded once per period.
pub fn poincare_section(
    initials: &[PhasePoint],
    params: &HarperParams,
    n_periods: usize,
    steps_per_period: usize,
) -> Result<PoincareSection> {
    if n_periods == 0 {
        return Err(Error::invalid("n_periods must be at least 1"));
    }
    let integ = Integrator::new(*params, steps_per_period)?;
    let orbits = initials
        .iter()
        .map(|&start| {
            let (mut phi, mut mom) = (start.phi, start.p);
            let mut points = Vec::with_capacity(n_periods);
            for period in 0..n_periods {
                // restart from the exact period boundary to avoid accumulating
                // rounding in τ
                integ.advance(&mut phi, &mut mom, TAU * period as f64, steps_per_period);
                points.push(PhasePoint::new(phi, mom));
            }
            Orbit {
                initial: start,
                points,
            }
        })
        .collect();
    Ok(PoincareSection {
        orbits,
        params: *params,
    })
}

fn cell(x: f64, grid: usize) -> usize {
    ((x / TAU * grid as f64) as usize).min(grid - 1)
}

/// Fraction of cells of a `grid × grid` partition of the torus visited by at
/// least one point.
pub fn occupancy_fraction<'a>(points: impl IntoIterator<Item = &'a PhasePoint>, grid: usize) -> f64 {
    assert!(grid > 0, "grid must be positive");
    let mut seen = vec![false; grid * grid];
    for x in points {
        seen[cell(x.phi, grid) * grid + cell(x.p, grid)] = true;
    }
    seen.iter().filter(|&&s| s).count() as f64 / (grid * grid) as f64
}
