//! Distributions over Hamiltonian parameters, pair sampling and k-frame
//! potential estimation.
//!
//! A sampler draws a parameter vector (or drift schedule), builds the
//! corresponding propagator, and repeats this independently for the two
//! members of every pair. Pair `i` uses ChaCha streams `2i` and `2i + 1` of
//! the run seed, so results do not depend on how pairs are scheduled across
//! threads.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harper::{
    default_n_tau, drift_propagator, floquet_propagator, DriftSchedule, HarperParams, HarperRates,
    Param,
};
use crate::linalg::{Unitary, C64};

/// Name of the Haar-random control sampler.
pub const HAAR_CONTROL: &str = "Haar-control";

/// Default frame-potential orders.
pub const DEFAULT_KS: [u32; 3] = [1, 2, 3];

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Unitary {
    let g = DMatrix::<C64>::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        let d = r[(j, j)];
        let norm = d.norm();
        if norm > 0.0 {
            col *= d / norm;
        }
    }
    Unitary::new(q).expect("QR factor of a full-rank matrix is unitary")
}

/// What a distribution assigns: a parameter value or a drift rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ParamTarget {
    Value(Param),
    Rate(Param),
}

impl fmt::Display for ParamTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamTarget::Value(p) => f.write_str(p.name()),
            ParamTarget::Rate(p) => write!(f, "{}_dot", p.name()),
        }
    }
}

impl FromStr for ParamTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.strip_suffix("_dot") {
            Some(base) => Ok(ParamTarget::Rate(base.parse()?)),
            None => Ok(ParamTarget::Value(s.parse()?)),
        }
    }
}

impl TryFrom<String> for ParamTarget {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ParamTarget> for String {
    fn from(t: ParamTarget) -> String {
        t.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DistributionKind {
    Fixed(f64),
    /// Uniform on the half-open interval `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
    /// Uniform on `{2πj/N : j = 0..N−1}` with the sampler's own `N`.
    Grid,
}

/// One entry of a sampler's distribution list.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct ParamDistribution {
    pub target: ParamTarget,
    pub kind: DistributionKind,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistribution {
    target: ParamTarget,
    kind: String,
    #[serde(default)]
    args: Vec<f64>,
}

impl TryFrom<RawDistribution> for ParamDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        let kind = match (raw.kind.as_str(), raw.args.as_slice()) {
            ("fixed", &[v]) => DistributionKind::Fixed(v),
            ("uniform", &[lo, hi]) => DistributionKind::Uniform { lo, hi },
            ("grid", &[]) => DistributionKind::Grid,
            (k @ ("fixed" | "uniform" | "grid"), args) => {
                return Err(Error::invalid(format!(
                    "distribution `{k}` for {} has {} argument(s)",
                    raw.target,
                    args.len()
                )))
            }
            (k, _) => return Err(Error::invalid(format!("unknown distribution kind `{k}`"))),
        };
        let d = ParamDistribution { target: raw.target, kind };
        d.validate()?;
        Ok(d)
    }
}

impl From<ParamDistribution> for RawDistribution {
    fn from(d: ParamDistribution) -> Self {
        let (kind, args) = match d.kind {
            DistributionKind::Fixed(v) => ("fixed", vec![v]),
            DistributionKind::Uniform { lo, hi } => ("uniform", vec![lo, hi]),
            DistributionKind::Grid => ("grid", vec![]),
        };
        RawDistribution {
            target: d.target,
            kind: kind.to_string(),
            args,
        }
    }
}

impl ParamDistribution {
    pub fn fixed(target: ParamTarget, value: f64) -> Self {
        ParamDistribution { target, kind: DistributionKind::Fixed(value) }
    }

    pub fn uniform(target: ParamTarget, lo: f64, hi: f64) -> Self {
        ParamDistribution { target, kind: DistributionKind::Uniform { lo, hi } }
    }

    pub fn grid(target: ParamTarget) -> Self {
        ParamDistribution { target, kind: DistributionKind::Grid }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            DistributionKind::Fixed(v) if !v.is_finite() => {
                Err(Error::invalid(format!("fixed value of {} is not finite", self.target)))
            }
            DistributionKind::Uniform { lo, hi } if !(lo.is_finite() && hi.is_finite() && lo < hi) => {
                Err(Error::invalid(format!("uniform range of {} needs lo < hi", self.target)))
            }
            _ => Ok(()),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> f64 {
        match self.kind {
            DistributionKind::Fixed(v) => v,
            DistributionKind::Uniform { lo, hi } => rng.random_range(lo..hi),
            DistributionKind::Grid => TAU * rng.random_range(0..n) as f64 / n as f64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerMode {
    Floquet,
    Drift,
}

/// Fiducial parameter values; anything unspecified is zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fiducial {
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
    pub mu: f64,
    pub mu_prime: f64,
    pub phi0: f64,
    pub tau0: f64,
    #[serde(skip_serializing_if = "HarperRates::is_zero")]
    pub rates: HarperRates,
}

impl Fiducial {
    pub fn params(&self, n: usize) -> HarperParams {
        HarperParams {
            n,
            a: self.a,
            b: self.b,
            epsilon: self.epsilon,
            mu: self.mu,
            mu_prime: self.mu_prime,
            phi0: self.phi0,
            tau0: self.tau0,
        }
    }
}

/// A named family of Hamiltonians with randomized parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    pub name: String,
    pub mode: SamplerMode,
    #[serde(rename = "N")]
    pub n: usize,
    pub fiducial: Fiducial,
    #[serde(default)]
    pub distributions: Vec<ParamDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_periods: Option<usize>,
}

impl SamplerSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidDimension(self.n));
        }
        let mut seen = Vec::with_capacity(self.distributions.len());
        for d in &self.distributions {
            d.validate()?;
            if seen.contains(&d.target) {
                return Err(Error::invalid(format!("{} is distributed more than once", d.target)));
            }
            seen.push(d.target);
        }
        match self.mode {
            SamplerMode::Floquet => {
                if self.n_periods.is_some() {
                    return Err(Error::invalid("n_periods only applies to drift samplers"));
                }
                if !self.fiducial.rates.is_zero()
                    || seen.iter().any(|t| matches!(t, ParamTarget::Rate(_)))
                {
                    return Err(Error::invalid("drift rates only apply to drift samplers"));
                }
                self.fiducial.params(self.n).validate()
            }
            SamplerMode::Drift => match self.n_periods {
                Some(0) | None => Err(Error::invalid("drift samplers need n_periods >= 1")),
                Some(_) => self.fiducial_schedule().validate(),
            },
        }
    }

    fn fiducial_schedule(&self) -> DriftSchedule {
        DriftSchedule {
            initial: self.fiducial.params(self.n),
            rates: self.fiducial.rates,
            n_periods: self.n_periods.unwrap_or(1),
        }
    }
}

/// One parameter draw from a sampler.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Draw {
    Floquet(HarperParams),
    Drift(DriftSchedule),
}

impl Draw {
    /// Propagator of the drawn Hamiltonian with `n_tau` steps per period.
    pub fn propagator(&self, n_tau: usize) -> Result<Unitary> {
        match self {
            Draw::Floquet(p) => floquet_propagator(p, n_tau),
            Draw::Drift(s) => drift_propagator(s, n_tau),
        }
    }
}

/// Overrides the fiducial values with one draw per distribution, in list order.
pub fn draw_params<R: Rng + ?Sized>(spec: &SamplerSpec, rng: &mut R) -> Draw {
    let mut schedule = spec.fiducial_schedule();
    for d in &spec.distributions {
        let v = d.draw(spec.n, rng);
        match d.target {
            ParamTarget::Value(p) => schedule.initial.set(p, v),
            ParamTarget::Rate(p) => schedule.rates.set(p, v),
        }
    }
    match spec.mode {
        SamplerMode::Floquet => Draw::Floquet(schedule.initial),
        SamplerMode::Drift => Draw::Drift(schedule),
    }
}

/// Either the Haar-random control or a Hamiltonian family.
#[derive(Clone, Debug, PartialEq)]
pub enum Sampler {
    Haar { n: usize },
    Harper(SamplerSpec),
}

impl Sampler {
    pub fn name(&self) -> &str {
        match self {
            Sampler::Haar { .. } => HAAR_CONTROL,
            Sampler::Harper(s) => &s.name,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Sampler::Haar { n } => *n,
            Sampler::Harper(s) => s.n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Sampler::Haar { n: 0 } => Err(Error::InvalidDimension(0)),
            Sampler::Haar { .. } => Ok(()),
            Sampler::Harper(s) => s.validate(),
        }
    }

    /// One random unitary; `n_tau` is ignored by the Haar control.
    pub fn generate<R: Rng + ?Sized>(&self, n_tau: usize, rng: &mut R) -> Result<Unitary> {
        match self {
            Sampler::Haar { n } => Ok(haar_unitary(*n, rng)),
            Sampler::Harper(s) => draw_params(s, rng).propagator(n_tau),
        }
    }

    /// Default steps per period: `4N`.
    pub fn default_n_tau(&self) -> usize {
        default_n_tau(self.dim())
    }
}

/// RNG substream `stream` of the run seeded by `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `z_i = |tr(U_i V_i†)|²` for `n_pairs` independent pairs.
pub fn sample_pair_traces(
    sampler: &Sampler,
    n_pairs: usize,
    seed: u64,
    n_tau: usize,
) -> Result<Vec<f64>> {
    if n_pairs == 0 {
        return Err(Error::invalid("n_pairs must be at least 1"));
    }
    sampler.validate()?;
    (0..n_pairs as u64)
        .into_par_iter()
        .map(|i| {
            let u = sampler.generate(n_tau, &mut substream(seed, 2 * i))?;
            let v = sampler.generate(n_tau, &mut substream(seed, 2 * i + 1))?;
            Ok(u.trace_inner(&v).norm_sqr())
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FramePotentialEstimate {
    pub k: u32,
    pub value: f64,
    pub std_err: f64,
    pub n_pairs: usize,
}

/// `F^(k) = ⟨z^k⟩` with standard error `√(⟨z^{2k}⟩ − ⟨z^k⟩²)/√n`.
pub fn frame_potentials(z: &[f64], ks: &[u32]) -> Result<Vec<FramePotentialEstimate>> {
    if z.is_empty() {
        return Err(Error::invalid("no pair traces to average"));
    }
    let n = z.len() as f64;
    ks.iter()
        .map(|&k| {
            if k == 0 {
                return Err(Error::invalid("frame-potential order must be positive"));
            }
            let powers: Vec<f64> = z.iter().map(|x| x.powi(k as i32)).collect();
            let value = powers.iter().sum::<f64>() / n;
            // two-pass variance avoids cancellation when z^k is large
            let var = powers.iter().map(|x| (x - value).powi(2)).sum::<f64>() / n;
            Ok(FramePotentialEstimate {
                k,
                value,
                std_err: (var / n).sqrt(),
                n_pairs: z.len(),
            })
        })
        .collect()
}

pub fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonEntry {
    pub k: u32,
    /// `√max(F^(k) − k!, 0)`.
    pub epsilon: f64,
    /// `√σ_k`.
    pub error_floor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonReport {
    pub entries: Vec<EpsilonEntry>,
}

pub fn epsilon_report(estimates: &[FramePotentialEstimate]) -> EpsilonReport {
    EpsilonReport {
        entries: estimates
            .iter()
            .map(|e| EpsilonEntry {
                k: e.k,
                epsilon: (e.value - factorial(e.k)).max(0.0).sqrt(),
                error_floor: e.std_err.sqrt(),
            })
            .collect(),
    }
}

/// Flat record for JSON output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub sampler: String,
    pub k: u32,
    #[serde(rename = "F")]
    pub f: f64,
    pub sigma: f64,
    pub n_pairs: usize,
    pub seed: u64,
}

pub fn estimate_records(
    sampler: &str,
    seed: u64,
    estimates: &[FramePotentialEstimate],
) -> Vec<EstimateRecord> {
    estimates
        .iter()
        .map(|e| EstimateRecord {
            sampler: sampler.to_string(),
            k: e.k,
            f: e.value,
            sigma: e.std_err,
            n_pairs: e.n_pairs,
            seed,
        })
        .collect()
}

fn floquet_fiducial() -> Fiducial {
    Fiducial {
        a: 3.0,
        epsilon: 3.0,
        mu: 3.0,
        mu_prime: 3.1,
        ..Fiducial::default()
    }
}

fn drift_fiducial() -> Fiducial {
    Fiducial {
        a: 3.0,
        epsilon: 3.01,
        mu: 1.0,
        mu_prime: 0.5,
        rates: HarperRates {
            mu: 0.1,
            mu_prime: 0.15,
            ..HarperRates::default()
        },
        ..Fiducial::default()
    }
}

fn floquet(name: &str, n: usize, distributions: Vec<ParamDistribution>) -> SamplerSpec {
    SamplerSpec {
        name: name.to_string(),
        mode: SamplerMode::Floquet,
        n,
        fiducial: floquet_fiducial(),
        distributions,
        n_periods: None,
    }
}

fn drift(name: &str, distributions: Vec<ParamDistribution>) -> SamplerSpec {
    SamplerSpec {
        name: name.to_string(),
        mode: SamplerMode::Drift,
        n: 51,
        fiducial: drift_fiducial(),
        distributions,
        n_periods: Some(3),
    }
}

/// The built-in Floquet and drift samplers.
pub fn builtin_samplers() -> Vec<SamplerSpec> {
    use ParamTarget::{Rate, Value};
    let u = ParamDistribution::uniform;
    let grid = ParamDistribution::grid;
    let b = Value(Param::B);
    let phi = Value(Param::Phi0);
    let tau = Value(Param::Tau0);
    let mu = Value(Param::Mu);
    let mup = Value(Param::MuPrime);
    let angle = |t| u(t, 0.0, TAU);
    let strong = || vec![angle(b), angle(tau), u(mu, 3.0, 6.0), u(mup, 3.1, 5.1)];
    let mu_dot = u(Rate(Param::Mu), 0.1, 0.6);
    vec![
        floquet("Cmumup", 51, vec![u(mu, 3.0, 7.0), u(mup, 3.1, 7.1)]),
        floquet("Dbphi", 51, vec![grid(b), grid(phi)]),
        floquet("Dbtau", 51, vec![grid(b), grid(tau)]),
        floquet("Cbphi", 51, vec![angle(b), angle(phi)]),
        floquet("Cbtau", 51, vec![angle(b), angle(tau)]),
        floquet("Ctaumu", 51, vec![angle(tau), u(mu, 3.0, 6.0)]),
        floquet("Cbphimu", 51, vec![angle(b), angle(phi), u(mu, 3.0, 6.0)]),
        floquet("Cbtaumu", 51, vec![angle(b), angle(tau), u(mu, 3.0, 6.0)]),
        floquet("C1btaumumup", 51, strong()),
        floquet("C2btaumumup", 30, strong()),
        floquet("C3btaumumup", 70, strong()),
        floquet(
            "C4btaumumup",
            51,
            vec![angle(b), angle(tau), u(mu, 1.0, 4.0), u(mup, 0.0, 2.0)],
        ),
        drift("Dr1bdotmudot", vec![u(Rate(Param::B), 0.0, 0.1), mu_dot]),
        drift("Dr2bmudot", vec![angle(b), mu_dot]),
        drift("Dr3taumudot", vec![angle(tau), mu_dot]),
        drift(
            "Dr4taumudot",
            vec![ParamDistribution::fixed(Rate(Param::B), 0.1), angle(tau), mu_dot],
        ),
        drift(
            "Dr5taumudotmupdot",
            vec![angle(tau), mu_dot, u(Rate(Param::MuPrime), 0.15, 0.65)],
        ),
    ]
}

/// Looks up a built-in sampler; `Haar-control` uses `N = 51`.
pub fn sampler_by_name(name: &str) -> Result<Sampler> {
    if name == HAAR_CONTROL {
        return Ok(Sampler::Haar { n: 51 });
    }
    builtin_samplers()
        .into_iter()
        .find(|s| s.name == name)
        .map(Sampler::Harper)
        .ok_or_else(|| Error::UnknownSampler(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_defect;

    fn degenerate(n: usize) -> SamplerSpec {
        floquet("fixed", n, vec![])
    }

    #[test]
    fn haar_is_unitary() {
        let mut rng = substream(1, 0);
        for n in [1, 2, 17, 81] {
            assert!(unitarity_defect(haar_unitary(n, &mut rng).matrix()) < 1e-10);
        }
    }

    #[test]
    fn haar_first_moment() {
        let n = 16;
        let mut rng = substream(7, 0);
        let draws = 10_000;
        let xs: Vec<f64> = (0..draws)
            .map(|_| haar_unitary(n, &mut rng).matrix()[(0, 0)].norm_sqr())
            .collect();
        let mean = xs.iter().sum::<f64>() / draws as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / draws as f64;
        let se = (var / draws as f64).sqrt();
        assert!((mean - 1.0 / n as f64).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn all_fixed_draw_is_fiducial() {
        let spec = degenerate(11);
        let mut rng = substream(0, 0);
        assert_eq!(draw_params(&spec, &mut rng), Draw::Floquet(floquet_fiducial().params(11)));
    }

    #[test]
    fn grid_draws_are_on_grid() {
        let spec = sampler_by_name("Dbphi").unwrap();
        let Sampler::Harper(spec) = spec else { unreachable!() };
        let mut rng = substream(3, 0);
        for _ in 0..200 {
            let Draw::Floquet(p) = draw_params(&spec, &mut rng) else { unreachable!() };
            for x in [p.b, p.phi0] {
                let j = x * 51.0 / TAU;
                assert!((j - j.round()).abs() < 1e-12 && (0.0..51.0).contains(&j.round()));
            }
            assert_eq!(p.tau0, 0.0);
        }
    }

    #[test]
    fn uniform_draws_in_range_and_uniform() {
        let spec = floquet("mu", 11, vec![ParamDistribution::uniform(ParamTarget::Value(Param::Mu), 3.0, 7.0)]);
        let mut rng = substream(5, 0);
        let xs: Vec<f64> = (0..10_000)
            .map(|_| match draw_params(&spec, &mut rng) {
                Draw::Floquet(p) => p.mu,
                Draw::Drift(_) => unreachable!(),
            })
            .collect();
        assert!(xs.iter().all(|&x| (3.0..7.0).contains(&x)));
        let d = crate::diagnostics::ks_distance(&xs, |x| ((x - 3.0) / 4.0).clamp(0.0, 1.0));
        // 1% critical value of the KS statistic at n = 10⁴
        assert!(d < 1.63 / 100.0, "KS distance {d}");
    }

    #[test]
    fn degenerate_sampler_gives_n_squared() {
        let n = 9;
        let z = sample_pair_traces(&Sampler::Harper(degenerate(n)), 5, 1, 36).unwrap();
        for x in z {
            assert!((x - (n * n) as f64).abs() < 1e-8);
        }
    }

    #[test]
    fn traces_are_seed_deterministic_and_bounded() {
        let s = Sampler::Harper(SamplerSpec { n: 13, ..match sampler_by_name("C1btaumumup").unwrap() {
            Sampler::Harper(s) => s,
            _ => unreachable!(),
        } });
        let a = sample_pair_traces(&s, 6, 42, 52).unwrap();
        let b = sample_pair_traces(&s, 6, 42, 52).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|&z| (0.0..=169.0 + 1e-9).contains(&z)));
        assert_ne!(a, sample_pair_traces(&s, 6, 43, 52).unwrap());
    }

    #[test]
    fn traces_do_not_depend_on_thread_count() {
        let s = Sampler::Haar { n: 6 };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let two = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| sample_pair_traces(&s, 20, 9, 0)).unwrap();
        let b = two.install(|| sample_pair_traces(&s, 20, 9, 0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn frame_potential_hand_values() {
        let ones = frame_potentials(&[1.0; 8], &[1, 2, 3]).unwrap();
        assert!(ones.iter().all(|e| e.value == 1.0 && e.std_err == 0.0));
        let e = frame_potentials(&[0.0, 2.0], &[1]).unwrap()[0];
        assert_eq!(e.value, 1.0);
        assert!((e.std_err - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(frame_potentials(&[], &[1]).is_err());
        assert!(frame_potentials(&[1.0], &[0]).is_err());
    }

    #[test]
    fn epsilon_of_exact_haar_values_is_zero() {
        let est: Vec<_> = (1..=3)
            .map(|k| FramePotentialEstimate { k, value: factorial(k), std_err: 0.04, n_pairs: 10 })
            .collect();
        let r = epsilon_report(&est);
        assert!(r.entries.iter().all(|e| e.epsilon == 0.0 && (e.error_floor - 0.2).abs() < 1e-15));
    }

    #[test]
    fn builtin_roster() {
        let all = builtin_samplers();
        assert_eq!(all.len(), 17);
        for s in &all {
            s.validate().unwrap();
        }
        let get = |name: &str| all.iter().find(|s| s.name == name).unwrap();
        assert_eq!(get("C2btaumumup").n, 30);
        assert_eq!(get("C3btaumumup").n, 70);
        let c4 = &get("C4btaumumup").distributions;
        assert!(c4.contains(&ParamDistribution::uniform(ParamTarget::Value(Param::Mu), 1.0, 4.0)));
        assert!(c4.contains(&ParamDistribution::uniform(ParamTarget::Value(Param::MuPrime), 0.0, 2.0)));
        let dr2 = get("Dr2bmudot");
        assert_eq!(dr2.mode, SamplerMode::Drift);
        assert_eq!(
            dr2.distributions,
            vec![
                ParamDistribution::uniform(ParamTarget::Value(Param::B), 0.0, TAU),
                ParamDistribution::uniform(ParamTarget::Rate(Param::Mu), 0.1, 0.6),
            ]
        );
        assert!(matches!(sampler_by_name("nope"), Err(Error::UnknownSampler(_))));
        assert_eq!(sampler_by_name(HAAR_CONTROL).unwrap(), Sampler::Haar { n: 51 });
    }

    #[test]
    fn spec_json_round_trip() {
        for s in builtin_samplers() {
            let text = serde_json::to_string(&s).unwrap();
            let back: SamplerSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(back, s);
        }
        let text = r#"{"name":"x","mode":"drift","N":21,"n_periods":2,
            "fiducial":{"a":3,"epsilon":3,"rates":{"mu":0.2}},
            "distributions":[{"target":"tau0","kind":"grid"},{"target":"mu_prime_dot","kind":"uniform","args":[0,1]}]}"#;
        let s: SamplerSpec = serde_json::from_str(text).unwrap();
        s.validate().unwrap();
        assert_eq!(s.distributions[1].target, ParamTarget::Rate(Param::MuPrime));
    }

    #[test]
    fn spec_validation_errors() {
        let mut s = degenerate(11);
        s.distributions = vec![
            ParamDistribution::grid(ParamTarget::Value(Param::B)),
            ParamDistribution::fixed(ParamTarget::Value(Param::B), 1.0),
        ];
        assert!(s.validate().is_err());
        s.distributions = vec![ParamDistribution::fixed(ParamTarget::Rate(Param::B), 1.0)];
        assert!(s.validate().is_err());
        s.distributions = vec![ParamDistribution::uniform(ParamTarget::Value(Param::Mu), 2.0, 2.0)];
        assert!(s.validate().is_err());
        let bad = r#"{"target":"mu","kind":"uniform","args":[1]}"#;
        assert!(serde_json::from_str::<ParamDistribution>(bad).is_err());
        let bad = r#"{"target":"zeta","kind":"grid"}"#;
        assert!(serde_json::from_str::<ParamDistribution>(bad).is_err());
    }
}
