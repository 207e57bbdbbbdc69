//! JSON experiment configs. Every command reads an optional config file;
//! command-line flags override the `seed` field.

use std::path::Path;

use qsampler_core::diagnostics::SurmiseForm;
use qsampler_core::harper::{default_n_tau, DriftSchedule, HarperParams};
use qsampler_core::samplers::{Fiducial, SamplerSpec};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::CliError;

pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Where a propagator comes from: a named reference system, explicit
/// Floquet parameters, an explicit drift schedule, or a Haar draw.
// no `deny_unknown_fields` on flattened configs: serde does not support the
// combination
#[derive(Clone, Debug, Default, Deserialize)]
pub struct SourceConfig {
    /// `U_Ta`, `U_Tb`, `U_Drift` or `U_Haar`.
    pub source: Option<String>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub params: Option<HarperParams>,
    pub drift: Option<DriftSchedule>,
    /// Steps per period; defaults to `4N`.
    pub n_tau: Option<usize>,
}

/// A resolved propagator source.
#[derive(Clone, Debug)]
pub enum Source {
    Floquet { name: String, params: HarperParams },
    Drift { name: String, schedule: DriftSchedule },
    Haar { n: usize },
}

impl Source {
    pub fn name(&self) -> &str {
        match self {
            Source::Floquet { name, .. } | Source::Drift { name, .. } => name,
            Source::Haar { .. } => "U_Haar",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Source::Floquet { params, .. } => params.n,
            Source::Drift { schedule, .. } => schedule.initial.n,
            Source::Haar { n } => *n,
        }
    }
}

impl SourceConfig {
    pub fn resolve(&self) -> Result<Source, CliError> {
        let given = [self.source.is_some(), self.params.is_some(), self.drift.is_some()]
            .iter()
            .filter(|&&g| g)
            .count();
        if given != 1 {
            return Err(CliError::Config(
                "exactly one of `source`, `params` or `drift` is required".into(),
            ));
        }
        if let Some(p) = self.params {
            return Ok(Source::Floquet { name: "params".into(), params: p });
        }
        if let Some(s) = self.drift {
            return Ok(Source::Drift { name: "drift".into(), schedule: s });
        }
        let name = self.source.clone().unwrap_or_default();
        let n = self
            .n
            .ok_or_else(|| CliError::Config(format!("missing field `N` for source `{name}`")))?;
        Ok(match name.as_str() {
            "U_Ta" => Source::Floquet { name, params: HarperParams::u_ta(n) },
            "U_Tb" => Source::Floquet { name, params: HarperParams::u_tb(n) },
            "U_Drift" => Source::Drift { name, schedule: DriftSchedule::u_drift(n) },
            "U_Haar" => Source::Haar { n },
            _ => {
                return Err(CliError::Config(format!(
                    "unknown source `{name}` (expected U_Ta, U_Tb, U_Drift or U_Haar)"
                )))
            }
        })
    }

    pub fn n_tau(&self, n: usize) -> Result<usize, CliError> {
        match self.n_tau {
            Some(0) => Err(CliError::Config("n_tau must be positive".into())),
            Some(t) => Ok(t),
            None => Ok(default_n_tau(n)),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    /// Little-endian interleaved `f64` pairs plus a JSON header.
    #[default]
    Binary,
    /// JSON array of rows of `[re, im]` pairs.
    Json,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct PropagatorConfig {
    #[serde(flatten)]
    pub source: SourceConfig,
    pub seed: Option<u64>,
    #[serde(default)]
    pub matrix_format: MatrixFormat,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    /// Built-in sampler name.
    pub sampler: Option<String>,
    /// Inline sampler spec.
    pub spec: Option<SamplerSpec>,
    /// Overrides the sampler's dimension.
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub n_pairs: Option<usize>,
    pub n_tau: Option<usize>,
    pub ks: Option<Vec<u32>>,
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Diagnostic {
    Spacing,
    Moments,
    Ipr,
    OpCoefficients,
    Husimi,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisChoice {
    #[default]
    Angle,
    H0,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct DiagnosticsConfig {
    #[serde(flatten)]
    pub source: SourceConfig,
    pub seed: Option<u64>,
    #[serde(default)]
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default)]
    pub basis: BasisChoice,
    /// Parameters whose `ĥ₀` defines the `h0` basis; defaults to the
    /// source's own (initial) parameters, or `U_Ta`'s for Haar sources.
    pub h0_params: Option<HarperParams>,
    pub q: Option<Vec<u32>>,
    pub husimi_resolution: Option<usize>,
    /// Number of eigenstates (lowest quasi-energy first) to map.
    pub husimi_states: Option<usize>,
    #[serde(default)]
    pub surmise_form: SurmiseForm,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoincareConfig {
    /// Classical parameters; `N` plays no role.
    pub params: Option<Fiducial>,
    /// Named reference system (`U_Ta`, `U_Tb`) as an alternative to `params`.
    pub source: Option<String>,
    /// Explicit initial `[φ, p]` pairs.
    pub initials: Option<Vec<[f64; 2]>>,
    /// Number of uniformly drawn initial conditions when `initials` is absent.
    pub n_orbits: Option<usize>,
    pub n_periods: Option<usize>,
    pub steps_per_period: Option<usize>,
    pub seed: Option<u64>,
}

impl PoincareConfig {
    pub fn classical_params(&self) -> Result<HarperParams, CliError> {
        match (&self.params, self.source.as_deref()) {
            (Some(f), None) => Ok(f.params(2)),
            (None, Some("U_Ta")) => Ok(HarperParams::u_ta(2)),
            (None, Some("U_Tb")) => Ok(HarperParams::u_tb(2)),
            (None, Some(other)) => Err(CliError::Config(format!(
                "unknown classical source `{other}` (expected U_Ta or U_Tb)"
            ))),
            _ => Err(CliError::Config("exactly one of `params` or `source` is required".into())),
        }
    }
}
