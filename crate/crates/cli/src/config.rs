//! JSON run configuration. One document describes the problem, the
//! integration settings, and where outputs go; the schema is documented in
//! the repository README.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use carleman_core::{IntegrationConfig, Method, Relift, DEFAULT_DIVERGENCE_NORM_CAP};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_SCALAR_REFERENCE_DT: f64 = 1e-6;
pub const DEFAULT_MECHANISM_REFERENCE_DT: f64 = 1e-10;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Problem,
    pub integration: IntegrationSettings,
    /// Step size for the brute-force reference; defaults to 1e-6 for the
    /// scalar problem and 1e-10 for mechanism problems.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_dt: Option<f64>,
    #[serde(default)]
    pub output: OutputSettings,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Problem {
    /// y' = -alpha y^2 from y(0) = y0.
    Scalar { alpha: f64, y0: f64 },
    /// Isothermal constant-volume mass-action kinetics compiled from a
    /// mechanism file. The mixture comes either from an equivalence ratio
    /// plus a fuel name (air oxidizer unless overridden) or from explicit
    /// mole fractions.
    Mechanism {
        file: PathBuf,
        temperature_k: f64,
        pressure_atm: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        equivalence_ratio: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fuel: Option<String>,
        /// Oxidizer blend as relative mole amounts; defaults to O2:N2 = 21:79.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        oxidizer: Option<BTreeMap<String, f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial_mole_fractions: Option<BTreeMap<String, f64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    ExplicitCarleman,
    ImplicitCarleman,
    JacobianLinearized,
    ReferenceEuler,
}

impl From<MethodName> for Method {
    fn from(m: MethodName) -> Method {
        match m {
            MethodName::ExplicitCarleman => Method::ExplicitCarleman,
            MethodName::ImplicitCarleman => Method::ImplicitCarleman,
            MethodName::JacobianLinearized => Method::JacobianLinearized,
            MethodName::ReferenceEuler => Method::ReferenceEuler,
        }
    }
}

fn default_n_t() -> usize {
    2
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationSettings {
    pub dt: f64,
    pub t_end: f64,
    pub method: MethodName,
    #[serde(default = "default_n_t")]
    pub n_t: usize,
    /// Steps between rebuilds of the lifted state from its readout;
    /// absent or null means the lifted state is never rebuilt.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relift_every: Option<usize>,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence_norm_cap: Option<f64>,
}

impl IntegrationSettings {
    pub fn to_core(&self) -> IntegrationConfig {
        IntegrationConfig {
            dt: self.dt,
            t_end: self.t_end,
            method: self.method.into(),
            n_t: self.n_t,
            relift_every: match self.relift_every {
                None => Relift::Never,
                Some(k) => Relift::Every(k),
            },
            record_stride: self.record_stride,
            divergence_norm_cap: self.divergence_norm_cap.unwrap_or(DEFAULT_DIVERGENCE_NORM_CAP),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    /// Directory for CSV and matrix dumps; default is the working directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Mechanism trajectories are written as per-row-normalized mole
    /// fractions unless this asks for raw concentrations.
    #[serde(default)]
    pub raw_concentrations: bool,
}

impl RunConfig {
    /// Reads, validates, and path-resolves a configuration. Relative
    /// mechanism paths are taken relative to the config file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)?;
        if let Problem::Mechanism { file, .. } = &mut cfg.problem {
            if file.is_relative() {
                if let Some(dir) = path.parent() {
                    *file = dir.join(&file);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match &self.problem {
            Problem::Scalar { alpha, y0 } => {
                if !alpha.is_finite() || !y0.is_finite() {
                    return Err(CliError::Invalid(
                        "scalar problem needs finite alpha and y0".into(),
                    ));
                }
            }
            Problem::Mechanism {
                temperature_k,
                pressure_atm,
                equivalence_ratio,
                fuel,
                initial_mole_fractions,
                ..
            } => {
                if !(temperature_k.is_finite() && *temperature_k > 0.0) {
                    return Err(CliError::Invalid("temperature_k must be positive".into()));
                }
                if !(pressure_atm.is_finite() && *pressure_atm > 0.0) {
                    return Err(CliError::Invalid("pressure_atm must be positive".into()));
                }
                match (equivalence_ratio, initial_mole_fractions) {
                    (Some(phi), None) => {
                        if !(phi.is_finite() && *phi > 0.0) {
                            return Err(CliError::Invalid(
                                "equivalence_ratio must be positive".into(),
                            ));
                        }
                        if fuel.is_none() {
                            return Err(CliError::Invalid(
                                "equivalence_ratio needs a fuel name".into(),
                            ));
                        }
                    }
                    (None, Some(x)) => {
                        if x.is_empty()
                            || x.values().any(|v| !v.is_finite() || *v < 0.0)
                            || x.values().sum::<f64>() <= 0.0
                        {
                            return Err(CliError::Invalid(
                                "initial_mole_fractions must be nonnegative with positive sum"
                                    .into(),
                            ));
                        }
                    }
                    (Some(_), Some(_)) => {
                        return Err(CliError::Invalid(
                            "give either equivalence_ratio or initial_mole_fractions, not both"
                                .into(),
                        ));
                    }
                    (None, None) => {
                        return Err(CliError::Invalid(
                            "mechanism problem needs equivalence_ratio or initial_mole_fractions"
                                .into(),
                        ));
                    }
                }
            }
        }
        if let Some(dt) = self.reference_dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(CliError::Invalid("reference_dt must be positive".into()));
            }
        }
        self.integration.to_core().validate().map_err(CliError::from)
    }

    pub fn reference_dt(&self) -> f64 {
        self.reference_dt.unwrap_or(match self.problem {
            Problem::Scalar { .. } => DEFAULT_SCALAR_REFERENCE_DT,
            Problem::Mechanism { .. } => DEFAULT_MECHANISM_REFERENCE_DT,
        })
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}
