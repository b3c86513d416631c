//! Run configuration: a JSON key tree with field-path diagnostics.

use std::fmt;
use std::path::PathBuf;

use nalgebra::DMatrix;
use num_complex::Complex64;
use polariton_core::dynamics::{
    maximally_mixed, pure_state, validate_density_matrix, Integrator, Picture, TimeGrid,
};
use polariton_core::{
    build_basis, rates_from_spectrum, BathTopology, ModelBasis, ModelParams, RateSet,
    SpectralFunction, StateLabel, Variant,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub bath: BathConfig,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

fn default_variant() -> Variant {
    Variant::Corrected
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n_molecules: usize,
    pub omega0: f64,
    pub rabi_splitting: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub topology: BathTopology,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<RatesConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumConfig>,
}

/// Either all five rates, or `seed` alone for a reproducible random draw.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_phi: Option<f64>,
    #[serde(default, rename = "Gamma_a", skip_serializing_if = "Option::is_none")]
    pub big_gamma_a: Option<f64>,
    #[serde(default, rename = "Gamma_e", skip_serializing_if = "Option::is_none")]
    pub big_gamma_e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumConfig {
    Constant(f64),
    /// `[ω, S(ω)]` samples, linearly interpolated.
    Table(Vec<[f64; 2]>),
    Ohmic {
        eta: f64,
        cutoff: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    #[serde(default)]
    pub t_start: f64,
    pub t_end: f64,
    pub n_steps: usize,
    #[serde(default = "default_picture")]
    pub picture: Picture,
    pub initial_state: InitialStateConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tracked: Vec<(StateLabel, StateLabel)>,
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_step: Option<f64>,
}

fn default_picture() -> Picture {
    Picture::Interaction
}

/// A named state, an explicit matrix of `[re, im]` entries, or a list of
/// `[label, [re, im]]` amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialStateConfig {
    Named(String),
    Matrix {
        matrix: Vec<Vec<[f64; 2]>>,
    },
    Superposition {
        superposition: Vec<(StateLabel, [f64; 2])>,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// Malformed or inconsistent configuration, located by its key path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "config: {}", self.message)
        } else {
            write!(f, "config `{}`: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::new(path, e.into_inner().to_string())
    })
}

pub fn to_string(config: &RunConfig) -> String {
    serde_json::to_string_pretty(config).expect("config serialises")
}

/// Rates actually used and the seed they were drawn from, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedRates {
    pub rates: RateSet,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn basis(&self) -> Result<ModelBasis, ConfigError> {
        let m = &self.model;
        ModelParams::new(m.n_molecules, m.omega0, m.rabi_splitting)
            .and_then(build_basis)
            .map_err(|e| ConfigError::new("model", e.to_string()))
    }

    /// `seed_override` replaces a configured seed.
    pub fn rates(
        &self,
        basis: &ModelBasis,
        seed_override: Option<u64>,
    ) -> Result<ResolvedRates, ConfigError> {
        match (&self.bath.rates, &self.bath.spectrum) {
            (Some(_), Some(_)) => Err(ConfigError::new(
                "bath",
                "give exactly one of `rates` and `spectrum`",
            )),
            (None, None) => Err(ConfigError::new("bath", "missing `rates` or `spectrum`")),
            (Some(r), None) => resolve_rates(r, seed_override),
            (None, Some(s)) => {
                let spectrum = match s {
                    SpectrumConfig::Constant(c) => Ok(SpectralFunction::Constant(*c)),
                    SpectrumConfig::Table(samples) => {
                        SpectralFunction::table(samples.iter().map(|p| (p[0], p[1])).collect())
                    }
                    SpectrumConfig::Ohmic { eta, cutoff } => SpectralFunction::ohmic(*eta, *cutoff),
                }
                .map_err(|e| ConfigError::new("bath.spectrum", e.to_string()))?;
                let rates = rates_from_spectrum(&spectrum, basis)
                    .map_err(|e| ConfigError::new("bath.spectrum", e.to_string()))?;
                Ok(ResolvedRates { rates, seed: None })
            }
        }
    }

    pub fn dynamics(&self) -> Result<&DynamicsConfig, ConfigError> {
        self.dynamics
            .as_ref()
            .ok_or_else(|| ConfigError::new("dynamics", "section required"))
    }

    pub fn output(&self) -> OutputConfig {
        self.output.clone().unwrap_or_default()
    }
}

fn resolve_rates(
    r: &RatesConfig,
    seed_override: Option<u64>,
) -> Result<ResolvedRates, ConfigError> {
    let values = [
        r.gamma_a,
        r.gamma_e,
        r.gamma_phi,
        r.big_gamma_a,
        r.big_gamma_e,
    ];
    let names = ["gamma_a", "gamma_e", "gamma_phi", "Gamma_a", "Gamma_e"];
    let given = values.iter().filter(|v| v.is_some()).count();
    match (r.seed, given) {
        (Some(seed), 0) => {
            let seed = seed_override.unwrap_or(seed);
            Ok(ResolvedRates {
                rates: RateSet::random(seed),
                seed: Some(seed),
            })
        }
        (Some(_), _) => Err(ConfigError::new(
            "bath.rates",
            "`seed` excludes explicit rates",
        )),
        (None, 5) => {
            let v: Vec<f64> = values.iter().map(|x| x.unwrap()).collect();
            let rates = RateSet::new(v[0], v[1], v[2], v[3], v[4]).map_err(|e| {
                let field = names
                    .iter()
                    .zip(&v)
                    .find(|(_, x)| !(x.is_finite() && **x >= 0.0))
                    .map_or("", |f| *f.0);
                ConfigError::new(format!("bath.rates.{field}"), e.to_string())
            })?;
            Ok(ResolvedRates { rates, seed: None })
        }
        (None, _) => {
            let missing = names
                .iter()
                .zip(&values)
                .find(|(_, v)| v.is_none())
                .map(|(n, _)| *n)
                .unwrap();
            Err(ConfigError::new(
                format!("bath.rates.{missing}"),
                "missing field (or give `seed`)",
            ))
        }
    }
}

impl DynamicsConfig {
    pub fn grid(&self) -> Result<TimeGrid, ConfigError> {
        TimeGrid::new(self.t_start, self.t_end, self.n_steps)
            .map_err(|e| ConfigError::new("dynamics", e.to_string()))
    }

    pub fn tracked_or_default(&self) -> Vec<(StateLabel, StateLabel)> {
        use StateLabel::*;
        if self.tracked.is_empty() {
            vec![(Plus, Plus), (Minus, Minus), (Plus, Minus)]
        } else {
            self.tracked.clone()
        }
    }

    pub fn check_tracked(&self, basis: &ModelBasis) -> Result<(), ConfigError> {
        for (k, &(a, b)) in self.tracked.iter().enumerate() {
            for label in [a, b] {
                basis.try_index(label).map_err(|e| {
                    ConfigError::new(format!("dynamics.tracked[{k}]"), e.to_string())
                })?;
            }
        }
        Ok(())
    }

    pub fn initial_state(&self, basis: &ModelBasis) -> Result<DMatrix<Complex64>, ConfigError> {
        let here =
            |e: polariton_core::Error| ConfigError::new("dynamics.initial_state", e.to_string());
        let one = Complex64::ONE;
        let rho = match &self.initial_state {
            InitialStateConfig::Named(name) => match name.as_str() {
                "plus_minus_superposition" => {
                    pure_state(basis, &[(StateLabel::Plus, one), (StateLabel::Minus, one)])
                        .map_err(here)?
                }
                "maximally_mixed_excited" => maximally_mixed(basis),
                other => {
                    let label: StateLabel = other
                        .parse()
                        .map_err(|e: String| ConfigError::new("dynamics.initial_state", e))?;
                    pure_state(basis, &[(label, one)]).map_err(here)?
                }
            },
            InitialStateConfig::Superposition { superposition } => {
                let amps: Vec<_> = superposition
                    .iter()
                    .map(|(l, z)| (*l, Complex64::new(z[0], z[1])))
                    .collect();
                pure_state(basis, &amps).map_err(here)?
            }
            InitialStateConfig::Matrix { matrix } => {
                let m = basis.dim();
                if matrix.len() != m || matrix.iter().any(|row| row.len() != m) {
                    return Err(ConfigError::new(
                        "dynamics.initial_state.matrix",
                        format!("expected {m}x{m} entries"),
                    ));
                }
                DMatrix::from_fn(m, m, |i, j| {
                    Complex64::new(matrix[i][j][0], matrix[i][j][1])
                })
            }
        };
        validate_density_matrix(basis, &rho).map_err(here)?;
        Ok(rho)
    }
}
