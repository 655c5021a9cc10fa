//! JSON experiment configuration: versioned schema, unknown keys are
//! hard errors, missing fields are reported per mode field-by-field.

use serde::{Deserialize, Serialize};

use hdkde::sim::ExperimentConfig;
use hdkde::SpectralDensity;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// On-disk schema. All experiment fields are optional at parse time;
/// each mode then validates the set it needs and reports every
/// violation at once.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_datasets: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_queries: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Bandwidth grid for the empirical-KL mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_grid: Option<GridSpec>,
    /// Kernel exponents for the empirical-KL mode (defaults to `[gamma]`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    /// Parameters of the REM mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rem: Option<RemConfig>,
}

/// Spectrum as inline atoms or a "λ weight"-per-line text file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        if self.count <= 1 {
            return vec![self.min];
        }
        (0..self.count)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemConfig {
    pub alpha: f64,
    pub d: u32,
    #[serde(default = "default_beta")]
    pub beta: f64,
    pub trials: u64,
}

fn default_beta() -> f64 {
    1.0
}

impl SpectrumSpec {
    pub fn resolve(&self) -> Result<SpectralDensity, CliError> {
        match (&self.atoms, &self.path) {
            (Some(atoms), None) => {
                SpectralDensity::new(atoms.clone()).map_err(CliError::Core)
            }
            (None, Some(path)) => SpectralDensity::from_path(path).map_err(CliError::Core),
            (Some(_), Some(_)) => Err(CliError::Usage(
                "spectrum: give either inline atoms or a path, not both".into(),
            )),
            (None, None) => Err(CliError::Usage(
                "spectrum: needs atoms or a path".into(),
            )),
        }
    }
}

/// Load a config file; a manifest written by a previous run is accepted
/// as well (its embedded resolved config is replayed).
pub fn load(path: &str) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {path} is not valid JSON: {e}")))?;
    let config_value = match value.get("config") {
        Some(inner) => inner.clone(), // manifest replay
        None => value,
    };
    let config: ConfigFile = serde_json::from_value(config_value)
        .map_err(|e| CliError::Usage(format!("config schema violation: {e}")))?;
    if config.version != SCHEMA_VERSION {
        return Err(CliError::Usage(format!(
            "unsupported config version {} (expected {SCHEMA_VERSION})",
            config.version
        )));
    }
    Ok(config)
}

/// Build the simulator configuration for the experiment modes,
/// reporting every missing or invalid field in one message.
pub fn to_experiment(
    config: &ConfigFile,
    seed_override: Option<u64>,
    needs_bandwidth: bool,
) -> Result<(ExperimentConfig, u64), CliError> {
    let mut problems = Vec::new();
    if config.d.is_none() {
        problems.push("d: missing");
    }
    if config.n.is_none() {
        problems.push("n: missing");
    }
    if needs_bandwidth && config.h.is_none() {
        problems.push("h: missing");
    }
    if config.gamma.is_none() {
        problems.push("gamma: missing");
    }
    if config.spectrum.is_none() {
        problems.push("spectrum: missing");
    }
    if config.num_datasets.is_none() {
        problems.push("num_datasets: missing");
    }
    if !problems.is_empty() {
        return Err(CliError::Usage(format!(
            "config is missing required fields:\n  {}",
            problems.join("\n  ")
        )));
    }
    let spectrum = config.spectrum.as_ref().unwrap().resolve()?;
    let seed = seed_override.or(config.seed).unwrap_or(0);
    let experiment = ExperimentConfig {
        d: config.d.unwrap(),
        n: config.n.unwrap(),
        h: config.h.unwrap_or(1.0),
        gamma: config.gamma.unwrap(),
        spectrum,
        num_datasets: config.num_datasets.unwrap(),
        num_queries: config.num_queries.unwrap_or(1),
        seed,
    };
    experiment.validate().map_err(CliError::Core)?;
    Ok((experiment, seed))
}

/// Resolved-config echo for manifests: spectra are inlined so a
/// manifest replays identically even if a referenced file changes.
pub fn resolved_value(
    config: &ConfigFile,
    experiment: Option<&ExperimentConfig>,
    seed: u64,
) -> serde_json::Value {
    let mut resolved = config.clone();
    resolved.seed = Some(seed);
    if let Some(exp) = experiment {
        resolved.d = Some(exp.d);
        resolved.n = Some(exp.n);
        resolved.h = Some(exp.h);
        resolved.gamma = Some(exp.gamma);
        resolved.num_datasets = Some(exp.num_datasets);
        resolved.num_queries = Some(exp.num_queries);
        resolved.spectrum = Some(SpectrumSpec {
            atoms: Some(exp.spectrum.atoms().to_vec()),
            path: None,
        });
    }
    serde_json::to_value(&resolved).expect("config serializes")
}
