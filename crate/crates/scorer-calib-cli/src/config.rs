//! TOML config file support: flat `[train]`, `[synth]`, and `[analysis]`
//! sections whose keys mirror the corresponding flags. Flags override file
//! values; file values override defaults.

use std::path::Path;

use anyhow::Context;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub synth: SynthSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub head: Option<String>,
    pub loss: Option<String>,
    pub lr: Option<f64>,
    pub batch: Option<usize>,
    pub epochs: Option<usize>,
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub d_e: Option<usize>,
    pub kappa: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub scorers: Option<usize>,
    pub pairs: Option<usize>,
    pub responses_per_scorer: Option<usize>,
    pub dim: Option<usize>,
    pub embed_dim: Option<usize>,
    pub categories: Option<usize>,
    pub quality_logit_scale: Option<f64>,
    pub bias_magnitude: Option<f64>,
    pub bias_jitter: Option<f64>,
    pub alpha_jitter: Option<f64>,
    pub shared_pairs: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    pub k: Option<usize>,
    pub seed: Option<u64>,
}

/// Loads and validates a config file before any work starts. A missing
/// `--config` flag yields the empty default config.
pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))
        .map_err(CliError::Data)?;
    toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}
