//! Optional TOML configuration file. Every key mirrors a long flag;
//! precedence is command-line flags, then the file, then built-in
//! defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;
use crate::output::OutputFormat;

/// A scalar or an array in the file, for keys whose flag accepts a
/// comma-separated list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(vs) => vs.clone(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub m: Option<OneOrMany<usize>>,
    pub kind: Option<OneOrMany<String>>,
    pub kinds: Option<OneOrMany<String>>,
    pub nbar: Option<OneOrMany<f64>>,
    pub dwt: Option<f64>,
    pub dtheta: Option<f64>,
    pub trials: Option<u64>,
    pub visibility: Option<f64>,
    pub efficiency: Option<f64>,
    pub transmittance: Option<f64>,
    pub init_hypothesis: Option<String>,
    pub max_events: Option<u64>,
    pub photons_per_bit: Option<f64>,
    #[serde(rename = "ref")]
    pub reference: Option<String>,
    pub hb: Option<bool>,
    pub max_cells: Option<u64>,
    pub dwt_start: Option<f64>,
    pub dwt_stop: Option<f64>,
    pub dwt_points: Option<usize>,
    pub dtheta_start: Option<f64>,
    pub dtheta_stop: Option<f64>,
    pub dtheta_points: Option<usize>,
    pub nbar_start: Option<f64>,
    pub nbar_stop: Option<f64>,
    pub nbar_points: Option<usize>,
    pub log2m_min: Option<u32>,
    pub log2m_max: Option<u32>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
}

/// Extract a single value from a list-capable config key.
pub fn expect_one<T: Clone>(v: &OneOrMany<T>, key: &str) -> Result<T, CliError> {
    match v.to_vec().as_slice() {
        [one] => Ok(one.clone()),
        many => Err(CliError::Config(format!(
            "config key {key} must hold a single value here, got {}",
            many.len()
        ))),
    }
}
