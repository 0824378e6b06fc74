//! Result emission: CSV tables for plotting and a JSON result document
//! for archival and exact reruns.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

/// Bumped whenever a CSV column set or the document layout changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Git-describe id baked in at compile time.
pub const BUILD_ID: &str = env!("BUILD_ID");

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// One header line, comma-separated, scientific notation
    Csv,
    /// JSON document with config, build id, and results
    Doc,
}

/// Envelope for `--format doc`: everything needed to interpret and
/// exactly rerun the computation.
#[derive(Debug, Serialize)]
pub struct ResultDocument {
    pub schema_version: u32,
    pub command: String,
    pub build: String,
    pub config: serde_json::Value,
    pub duration_seconds: f64,
    pub results: serde_json::Value,
}

/// Floats are emitted with 13 significant digits so every table parses
/// back to within 1e-12 of the in-memory value.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12e}")
    } else {
        v.to_string()
    }
}

/// Optional column cell; absent values stay empty.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}
