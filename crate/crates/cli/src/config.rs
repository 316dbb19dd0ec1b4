//! Flat TOML run configuration. Keys mirror the long flag names; a flag
//! given on the command line wins over the file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

/// `shots` is a single budget for `reconstruct`/`estimate` and a grid for
/// `bench`, so the file accepts either form.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ShotsValue {
    One(u64),
    Many(Vec<u64>),
}

impl ShotsValue {
    pub fn into_vec(self) -> Vec<u64> {
        match self {
            ShotsValue::One(m) => vec![m],
            ShotsValue::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub state: Option<String>,
    pub reference: Option<String>,
    pub obs: Option<String>,
    pub sets: Option<String>,
    pub method: Option<String>,
    pub methods: Option<String>,
    pub shots: Option<ShotsValue>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub exact: Option<bool>,
    pub pipeline: Option<bool>,
    pub x_state: Option<bool>,
    pub workers: Option<usize>,
    pub states: Option<usize>,
    pub p_offset: Option<f64>,
    pub n: Option<usize>,
    pub ensemble: Option<String>,
    pub json: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }
}

/// Comma-separated budgets such as `100,1000,10000`.
pub fn parse_shots(text: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| CliError::usage(format!("`{}` is not a shot count", s.trim())))
        })
        .collect()
}
