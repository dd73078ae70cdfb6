use std::path::{Path, PathBuf};

use gvs_core::suites::SuiteConfig;
use gvs_core::Error;
use serde::Deserialize;

/// JSON configuration. Every field is optional; command-line flags take precedence.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub grid_scale: Option<f64>,
    pub parallel: Option<bool>,
    pub random_cases: Option<usize>,
    pub csv: Option<PathBuf>,
    pub suites: Option<Vec<String>>,
    pub norm: Option<NormConfig>,
    pub semigroup: Option<SemigroupConfig>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    pub space: Option<String>,
    pub f: Option<String>,
    pub p: Option<String>,
    pub q: Option<String>,
    pub alpha: Option<f64>,
    pub k: Option<u32>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupConfig {
    pub f: Option<String>,
    pub t: Option<f64>,
    pub k: Option<u32>,
    pub x: Option<Vec<f64>>,
    pub kind: Option<String>,
    pub path: Option<String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("reading config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::invalid(format!("config {}: {e}", path.display())))
    }

    pub fn suite_config(&self) -> SuiteConfig {
        let d = SuiteConfig::default();
        SuiteConfig {
            seed: self.seed.unwrap_or(d.seed),
            grid_scale: self.grid_scale.unwrap_or(d.grid_scale),
            parallel: self.parallel.unwrap_or(d.parallel),
            random_cases: self.random_cases.unwrap_or(d.random_cases),
        }
    }
}
