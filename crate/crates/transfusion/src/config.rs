//! Pipeline configuration: a JSON file naming the service endpoints plus
//! batching and projection settings. CLI flags override file values; the
//! `TRANSFUSION_CONFIG` environment variable names a default file path.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use transfusion_core::marker::{MarkerStyle, ParseMode};

/// Environment variable holding the default config path.
pub const CONFIG_ENV_VAR: &str = "TRANSFUSION_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MarkerStyleOpt {
    #[default]
    Xml,
    Square,
}

impl From<MarkerStyleOpt> for MarkerStyle {
    fn from(opt: MarkerStyleOpt) -> Self {
        match opt {
            MarkerStyleOpt::Xml => MarkerStyle::Xml,
            MarkerStyleOpt::Square => MarkerStyle::Square,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionModeOpt {
    #[default]
    Strict,
    Lenient,
}

impl From<ProjectionModeOpt> for ParseMode {
    fn from(opt: ProjectionModeOpt) -> Self {
        match opt {
            ProjectionModeOpt::Strict => ParseMode::Strict,
            ProjectionModeOpt::Lenient => ParseMode::Lenient,
        }
    }
}

fn default_batch_size() -> usize {
    32
}

fn default_max_in_flight() -> usize {
    4
}

/// Service endpoints and pipeline settings.
///
/// Endpoints are base URLs; the client appends `/translate`, `/tag` or
/// `/generate`. Besides `http`/`https` URLs, the `mock:` scheme selects
/// an in-process deterministic backend (see [`crate::backend`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub mt_endpoint: String,
    #[serde(default)]
    pub tagger_endpoints: BTreeMap<String, String>,
    #[serde(default)]
    pub generate_endpoint: Option<String>,
    /// Fusion source languages, in segment order; the first entry is the
    /// primary source.
    pub src_languages: Vec<String>,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
    #[serde(default)]
    pub marker_style: MarkerStyleOpt,
    #[serde(default)]
    pub projection_mode: ProjectionModeOpt,
    /// Forwarded as `Authorization: Bearer ...` on HTTP requests.
    #[serde(default)]
    pub bearer_token: Option<String>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("no config file: pass --config or set {CONFIG_ENV_VAR}")]
    Missing,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let config: PipelineConfig = serde_json::from_str(&text)
            .map_err(|source| ConfigError::Parse { path: path.to_path_buf(), source })?;
        config.validate()?;
        Ok(config)
    }

    /// Loads from an explicit path, falling back to `TRANSFUSION_CONFIG`.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        match explicit {
            Some(path) => Self::load(path),
            None => match std::env::var_os(CONFIG_ENV_VAR) {
                Some(path) => Self::load(Path::new(&path)),
                None => Err(ConfigError::Missing),
            },
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.mt_endpoint.is_empty() {
            return Err(ConfigError::Invalid("mt_endpoint is empty".into()));
        }
        if self.src_languages.is_empty() {
            return Err(ConfigError::Invalid("src_languages is empty".into()));
        }
        for lang in &self.src_languages {
            if !self.tagger_endpoints.contains_key(lang) {
                return Err(ConfigError::Invalid(format!(
                    "source language {lang:?} has no tagger endpoint"
                )));
            }
        }
        if self.batch_size == 0 {
            return Err(ConfigError::Invalid("batch_size must be positive".into()));
        }
        if self.max_in_flight == 0 {
            return Err(ConfigError::Invalid("max_in_flight must be positive".into()));
        }
        Ok(())
    }

    pub fn batch_options(&self) -> crate::pipeline::BatchOptions {
        crate::pipeline::BatchOptions {
            batch_size: self.batch_size,
            max_in_flight: self.max_in_flight,
        }
    }

    /// Primary fusion source language.
    pub fn primary_src_language(&self) -> &str {
        &self.src_languages[0]
    }
}
