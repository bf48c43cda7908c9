use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_PATHS: u64 = 10_000;
pub const DEFAULT_STEPS: u64 = 10_000;
/// Hitting-time horizon in units of the level-one mean time scale; the
/// inradius row uses four times this.
pub const DEFAULT_HORIZON: f64 = 5.0;

/// Keys accepted in a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub paths: Option<u64>,
    pub steps: Option<u64>,
    pub horizon: Option<f64>,
    pub level: Option<f64>,
    pub format: Option<String>,
    pub tol: Option<f64>,
    pub threads: Option<u32>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Run settings after merging flags and environment (already combined by the
/// argument parser), the config file and defaults, in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub seed: u64,
    pub paths: u64,
    pub steps: u64,
    pub horizon: f64,
    pub level: Option<f64>,
    pub format: Option<String>,
    pub tol: Option<f64>,
    pub threads: Option<u32>,
}

/// Values given on the command line or through `BH_` variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub paths: Option<u64>,
    pub steps: Option<u64>,
    pub horizon: Option<f64>,
    pub level: Option<f64>,
    pub format: Option<String>,
    pub tol: Option<f64>,
    pub threads: Option<u32>,
}

impl Settings {
    pub fn resolve(cli: &Overrides, file: &FileConfig) -> Result<Self> {
        let s = Settings {
            seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            paths: cli.paths.or(file.paths).unwrap_or(DEFAULT_PATHS),
            steps: cli.steps.or(file.steps).unwrap_or(DEFAULT_STEPS),
            horizon: cli.horizon.or(file.horizon).unwrap_or(DEFAULT_HORIZON),
            level: cli.level.or(file.level),
            format: cli.format.clone().or_else(|| file.format.clone()),
            tol: cli.tol.or(file.tol),
            threads: cli.threads.or(file.threads),
        };
        if s.paths < 2 {
            return Err(Error::Config(format!(
                "need at least 2 paths, got {}",
                s.paths
            )));
        }
        if s.steps == 0 {
            return Err(Error::Config("steps must be positive".into()));
        }
        if !(s.horizon > 0.0 && s.horizon.is_finite()) {
            return Err(Error::Config(format!(
                "horizon must be positive, got {}",
                s.horizon
            )));
        }
        if let Some(l) = s.level {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Config(format!("level must be positive, got {l}")));
            }
        }
        if let Some(t) = s.tol {
            if !(t > 0.0) {
                return Err(Error::Config(format!(
                    "tolerance must be positive, got {t}"
                )));
            }
        }
        if s.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(s)
    }
}
