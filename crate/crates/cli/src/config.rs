//! Experiment configuration: a flat TOML file with a versioned schema.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use hyperlab::{DynamicalMap, Point};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable that overrides the configured thread count.
pub const THREADS_ENV: &str = "HYPERLAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

/// A numeric field that may be left to calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param<T> {
    Value(T),
    Auto(AutoTag),
}

impl<T: Copy> Param<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            Param::Value(v) => Some(*v),
            Param::Auto(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub map: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit_length: Option<usize>,
    /// Prefix lengths at which hyptimes re-reports gap statistics.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checkpoints: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Param<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Param<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<Param<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_period: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_ladder: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_ladder: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_ladder: Option<Vec<f64>>,
    /// `uniform`, `constant`, `exponential` or `truncated-distance`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_profile: Option<String>,
    /// Number of sampled centers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<usize>,
    /// Explicit center; overrides sampling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub emit_indices: bool,
    /// Execution only: excluded from the echo and the hash.
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing)]
    pub output_dir: Option<String>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Validation(format!(
                "field `schema_version`: expected {SCHEMA_VERSION}, got {}",
                cfg.schema_version
            )));
        }
        cfg.build_map()?;
        if let Some(c) = &cfg.center {
            let dim = cfg.build_map()?.dim();
            if c.len() != dim {
                return Err(field("center", format!("needs {dim} coordinates, got {}", c.len())));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn build_map(&self) -> Result<DynamicalMap, CliError> {
        DynamicalMap::from_id(&self.map, self.alpha).map_err(|e| field("map", e.to_string()))
    }

    pub fn explicit_center(&self, map: &DynamicalMap) -> Option<Point> {
        self.center
            .as_ref()
            .map(|c| Point::from_coords(map.space(), c).wrapped())
    }

    /// Config threads, overridden by the environment, else all cores.
    pub fn thread_count(&self) -> Result<usize, CliError> {
        if let Ok(v) = std::env::var(THREADS_ENV) {
            return match v.trim().parse::<usize>() {
                Ok(t) if t >= 1 => Ok(t),
                _ => Err(CliError::Validation(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
            };
        }
        match self.threads {
            Some(0) => Err(field("threads", "must be ≥ 1".into())),
            Some(t) => Ok(t),
            None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }

    /// sha256 of the compact JSON echo.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub fn require<T: Clone>(value: &Option<T>, name: &str) -> Result<T, CliError> {
        value.clone().ok_or_else(|| field(name, "required by this subcommand".into()))
    }
}

pub fn field(name: &str, msg: String) -> CliError {
    CliError::Validation(format!("field `{name}`: {msg}"))
}
