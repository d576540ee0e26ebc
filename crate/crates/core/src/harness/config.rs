use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::metagrammar::GrammarSpec;
use crate::oracle::DEFAULT_CAP;

use super::HarnessError;

/// Shortest and longest sentence lengths an experiment may request.
pub const LENGTH_RANGE: (usize, usize) = (3, 50);

/// Request/response shape of an endpoint.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `{"model", "prompt"}` in, `{"text"}` out.
    #[default]
    Simple,
    /// Chat-completion style: `{"model", "messages"}` in,
    /// `choices[0].message.content` out.
    Chat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub url: String,
    pub model: String,
    #[serde(default)]
    pub profile: Profile,
    /// Name of the environment variable holding a bearer token. The token
    /// itself is never written anywhere.
    #[serde(default)]
    pub api_key_env: Option<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    /// Extra fields merged into every request body (temperature, ...).
    #[serde(default)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

fn default_timeout() -> u64 {
    600
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub initial_backoff_ms: u64,
    pub max_backoff_ms: u64,
    pub multiplier: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 5,
            initial_backoff_ms: 1000,
            max_backoff_ms: 60_000,
            multiplier: 2.0,
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `attempt` (1-based).
    pub fn backoff_ms(&self, attempt: u32) -> u64 {
        let d = self.initial_backoff_ms as f64 * self.multiplier.powi(attempt.saturating_sub(1) as i32);
        (d as u64).min(self.max_backoff_ms)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub conditions: Vec<GrammarSpec>,
    pub lengths: Vec<usize>,
    pub n_per_cell: usize,
    pub endpoint: EndpointConfig,
    #[serde(default = "default_parallel")]
    pub max_parallel: usize,
    #[serde(default)]
    pub retry: RetryPolicy,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub master_seed: u64,
    /// Most gold translations kept per trial.
    #[serde(default = "default_cap")]
    pub translation_cap: usize,
}

fn default_parallel() -> usize {
    4
}

fn default_output() -> PathBuf {
    PathBuf::from("runs")
}

fn default_cap() -> usize {
    DEFAULT_CAP
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<ExperimentConfig, HarnessError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.conditions.is_empty() {
            return bad("no conditions".into());
        }
        if self.lengths.is_empty() {
            return bad("no lengths".into());
        }
        if let Some(l) = self
            .lengths
            .iter()
            .find(|l| !(LENGTH_RANGE.0..=LENGTH_RANGE.1).contains(*l))
        {
            return bad(format!("length {l} outside {}..={}", LENGTH_RANGE.0, LENGTH_RANGE.1));
        }
        if self.n_per_cell == 0 {
            return bad("n_per_cell must be at least 1".into());
        }
        if self.max_parallel == 0 {
            return bad("max_parallel must be at least 1".into());
        }
        if self.retry.max_attempts == 0 {
            return bad("retry.max_attempts must be at least 1".into());
        }
        Ok(())
    }

    /// Total number of trials the config describes.
    pub fn trial_count(&self) -> usize {
        self.conditions.len() * self.lengths.len() * self.n_per_cell
    }
}
