//! Evaluation loop: prompts, endpoints, logs and reports.
//!
//! A run walks every (condition, length, replicate) cell of an
//! [`ExperimentConfig`]. Each trial samples a sentence pair with a seed
//! derived from the master seed and the cell, renders the prompt, asks the
//! endpoint, extracts and scores the answer, labels errors, and appends a
//! [`RunRecord`] to a JSONL log. Rerunning with the same log resumes where
//! it stopped.

mod client;
mod config;
mod prompt;
mod record;
mod report;
mod runner;

use thiserror::Error;

pub use client::{response_text, Client, ClientError, EchoMock, EndpointMeta, HttpClient, OracleMock};
pub use config::{EndpointConfig, ExperimentConfig, Profile, RetryPolicy, LENGTH_RANGE};
pub use prompt::{
    extract_answer, parse_prompt, render_prompt, render_prompt_text, sha256_hex, ANSWER_MARKER, PROMPT_TEMPLATE,
};
pub use record::{completed_ids, condition_label, read_log, trial_id, LogWriter, RunRecord, Timing, SCHEMA_VERSION};
pub use report::{
    aggregate_report, bootstrap_mean, Block, Estimate, GroupBy, ReportTable, BOOTSTRAP_RESAMPLES, DEFAULT_BUCKETS,
    MISSING,
};
pub use runner::{plan, run_experiment, RunOptions, RunSummary, Trial};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("bad config: {0}")]
    Config(String),
    #[error("log: {0}")]
    Log(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Meta(#[from] crate::metagrammar::MetaError),
    #[error(transparent)]
    Oracle(#[from] crate::oracle::OracleError),
    #[error(transparent)]
    Client(#[from] ClientError),
}
