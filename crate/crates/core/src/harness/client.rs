use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::grammar::parse_grammar_text;
use crate::oracle::Transducer;

use super::config::{EndpointConfig, Profile};
use super::prompt::{parse_prompt, sha256_hex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClientError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("endpoint returned {status}: {body}")]
    Status { status: u16, body: String },
    #[error("could not read response: {0}")]
    Decode(String),
    #[error("credential variable {0} is not set")]
    MissingCredential(String),
    #[error("mock could not handle prompt: {0}")]
    Mock(String),
}

impl ClientError {
    /// Transport failures, rate limiting and server errors are worth
    /// retrying; everything else will fail the same way again.
    pub fn is_retryable(&self) -> bool {
        match self {
            ClientError::Transport(_) => true,
            ClientError::Status { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

/// Endpoint description stored with every trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointMeta {
    pub kind: String,
    pub url: Option<String>,
    pub model: String,
}

pub trait Client: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<String, ClientError>;
    fn meta(&self) -> EndpointMeta;
}

/// Blocking HTTP client for a configured endpoint.
pub struct HttpClient {
    cfg: EndpointConfig,
    http: reqwest::blocking::Client,
    token: Option<String>,
}

impl HttpClient {
    pub fn new(cfg: EndpointConfig) -> Result<HttpClient, ClientError> {
        let token = match &cfg.api_key_env {
            Some(var) => Some(std::env::var(var).map_err(|_| ClientError::MissingCredential(var.clone()))?),
            None => None,
        };
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_secs))
            .build()
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        Ok(HttpClient { cfg, http, token })
    }

    fn body(&self, prompt: &str) -> Value {
        let mut body = match self.cfg.profile {
            Profile::Simple => json!({ "model": self.cfg.model, "prompt": prompt }),
            Profile::Chat => json!({
                "model": self.cfg.model,
                "messages": [{ "role": "user", "content": prompt }],
            }),
        };
        let obj = body.as_object_mut().unwrap();
        for (k, v) in &self.cfg.extra {
            obj.insert(k.clone(), v.clone());
        }
        body
    }
}

/// Reads the completion text out of a response body.
pub fn response_text(profile: Profile, body: &Value) -> Result<String, ClientError> {
    let text = match profile {
        Profile::Simple => body.get("text"),
        Profile::Chat => body.pointer("/choices/0/message/content"),
    };
    text.and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| ClientError::Decode(format!("no completion text in {body}")))
}

impl Client for HttpClient {
    fn complete(&self, prompt: &str) -> Result<String, ClientError> {
        let mut req = self.http.post(&self.cfg.url).json(&self.body(prompt));
        if let Some(t) = &self.token {
            req = req.bearer_auth(t);
        }
        let resp = req.send().map_err(|e| ClientError::Transport(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| ClientError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(ClientError::Status {
                status: status.as_u16(),
                body: text.chars().take(2000).collect(),
            });
        }
        let body: Value = serde_json::from_str(&text).map_err(|e| ClientError::Decode(e.to_string()))?;
        response_text(self.cfg.profile, &body)
    }

    fn meta(&self) -> EndpointMeta {
        EndpointMeta {
            kind: "http".into(),
            url: Some(self.cfg.url.clone()),
            model: self.cfg.model.clone(),
        }
    }
}

/// Answers every prompt with a gold translation, found by parsing the
/// grammar and sentence back out of the prompt.
#[derive(Default)]
pub struct OracleMock {
    cache: Mutex<HashMap<String, Arc<Transducer>>>,
}

impl OracleMock {
    pub fn new() -> Self {
        Self::default()
    }

    fn transducer(&self, grammar_text: &str) -> Result<Arc<Transducer>, ClientError> {
        let key = sha256_hex(grammar_text);
        if let Some(t) = self.cache.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let g = parse_grammar_text(grammar_text).map_err(|e| ClientError::Mock(e.to_string()))?;
        let t = Arc::new(Transducer::new(&g).map_err(|e| ClientError::Mock(e.to_string()))?);
        self.cache.lock().unwrap().insert(key, t.clone());
        Ok(t)
    }
}

impl Client for OracleMock {
    fn complete(&self, prompt: &str) -> Result<String, ClientError> {
        let (grammar, words) = parse_prompt(prompt).ok_or_else(|| ClientError::Mock("unrecognized prompt".into()))?;
        let t = self.transducer(grammar)?;
        let out = t.translate(&words, 1).map_err(|e| ClientError::Mock(e.to_string()))?;
        Ok(format!(
            "Parsing the input with the grammar.\nFinal answer: {}",
            out.sentences()[0]
        ))
    }

    fn meta(&self) -> EndpointMeta {
        EndpointMeta {
            kind: "mock".into(),
            url: None,
            model: "oracle".into(),
        }
    }
}

/// Answers every prompt with the untranslated input sentence.
pub struct EchoMock;

impl Client for EchoMock {
    fn complete(&self, prompt: &str) -> Result<String, ClientError> {
        let (_, words) = parse_prompt(prompt).ok_or_else(|| ClientError::Mock("unrecognized prompt".into()))?;
        Ok(format!("Final answer: {}", words.join(" ")))
    }

    fn meta(&self) -> EndpointMeta {
        EndpointMeta {
            kind: "mock".into(),
            url: None,
            model: "echo".into(),
        }
    }
}
