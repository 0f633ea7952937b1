//! Chat-completion client with a mock backend.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "text", rename_all = "snake_case")]
pub enum MockMode {
    Off,
    /// Reply with the gold program of the record being asked about.
    EchoGold,
    /// Reply with the same text every time.
    FixedText(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub max_new_tokens: u32,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub backoff_ms: u64,
    /// Hard cap on requests sent by one client.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub request_budget: Option<u64>,
    pub mock: MockMode,
    /// Never written to manifests.
    #[serde(skip)]
    pub api_key: Option<String>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            endpoint: "http://localhost:8000/v1/chat/completions".into(),
            model: "mock".into(),
            temperature: 0.0,
            max_new_tokens: 250,
            timeout_secs: 60,
            max_retries: 3,
            backoff_ms: 500,
            request_budget: None,
            mock: MockMode::Off,
            api_key: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("transport error after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("authentication rejected (HTTP {0})")]
    Auth(u16),
    #[error("request budget of {0} exhausted")]
    Budget(u64),
    #[error("unexpected response: {0}")]
    Response(String),
}

/// A chat message; prompts are sent as one or more user turns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: String,
    pub content: String,
}

impl Message {
    pub fn user(content: impl Into<String>) -> Message {
        Message { role: "user".into(), content: content.into() }
    }
}

pub struct Client {
    cfg: ModelConfig,
    agent: ureq::Agent,
    sent: AtomicU64,
}

impl Client {
    pub fn new(cfg: ModelConfig) -> Client {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(cfg.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        Client { cfg, agent, sent: AtomicU64::new(0) }
    }

    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    /// Requests sent so far, retries included.
    pub fn requests_sent(&self) -> u64 {
        self.sent.load(Ordering::SeqCst)
    }

    /// The JSON body for a request.
    pub fn payload(&self, messages: &[Message]) -> Value {
        json!({
            "model": self.cfg.model,
            "messages": messages,
            "temperature": self.cfg.temperature,
            "max_tokens": self.cfg.max_new_tokens,
        })
    }

    /// Sends one completion request. `gold` feeds the echo mock.
    pub fn complete(&self, messages: &[Message], gold: &str) -> Result<String, ClientError> {
        match &self.cfg.mock {
            MockMode::EchoGold => return Ok(gold.to_string()),
            MockMode::FixedText(t) => return Ok(t.clone()),
            MockMode::Off => {}
        }
        let body = self.payload(messages);
        let mut last = String::new();
        let attempts = self.cfg.max_retries + 1;
        for attempt in 0..attempts {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(self.cfg.backoff_ms << (attempt - 1).min(6)));
            }
            let n = self.sent.fetch_add(1, Ordering::SeqCst);
            if let Some(cap) = self.cfg.request_budget.filter(|cap| n >= *cap) {
                return Err(ClientError::Budget(cap));
            }
            let mut req = self.agent.post(&self.cfg.endpoint);
            if let Some(key) = &self.cfg.api_key {
                req = req.header("Authorization", format!("Bearer {key}"));
            }
            let mut resp = match req.send_json(&body) {
                Ok(r) => r,
                Err(e) => {
                    last = e.to_string();
                    continue;
                }
            };
            let status = resp.status().as_u16();
            match status {
                200..=299 => {
                    let v: Value = resp.body_mut().read_json().map_err(|e| ClientError::Response(e.to_string()))?;
                    return v
                        .pointer("/choices/0/message/content")
                        .and_then(Value::as_str)
                        .map(str::to_string)
                        .ok_or_else(|| ClientError::Response("missing choices[0].message.content".into()));
                }
                401 | 403 => return Err(ClientError::Auth(status)),
                408 | 429 | 500..=599 => last = format!("HTTP {status}"),
                _ => {
                    let text = resp.body_mut().read_to_string().unwrap_or_default();
                    return Err(ClientError::Response(format!("HTTP {status}: {text}")));
                }
            }
        }
        Err(ClientError::Transport { attempts, message: last })
    }
}
