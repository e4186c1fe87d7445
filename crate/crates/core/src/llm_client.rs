//! Minimal chat-completions client.
//!
//! Requests use the common `{model, messages, temperature, max_tokens}` JSON
//! body and read `choices[0].message.content` from the response. The bearer
//! token is read from an environment variable at send time and only ever
//! placed in the `Authorization` header.
//!
//! [`ScriptedTransport`] replays a fixed list of responses and failures and
//! records every request it sees, which is what the tests and the CLI's
//! `--llm-mock-script` option use.

use std::collections::VecDeque;
use std::path::Path;
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmConfig {
    pub endpoint_url: String,
    pub model_name: String,
    pub temperature: f64,
    pub max_tokens: u32,
    #[serde(with = "millis")]
    pub timeout: Duration,
    pub max_retries: u32,
    /// Name of the environment variable holding the bearer token, if any.
    pub auth_token_env_var: Option<String>,
    #[serde(with = "millis")]
    pub backoff_base: Duration,
    #[serde(with = "millis")]
    pub backoff_max: Duration,
    pub max_in_flight: usize,
}

impl Default for LlmConfig {
    fn default() -> Self {
        Self {
            endpoint_url: "http://127.0.0.1:8000/v1/chat/completions".into(),
            model_name: "lta-chat".into(),
            temperature: 0.7,
            max_tokens: 512,
            timeout: Duration::from_secs(60),
            max_retries: 3,
            auth_token_env_var: Some("LTA_LLM_TOKEN".into()),
            backoff_base: Duration::from_millis(250),
            backoff_max: Duration::from_secs(10),
            max_in_flight: 4,
        }
    }
}

mod millis {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        u64::deserialize(d).map(Duration::from_millis)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub max_tokens: u32,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LlmError {
    #[error("transport failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("malformed completion response: {0}")]
    Protocol(String),
    #[error("scripted mock exhausted after {0} request(s)")]
    ScriptExhausted(usize),
}

/// Outcome of a single failed send.
#[derive(Debug, Clone, PartialEq)]
pub enum SendError {
    /// Network or HTTP-status failure; the client may retry.
    Retryable(String),
    Fatal(LlmError),
}

/// Moves one serialized request body to an endpoint and returns the raw
/// response body.
pub trait Transport: Send + Sync {
    fn send(&self, url: &str, bearer: Option<&str>, body: &str) -> Result<String, SendError>;
}

pub struct HttpTransport {
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Result<Self, LlmError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| LlmError::Transport {
                attempts: 0,
                message: e.to_string(),
            })?;
        Ok(Self { client })
    }
}

impl Transport for HttpTransport {
    fn send(&self, url: &str, bearer: Option<&str>, body: &str) -> Result<String, SendError> {
        let mut req = self
            .client
            .post(url)
            .header("content-type", "application/json")
            .body(body.to_string());
        if let Some(token) = bearer {
            req = req.bearer_auth(token);
        }
        let resp = req.send().map_err(|e| SendError::Retryable(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| SendError::Retryable(e.to_string()))?;
        if status.is_success() {
            Ok(text)
        } else {
            Err(SendError::Retryable(format!("HTTP {status}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScriptEntry {
    /// Reply with a well-formed completion whose content is this text.
    Respond(String),
    /// Fail with a retryable transport error.
    Fail(String),
    /// Reply with this exact response body.
    Raw(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordedRequest {
    pub url: String,
    /// Redacted `Authorization` header, present when a token was sent.
    pub authorization: Option<String>,
    pub body: String,
}

#[derive(Debug, Default)]
pub struct ScriptedTransport {
    script: Mutex<VecDeque<ScriptEntry>>,
    requests: Mutex<Vec<RecordedRequest>>,
}

pub fn completion_body(content: &str) -> String {
    serde_json::json!({
        "object": "chat.completion",
        "choices": [{
            "index": 0,
            "message": {"role": "assistant", "content": content},
            "finish_reason": "stop"
        }]
    })
    .to_string()
}

impl ScriptedTransport {
    pub fn new(script: Vec<ScriptEntry>) -> Result<Self, LlmError> {
        if script.is_empty() {
            return Err(LlmError::ScriptExhausted(0));
        }
        Ok(Self {
            script: Mutex::new(script.into()),
            requests: Mutex::default(),
        })
    }

    /// Reads a script with one JSON entry per line, e.g. `{"respond": "..."}`.
    pub fn from_file(path: impl AsRef<Path>) -> crate::Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| crate::Error::io(path, e))?;
        let entries = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| crate::Error::parse(path, i + 1, e)))
            .collect::<crate::Result<Vec<ScriptEntry>>>()?;
        Ok(Self::new(entries)?)
    }

    pub fn requests(&self) -> Vec<RecordedRequest> {
        self.requests.lock().unwrap().clone()
    }

    pub fn attempts(&self) -> usize {
        self.requests.lock().unwrap().len()
    }

    pub fn remaining(&self) -> usize {
        self.script.lock().unwrap().len()
    }

    pub fn save_request_log(&self, path: impl AsRef<Path>) -> crate::Result<()> {
        let mut buf = Vec::new();
        for r in self.requests() {
            serde_json::to_writer(&mut buf, &r).map_err(crate::Error::invalid)?;
            buf.push(b'\n');
        }
        crate::dataset_io::write_atomic(path, &buf)
    }
}

impl Transport for ScriptedTransport {
    fn send(&self, url: &str, bearer: Option<&str>, body: &str) -> Result<String, SendError> {
        let mut requests = self.requests.lock().unwrap();
        requests.push(RecordedRequest {
            url: url.to_string(),
            authorization: bearer.map(|_| "Bearer [REDACTED]".to_string()),
            body: body.to_string(),
        });
        let seen = requests.len();
        drop(requests);
        match self.script.lock().unwrap().pop_front() {
            Some(ScriptEntry::Respond(text)) => Ok(completion_body(&text)),
            Some(ScriptEntry::Raw(body)) => Ok(body),
            Some(ScriptEntry::Fail(msg)) => Err(SendError::Retryable(msg)),
            None => Err(SendError::Fatal(LlmError::ScriptExhausted(seen - 1))),
        }
    }
}

impl<T: Transport + ?Sized> Transport for Arc<T> {
    fn send(&self, url: &str, bearer: Option<&str>, body: &str) -> Result<String, SendError> {
        (**self).send(url, bearer, body)
    }
}

/// Caps the number of requests in flight at once.
#[derive(Debug)]
struct Semaphore {
    permits: Mutex<usize>,
    available: Condvar,
}

struct Permit<'a>(&'a Semaphore);

impl Semaphore {
    fn new(permits: usize) -> Self {
        Self {
            permits: Mutex::new(permits.max(1)),
            available: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut n = self.permits.lock().unwrap();
        while *n == 0 {
            n = self.available.wait(n).unwrap();
        }
        *n -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.permits.lock().unwrap() += 1;
        self.0.available.notify_one();
    }
}

/// Anything that can answer a system + user prompt pair.
pub trait ChatCompletion: Send + Sync {
    fn complete_with(&self, system: &str, user: &str, temperature: f64) -> Result<String, LlmError>;
    fn default_temperature(&self) -> f64;

    fn complete(&self, system: &str, user: &str) -> Result<String, LlmError> {
        self.complete_with(system, user, self.default_temperature())
    }
}

pub struct ChatClient<T> {
    config: LlmConfig,
    transport: T,
    in_flight: Semaphore,
}

impl ChatClient<HttpTransport> {
    pub fn http(config: LlmConfig) -> Result<Self, LlmError> {
        let transport = HttpTransport::new(config.timeout)?;
        Ok(Self::new(config, transport))
    }
}

impl ChatClient<Arc<ScriptedTransport>> {
    /// Client backed by a scripted mock; returns the transport handle for
    /// inspecting recorded requests.
    pub fn mock_from_script(
        config: LlmConfig,
        script: Vec<ScriptEntry>,
    ) -> Result<(Self, Arc<ScriptedTransport>), LlmError> {
        let transport = Arc::new(ScriptedTransport::new(script)?);
        Ok((Self::new(config, Arc::clone(&transport)), transport))
    }
}

impl<T: Transport> ChatClient<T> {
    pub fn new(config: LlmConfig, transport: T) -> Self {
        let in_flight = Semaphore::new(config.max_in_flight);
        Self {
            config,
            transport,
            in_flight,
        }
    }

    pub fn config(&self) -> &LlmConfig {
        &self.config
    }

    pub fn request(&self, system: &str, user: &str, temperature: f64) -> ChatRequest {
        ChatRequest {
            model: self.config.model_name.clone(),
            messages: vec![
                ChatMessage {
                    role: "system".into(),
                    content: system.into(),
                },
                ChatMessage {
                    role: "user".into(),
                    content: user.into(),
                },
            ],
            temperature,
            max_tokens: self.config.max_tokens,
        }
    }

    fn backoff(&self, retry: u32) -> Duration {
        let factor = 1u32.checked_shl(retry).unwrap_or(u32::MAX);
        self.config
            .backoff_base
            .saturating_mul(factor)
            .min(self.config.backoff_max)
    }
}

pub fn parse_completion(body: &str) -> Result<String, LlmError> {
    let value: serde_json::Value = serde_json::from_str(body).map_err(|e| LlmError::Protocol(e.to_string()))?;
    value
        .pointer("/choices/0/message/content")
        .and_then(|c| c.as_str())
        .map(str::to_string)
        .ok_or_else(|| LlmError::Protocol("missing choices[0].message.content".into()))
}

impl<T: Transport> ChatCompletion for ChatClient<T> {
    fn complete_with(&self, system: &str, user: &str, temperature: f64) -> Result<String, LlmError> {
        let body = serde_json::to_string(&self.request(system, user, temperature))
            .map_err(|e| LlmError::Protocol(e.to_string()))?;
        let token = self
            .config
            .auth_token_env_var
            .as_deref()
            .and_then(|var| std::env::var(var).ok());

        let _permit = self.in_flight.acquire();
        let mut attempt = 0;
        loop {
            attempt += 1;
            match self.transport.send(&self.config.endpoint_url, token.as_deref(), &body) {
                Ok(raw) => return parse_completion(&raw),
                Err(SendError::Fatal(e)) => return Err(e),
                Err(SendError::Retryable(message)) => {
                    if attempt > self.config.max_retries {
                        return Err(LlmError::Transport {
                            attempts: attempt,
                            message,
                        });
                    }
                    std::thread::sleep(self.backoff(attempt - 1));
                }
            }
        }
    }

    fn default_temperature(&self) -> f64 {
        self.config.temperature
    }
}
