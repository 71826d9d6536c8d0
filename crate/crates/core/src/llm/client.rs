//! Blocking client for OpenAI-compatible chat-completions endpoints.

use std::thread;
use std::time::Duration;

use log::warn;
use serde::Serialize;

use super::LlmError;

/// Environment variable holding the bearer token.
pub const API_KEY_ENV: &str = "L1FORGE_API_KEY";

/// Exponential backoff on transport errors, 429 and 5xx replies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub initial_backoff: Duration,
    pub max_backoff: Duration,
    pub multiplier: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 4,
            initial_backoff: Duration::from_millis(500),
            max_backoff: Duration::from_secs(30),
            multiplier: 2.0,
        }
    }
}

impl RetryPolicy {
    pub fn none() -> Self {
        RetryPolicy {
            max_retries: 0,
            ..Default::default()
        }
    }

    /// Wait before retry number `attempt` (0-based).
    pub fn backoff(&self, attempt: u32) -> Duration {
        let secs = self.initial_backoff.as_secs_f64() * self.multiplier.powi(attempt as i32);
        Duration::from_secs_f64(secs.min(self.max_backoff.as_secs_f64()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage {
            role: "user".into(),
            content: content.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
}

#[derive(Debug, Clone)]
pub struct ChatClient {
    url: String,
    api_key: Option<String>,
    retry: RetryPolicy,
    agent: ureq::Agent,
}

impl ChatClient {
    /// `endpoint` is the API base; requests go to `{endpoint}/chat/completions`.
    pub fn new(endpoint: &str, api_key: Option<String>, retry: RetryPolicy, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        ChatClient {
            url: format!("{}/chat/completions", endpoint.trim_end_matches('/')),
            api_key,
            retry,
            agent,
        }
    }

    /// Reads the API key from [`API_KEY_ENV`].
    pub fn from_env(endpoint: &str, retry: RetryPolicy, timeout: Duration) -> Self {
        let key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
        Self::new(endpoint, key, retry, timeout)
    }

    /// Sends one request and returns the first choice's message content.
    pub fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        let mut attempt = 0;
        loop {
            let (err, retry_after) = match self.send_once(request) {
                Ok(content) => return Ok(content),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retryable(e, after)) => (e, after),
            };
            if attempt >= self.retry.max_retries {
                return Err(err);
            }
            let wait = retry_after.unwrap_or_else(|| self.retry.backoff(attempt)).min(self.retry.max_backoff);
            warn!("{err}; retry {} of {} in {:?}", attempt + 1, self.retry.max_retries, wait);
            thread::sleep(wait);
            attempt += 1;
        }
    }

    fn send_once(&self, request: &ChatRequest) -> Result<String, Attempt> {
        let mut req = self.agent.post(&self.url);
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req
            .send_json(request)
            .map_err(|e| Attempt::Retryable(LlmError::Transport(e.to_string()), None))?;
        let status = resp.status().as_u16();
        if status == 429 || status >= 500 {
            let after = resp
                .headers()
                .get("retry-after")
                .and_then(|v| v.to_str().ok())
                .and_then(|v| v.trim().parse::<f64>().ok())
                .map(Duration::from_secs_f64);
            let body = resp.body_mut().read_to_string().unwrap_or_default();
            return Err(Attempt::Retryable(LlmError::Status { status, body }, after));
        }
        if !(200..300).contains(&status) {
            let body = resp.body_mut().read_to_string().unwrap_or_default();
            return Err(Attempt::Fatal(LlmError::Status { status, body }));
        }
        let json: serde_json::Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| Attempt::Fatal(LlmError::BadResponse(e.to_string())))?;
        json["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| Attempt::Fatal(LlmError::BadResponse("no choices[0].message.content".into())))
    }
}

enum Attempt {
    Retryable(LlmError, Option<Duration>),
    Fatal(LlmError),
}
