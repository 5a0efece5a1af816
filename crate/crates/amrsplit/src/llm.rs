//! Client for OpenAI-compatible chat-completion endpoints.
//!
//! The client posts a prompt payload's messages to `{endpoint}/chat/completions`
//! and returns the first choice's message content. Transient failures (HTTP 429,
//! 5xx, transport errors) are retried with exponential backoff for at most
//! [`MAX_ATTEMPTS`] total attempts; authentication failures abort immediately.
//!
//! The API key is read from an environment variable — the configuration stores
//! only the variable's *name*, never the secret itself, so configs are safe to
//! commit and log.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde_json::{json, Value};
use thiserror::Error;

use crate::prompts::PromptPayload;

/// Total attempts per request, counting the first one.
pub const MAX_ATTEMPTS: u32 = 3;

/// Environment variable consulted for the API key when none is named.
pub const DEFAULT_API_KEY_ENV: &str = "AMRSPLIT_API_KEY";

/// Connection settings for one endpoint.
#[derive(Debug, Clone)]
pub struct LlmConfig {
    /// Base URL, e.g. `https://api.openai.com/v1`; `/chat/completions` is appended.
    pub endpoint: String,
    /// Model identifier sent in the request body.
    pub model: String,
    /// Name of the environment variable holding the API key. The key itself is
    /// never stored in the config.
    pub api_key_env: String,
    /// Per-request timeout in seconds.
    pub timeout_secs: u64,
    /// Maximum number of in-flight requests for batch runs; must be at least 1.
    pub max_parallel: usize,
    /// Sampling temperature; deterministic decoding by default.
    pub temperature: f64,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            endpoint: "http://localhost:8080/v1".to_owned(),
            model: "gpt-4o-mini".to_owned(),
            api_key_env: DEFAULT_API_KEY_ENV.to_owned(),
            timeout_secs: 60,
            max_parallel: 1,
            temperature: 0.0,
        }
    }
}

impl LlmConfig {
    /// Check invariants that would otherwise surface as confusing runtime
    /// failures: a usable endpoint, nonzero timeout, and parallelism ≥ 1.
    pub fn validate(&self) -> Result<(), LlmError> {
        if self.endpoint.is_empty() {
            return Err(LlmError::Config("endpoint must not be empty".into()));
        }
        if self.timeout_secs == 0 {
            return Err(LlmError::Config("timeout must be positive".into()));
        }
        if self.max_parallel == 0 {
            return Err(LlmError::Config("max_parallel must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("authentication rejected (HTTP {status}); check the `{env}` environment variable")]
    Auth { status: u16, env: String },
    #[error("endpoint returned HTTP {status} after {attempts} attempt(s): {body}")]
    Http { status: u16, attempts: u32, body: String },
    #[error("request failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("malformed response body: {0}")]
    MalformedResponse(String),
}

/// The exact JSON body posted for `payload`. Messages appear in payload order.
pub fn build_request_body(config: &LlmConfig, payload: &PromptPayload) -> Value {
    json!({
        "model": config.model,
        "messages": payload.messages(),
        "temperature": config.temperature,
    })
}

fn completions_url(endpoint: &str) -> String {
    format!("{}/chat/completions", endpoint.trim_end_matches('/'))
}

fn extract_content(body: &str) -> Result<String, LlmError> {
    let value: Value = serde_json::from_str(body)
        .map_err(|e| LlmError::MalformedResponse(format!("not JSON: {e}")))?;
    value
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(ToOwned::to_owned)
        .ok_or_else(|| {
            LlmError::MalformedResponse("missing choices[0].message.content".to_owned())
        })
}

fn backoff_delay(attempt: u32) -> Duration {
    // 100ms, 200ms, 400ms, ... doubling per retry.
    Duration::from_millis(100u64 << attempt.min(6))
}

/// Send one completion request, retrying transient failures.
pub fn complete(config: &LlmConfig, payload: &PromptPayload) -> Result<String, LlmError> {
    config.validate()?;
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(config.timeout_secs))
        .build()
        .map_err(|e| LlmError::Config(format!("cannot build HTTP client: {e}")))?;
    complete_with(&client, config, payload)
}

fn complete_with(
    client: &reqwest::blocking::Client,
    config: &LlmConfig,
    payload: &PromptPayload,
) -> Result<String, LlmError> {
    let url = completions_url(&config.endpoint);
    let body = build_request_body(config, payload);
    let api_key = std::env::var(&config.api_key_env).ok().filter(|k| !k.is_empty());

    let mut attempt = 0u32;
    loop {
        attempt += 1;
        let mut request = client.post(&url).json(&body);
        if let Some(key) = &api_key {
            request = request.bearer_auth(key);
        }
        match request.send() {
            Ok(response) => {
                let status = response.status();
                let text = response.text().unwrap_or_default();
                if status.is_success() {
                    return extract_content(&text);
                }
                let code = status.as_u16();
                if code == 401 || code == 403 {
                    // Retrying cannot fix a bad credential.
                    return Err(LlmError::Auth { status: code, env: config.api_key_env.clone() });
                }
                let transient = code == 429 || status.is_server_error();
                if !transient || attempt >= MAX_ATTEMPTS {
                    return Err(LlmError::Http { status: code, attempts: attempt, body: text });
                }
            }
            Err(e) => {
                if attempt >= MAX_ATTEMPTS {
                    return Err(LlmError::Transport { attempts: attempt, message: e.to_string() });
                }
            }
        }
        std::thread::sleep(backoff_delay(attempt - 1));
    }
}

/// Run every payload against the endpoint with at most `config.max_parallel`
/// requests in flight. The result vector is indexed exactly like `payloads`,
/// so output order never depends on completion order.
pub fn complete_batch(
    config: &LlmConfig,
    payloads: &[PromptPayload],
) -> Result<Vec<Result<String, LlmError>>, LlmError> {
    config.validate()?;
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(config.timeout_secs))
        .build()
        .map_err(|e| LlmError::Config(format!("cannot build HTTP client: {e}")))?;

    let slots: Mutex<Vec<Option<Result<String, LlmError>>>> =
        Mutex::new((0..payloads.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = config.max_parallel.min(payloads.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::SeqCst);
                if index >= payloads.len() {
                    break;
                }
                let result = complete_with(&client, config, &payloads[index]);
                slots.lock().expect("slot lock")[index] = Some(result);
            });
        }
    });

    Ok(slots
        .into_inner()
        .expect("slot lock")
        .into_iter()
        .map(|slot| slot.expect("every payload completed"))
        .collect())
}
