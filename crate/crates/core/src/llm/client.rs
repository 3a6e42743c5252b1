//! Chat endpoint client: wire shapes, retries with backoff, and an
//! in-process mock mode for deterministic runs.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::prompts::{extract_answer, is_refusal};

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("transport failure after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("bad endpoint configuration: {0}")]
    Config(String),
}

/// How an endpoint speaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApiStyle {
    /// The common chat-completions shape: `messages` in, choices out.
    ChatCompletions,
    /// A simpler generate shape: `prompt` in, text out.
    Generate,
    /// In-process replay of canned responses from a script file.
    Mock(PathBuf),
}

impl ApiStyle {
    pub fn parse(s: &str) -> Result<Self, LlmError> {
        match s {
            "chat" => Ok(ApiStyle::ChatCompletions),
            "generate" => Ok(ApiStyle::Generate),
            other => match other.strip_prefix("mock:") {
                Some(path) => Ok(ApiStyle::Mock(PathBuf::from(path))),
                None => Err(LlmError::Config(format!("unknown api_style: {other}"))),
            },
        }
    }
}

/// Connection settings for one model endpoint. Temperature stays 0 for
/// benchmark runs unless a config explicitly overrides it.
#[derive(Debug, Clone)]
pub struct ModelEndpoint {
    pub name: String,
    pub base_url: String,
    pub model_id: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub request_timeout_secs: u64,
    pub max_concurrency: usize,
    pub max_retries: u32,
    pub api_style: ApiStyle,
    /// Base of the exponential backoff schedule (1s * 2^attempt, +-20%).
    pub backoff_base_secs: f64,
}

impl ModelEndpoint {
    pub fn mock(name: &str, script: &Path) -> Self {
        ModelEndpoint {
            name: name.to_string(),
            base_url: String::new(),
            model_id: name.to_string(),
            temperature: 0.0,
            max_output_tokens: 512,
            request_timeout_secs: 120,
            max_concurrency: 1,
            max_retries: 2,
            api_style: ApiStyle::Mock(script.to_path_buf()),
            backoff_base_secs: 1.0,
        }
    }
}

/// Canned responses for mock mode, keyed by QA item id or by the sha-256
/// hex of the full prompt. Unknown prompts fall back to `default`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MockScript {
    #[serde(default)]
    pub by_id: HashMap<String, String>,
    #[serde(default)]
    pub by_hash: HashMap<String, String>,
    #[serde(default)]
    pub default: Option<String>,
}

impl MockScript {
    pub fn load(path: &Path) -> Result<Self, LlmError> {
        let content = fs::read_to_string(path).map_err(|e| {
            LlmError::Config(format!("cannot read mock script {}: {e}", path.display()))
        })?;
        serde_json::from_str(&content).map_err(|e| {
            LlmError::Config(format!("invalid mock script {}: {e}", path.display()))
        })
    }

    pub fn lookup(&self, prompt: &str, tag: Option<&str>) -> Option<&str> {
        if let Some(tag) = tag {
            if let Some(r) = self.by_id.get(tag) {
                return Some(r);
            }
        }
        let hash = prompt_hash(prompt);
        self.by_hash
            .get(&hash)
            .or(self.default.as_ref())
            .map(|s| s.as_str())
    }
}

pub fn prompt_hash(prompt: &str) -> String {
    format!("{:x}", Sha256::digest(prompt.as_bytes()))
}

/// A model's reply to one prompt.
#[derive(Debug, Clone)]
pub struct ModelAnswer {
    pub raw: String,
    pub extracted: String,
    pub is_refusal: bool,
    pub latency_secs: f64,
    pub endpoint: String,
}

impl ModelAnswer {
    pub fn from_raw(raw: String, latency_secs: f64, endpoint: &str) -> Self {
        let extracted = extract_answer(&raw);
        let refusal = is_refusal(&extracted);
        ModelAnswer {
            raw,
            extracted,
            is_refusal: refusal,
            latency_secs,
            endpoint: endpoint.to_string(),
        }
    }
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: Vec<ChatMessage<'a>>,
    temperature: f64,
    max_tokens: u32,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatResponseMessage,
}

#[derive(Deserialize)]
struct ChatResponseMessage {
    content: String,
}

#[derive(Serialize)]
struct GenerateRequest<'a> {
    model: &'a str,
    prompt: &'a str,
    temperature: f64,
    max_tokens: u32,
}

#[derive(Deserialize)]
struct GenerateResponse {
    #[serde(alias = "text")]
    response: String,
}

enum Backend {
    Http(reqwest::blocking::Client),
    Mock(MockScript),
}

/// Client for one endpoint. Cheap to share behind an `Arc`; requests are
/// independent and may run concurrently up to the endpoint's
/// `max_concurrency`.
pub struct LlmClient {
    pub endpoint: ModelEndpoint,
    backend: Backend,
    requests_issued: AtomicU64,
}

impl LlmClient {
    pub fn new(endpoint: ModelEndpoint) -> Result<Self, LlmError> {
        let backend = match &endpoint.api_style {
            ApiStyle::Mock(path) => Backend::Mock(MockScript::load(path)?),
            _ => Backend::Http(
                reqwest::blocking::Client::builder()
                    .timeout(Duration::from_secs(endpoint.request_timeout_secs))
                    .build()
                    .map_err(|e| LlmError::Config(e.to_string()))?,
            ),
        };
        Ok(LlmClient {
            endpoint,
            backend,
            requests_issued: AtomicU64::new(0),
        })
    }

    /// Total requests this client has issued (mock lookups included).
    pub fn requests_issued(&self) -> u64 {
        self.requests_issued.load(Ordering::Relaxed)
    }

    /// Send one prompt, retrying transport and 5xx failures with
    /// exponential backoff. `tag` identifies the QA item for mock lookup.
    pub fn ask(&self, prompt: &str, tag: Option<&str>) -> Result<ModelAnswer, LlmError> {
        let start = Instant::now();
        let mut attempts = 0u32;
        loop {
            attempts += 1;
            self.requests_issued.fetch_add(1, Ordering::Relaxed);
            match self.complete_once(prompt, tag) {
                Ok(raw) => {
                    // mock latency pinned to zero so runs are byte-identical
                    let latency = match self.backend {
                        Backend::Mock(_) => 0.0,
                        Backend::Http(_) => start.elapsed().as_secs_f64(),
                    };
                    return Ok(ModelAnswer::from_raw(raw, latency, &self.endpoint.name));
                }
                Err(message) => {
                    if attempts > self.endpoint.max_retries {
                        return Err(LlmError::Transport { attempts, message });
                    }
                    std::thread::sleep(self.backoff_delay(attempts - 1));
                }
            }
        }
    }

    fn backoff_delay(&self, attempt: u32) -> Duration {
        let base = self.endpoint.backoff_base_secs * 2f64.powi(attempt as i32);
        let jitter = rand::thread_rng().gen_range(0.8..1.2);
        Duration::from_secs_f64(base * jitter)
    }

    fn complete_once(&self, prompt: &str, tag: Option<&str>) -> Result<String, String> {
        match &self.backend {
            Backend::Mock(script) => script
                .lookup(prompt, tag)
                .map(|s| s.to_string())
                .ok_or_else(|| {
                    format!(
                        "mock script has no response for tag {tag:?} and no default",
                    )
                }),
            Backend::Http(client) => {
                let url = &self.endpoint.base_url;
                let response = match &self.endpoint.api_style {
                    ApiStyle::ChatCompletions => client
                        .post(url)
                        .json(&ChatRequest {
                            model: &self.endpoint.model_id,
                            messages: vec![ChatMessage {
                                role: "user",
                                content: prompt,
                            }],
                            temperature: self.endpoint.temperature,
                            max_tokens: self.endpoint.max_output_tokens,
                        })
                        .send(),
                    ApiStyle::Generate => client
                        .post(url)
                        .json(&GenerateRequest {
                            model: &self.endpoint.model_id,
                            prompt,
                            temperature: self.endpoint.temperature,
                            max_tokens: self.endpoint.max_output_tokens,
                        })
                        .send(),
                    ApiStyle::Mock(_) => unreachable!("mock handled above"),
                };
                let response = response.map_err(|e| e.to_string())?;
                let status = response.status();
                if status.is_server_error() {
                    return Err(format!("server error: {status}"));
                }
                if !status.is_success() {
                    // 4xx is not retryable in spirit, but the caller's
                    // retry budget still bounds it
                    return Err(format!("unexpected status: {status}"));
                }
                match &self.endpoint.api_style {
                    ApiStyle::ChatCompletions => {
                        let parsed: ChatResponse =
                            response.json().map_err(|e| e.to_string())?;
                        parsed
                            .choices
                            .into_iter()
                            .next()
                            .map(|c| c.message.content)
                            .ok_or_else(|| "response had no choices".to_string())
                    }
                    ApiStyle::Generate => {
                        let parsed: GenerateResponse =
                            response.json().map_err(|e| e.to_string())?;
                        Ok(parsed.response)
                    }
                    ApiStyle::Mock(_) => unreachable!(),
                }
            }
        }
    }
}
