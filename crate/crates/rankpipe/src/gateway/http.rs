//! Blocking HTTP backend for any chat-completions compatible server.
//!
//! Transient failures (transport errors, 429, 5xx) are retried with
//! exponential backoff up to a configured limit. In-flight requests are
//! bounded by a semaphore shared across threads.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde_json::json;

use super::{ChatBackend, ChatRequest, Completion, FinishReason, GatewayError, Role};

/// Counting semaphore; std has none and this needs no fairness guarantees.
struct Semaphore {
    permits: Mutex<usize>,
    cv: Condvar,
}

impl Semaphore {
    fn new(permits: usize) -> Self {
        Self { permits: Mutex::new(permits), cv: Condvar::new() }
    }

    fn acquire(&self) {
        let mut p = self.permits.lock().unwrap();
        while *p == 0 {
            p = self.cv.wait(p).unwrap();
        }
        *p -= 1;
    }

    fn release(&self) {
        *self.permits.lock().unwrap() += 1;
        self.cv.notify_one();
    }
}

pub struct HttpBackend {
    client: reqwest::blocking::Client,
    base_url: String,
    model: String,
    api_key: Option<String>,
    max_retries: u32,
    backoff_ms: u64,
    inflight: Semaphore,
    retry_count: AtomicU64,
}

impl HttpBackend {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(120))
                .build()
                .expect("reqwest client"),
            base_url: base_url.into().trim_end_matches('/').to_string(),
            model: model.into(),
            api_key: None,
            max_retries: 3,
            backoff_ms: 200,
            inflight: Semaphore::new(8),
            retry_count: AtomicU64::new(0),
        }
    }

    pub fn with_api_key(mut self, key: Option<String>) -> Self {
        self.api_key = key;
        self
    }

    pub fn with_retries(mut self, max_retries: u32, backoff_ms: u64) -> Self {
        self.max_retries = max_retries;
        self.backoff_ms = backoff_ms;
        self
    }

    pub fn with_max_inflight(mut self, cap: usize) -> Self {
        self.inflight = Semaphore::new(cap.max(1));
        self
    }

    /// Total retries performed over the backend's lifetime.
    pub fn retries(&self) -> u64 {
        self.retry_count.load(Ordering::Relaxed)
    }

    fn send_once(&self, body: &serde_json::Value) -> Result<reqwest::blocking::Response, reqwest::Error> {
        let mut req = self
            .client
            .post(format!("{}/chat/completions", self.base_url))
            .json(body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        req.send()
    }

    fn parse_response(&self, status: u16, body: &str, n: u32) -> Result<Vec<Completion>, GatewayError> {
        let value: serde_json::Value = serde_json::from_str(body)
            .map_err(|e| GatewayError::BadResponse(format!("status {status}: {e}")))?;
        let choices = value
            .get("choices")
            .and_then(|c| c.as_array())
            .ok_or_else(|| GatewayError::BadResponse("missing choices array".into()))?;
        let mut completions = Vec::with_capacity(choices.len());
        for choice in choices {
            let text = choice
                .pointer("/message/content")
                .and_then(|t| t.as_str())
                .ok_or_else(|| GatewayError::BadResponse("choice without message.content".into()))?;
            let finish = match choice.get("finish_reason").and_then(|f| f.as_str()) {
                Some("length") => FinishReason::Length,
                Some("stop") | None => FinishReason::Stop,
                Some(_) => FinishReason::Error,
            };
            completions.push(Completion { text: text.to_string(), finish_reason: finish });
        }
        if completions.len() != n as usize {
            return Err(GatewayError::BadResponse(format!(
                "expected {n} choices, got {}",
                completions.len()
            )));
        }
        Ok(completions)
    }
}

fn retryable_status(status: u16) -> bool {
    status == 429 || (500..600).contains(&status)
}

impl ChatBackend for HttpBackend {
    fn complete(&self, request: &ChatRequest) -> Result<Vec<Completion>, GatewayError> {
        let messages: Vec<serde_json::Value> = request
            .messages
            .iter()
            .map(|m| {
                json!({
                    "role": match m.role {
                        Role::System => "system",
                        Role::User => "user",
                        Role::Assistant => "assistant",
                    },
                    "content": m.content,
                })
            })
            .collect();
        let mut body = json!({
            "model": self.model,
            "messages": messages,
            "temperature": request.temperature,
            "top_p": request.top_p,
            "n": request.n,
            "max_tokens": request.max_tokens,
        });
        if let Some(seed) = request.seed {
            body["seed"] = json!(seed);
        }

        self.inflight.acquire();
        let result = (|| {
            let mut last_error = String::new();
            for attempt in 0..=self.max_retries {
                if attempt > 0 {
                    self.retry_count.fetch_add(1, Ordering::Relaxed);
                    std::thread::sleep(Duration::from_millis(self.backoff_ms << (attempt - 1)));
                }
                match self.send_once(&body) {
                    Ok(resp) => {
                        let status = resp.status().as_u16();
                        let text = resp.text().unwrap_or_default();
                        if (200..300).contains(&status) {
                            return self.parse_response(status, &text, request.n);
                        }
                        if retryable_status(status) {
                            last_error = format!("status {status}");
                            continue;
                        }
                        let excerpt: String = text.chars().take(500).collect();
                        return Err(GatewayError::Api { status, body_excerpt: excerpt });
                    }
                    Err(e) => {
                        last_error = e.to_string();
                    }
                }
            }
            Err(GatewayError::Transport {
                attempts: self.max_retries + 1,
                message: last_error,
            })
        })();
        self.inflight.release();
        result
    }
}
