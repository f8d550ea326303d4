//! Uniform chat-completion client contract: an HTTP backend speaking the
//! de-facto `/chat/completions` JSON protocol, a deterministic mock backend
//! for tests and offline runs, and prompt template rendering.

pub mod http;
pub mod mock;
pub mod prompts;

pub use http::HttpBackend;
pub use mock::MockBackend;
pub use prompts::{PromptLibrary, PromptTemplate};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn system(content: impl Into<String>) -> Self {
        Self { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self { role: Role::User, content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub messages: Vec<Message>,
    pub temperature: f64,
    pub top_p: f64,
    pub n: u32,
    pub max_tokens: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ChatRequest {
    /// Greedy settings: temperature 0, top-p 1, single sample.
    pub fn greedy(messages: Vec<Message>) -> Self {
        Self { messages, temperature: 0.0, top_p: 1.0, n: 1, max_tokens: 1024, seed: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FinishReason {
    Stop,
    Length,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Completion {
    pub text: String,
    pub finish_reason: FinishReason,
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("transport failure after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("api error, status {status}: {body_excerpt}")]
    Api { status: u16, body_excerpt: String },
    #[error("mock backend has no entry for prompt hash {hash}")]
    MockMiss { hash: String },
    #[error("malformed api response: {0}")]
    BadResponse(String),
    #[error("prompt rendering: {0}")]
    Prompt(#[from] prompts::PromptError),
}

/// Backend contract: returns exactly `request.n` completions or an error.
pub trait ChatBackend: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<Vec<Completion>, GatewayError>;
}

/// Stable hash of a message list, used to key mock fixtures.
pub fn prompt_hash(messages: &[Message]) -> String {
    let mut hasher = Sha256::new();
    for m in messages {
        let role = match m.role {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        };
        hasher.update(role.as_bytes());
        hasher.update(b"\n");
        hasher.update(m.content.as_bytes());
        hasher.update(b"\x1e");
    }
    hex::encode(hasher.finalize())
}
