//! Deterministic mock backend keyed by prompt hash.
//!
//! Fixture format: JSONL lines `{"hash": "<sha256>", "completions": ["..."]}`.
//! A request for n samples returns the first n scripted completions, cycling
//! when fewer are scripted, so output is a pure function of (messages, n).

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{prompt_hash, ChatBackend, ChatRequest, Completion, FinishReason, GatewayError, Message};

#[derive(Debug, Serialize, Deserialize)]
struct FixtureLine {
    hash: String,
    completions: Vec<String>,
}

#[derive(Debug, Default, Clone)]
pub struct MockBackend {
    table: HashMap<String, Vec<String>>,
    /// Fallback completion returned on a table miss, when set.
    default_completion: Option<String>,
}

impl MockBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let content = std::fs::read_to_string(path)?;
        let mut table = HashMap::new();
        for line in content.lines().filter(|l| !l.trim().is_empty()) {
            let entry: FixtureLine = serde_json::from_str(line)?;
            table.insert(entry.hash, entry.completions);
        }
        Ok(Self { table, default_completion: None })
    }

    pub fn insert_hash(&mut self, hash: impl Into<String>, completions: Vec<String>) {
        self.table.insert(hash.into(), completions);
    }

    pub fn insert(&mut self, messages: &[Message], completions: Vec<String>) {
        self.table.insert(prompt_hash(messages), completions);
    }

    pub fn with_default(mut self, completion: impl Into<String>) -> Self {
        self.default_completion = Some(completion.into());
        self
    }

    /// Serializes the table to fixture JSONL, hashes sorted for stable bytes.
    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        let mut hashes: Vec<&String> = self.table.keys().collect();
        hashes.sort();
        let mut out = String::new();
        for hash in hashes {
            let line = FixtureLine { hash: hash.clone(), completions: self.table[hash].clone() };
            out.push_str(&serde_json::to_string(&line)?);
            out.push('\n');
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

impl ChatBackend for MockBackend {
    fn complete(&self, request: &ChatRequest) -> Result<Vec<Completion>, GatewayError> {
        let hash = prompt_hash(&request.messages);
        let scripted = match self.table.get(&hash) {
            Some(s) if !s.is_empty() => s.clone(),
            _ => match &self.default_completion {
                Some(d) => vec![d.clone()],
                None => return Err(GatewayError::MockMiss { hash }),
            },
        };
        Ok((0..request.n as usize)
            .map(|i| Completion {
                text: scripted[i % scripted.len()].clone(),
                finish_reason: FinishReason::Stop,
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyed_lookup_and_index_order() {
        let messages = vec![Message::user("rate this")];
        let mut mock = MockBackend::new();
        mock.insert(&messages, vec!["Relevance: 2".into()]);

        let req = ChatRequest::greedy(messages.clone());
        let out = mock.complete(&req).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].text, "Relevance: 2");

        let mut mock = MockBackend::new();
        mock.insert(&messages, (0..8).map(|i| format!("v{i}")).collect());
        let req = ChatRequest { n: 8, ..ChatRequest::greedy(messages) };
        let out = mock.complete(&req).unwrap();
        let texts: Vec<&str> = out.iter().map(|c| c.text.as_str()).collect();
        assert_eq!(texts, vec!["v0", "v1", "v2", "v3", "v4", "v5", "v6", "v7"]);
    }

    #[test]
    fn miss_is_an_error() {
        let mock = MockBackend::new();
        let req = ChatRequest::greedy(vec![Message::user("unseen")]);
        assert!(matches!(mock.complete(&req), Err(GatewayError::MockMiss { .. })));
    }

    #[test]
    fn deterministic() {
        let messages = vec![Message::system("s"), Message::user("u")];
        let mut mock = MockBackend::new();
        mock.insert(&messages, vec!["a".into(), "b".into()]);
        let req = ChatRequest { n: 4, ..ChatRequest::greedy(messages) };
        assert_eq!(mock.complete(&req).unwrap(), mock.complete(&req).unwrap());
    }
}
