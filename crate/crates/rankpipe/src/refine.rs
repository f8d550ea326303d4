//! Rejection-sampling refinement data pipeline: sample k outputs per
//! (query, document) pair, score with a reward client, max-min normalize,
//! threshold-filter, weight by the m-th power, and emit trainer-ready
//! weighted datasets.
//!
//! Gradient updates are out of scope: the emitted weight multiplies the
//! sequence log-likelihood in the external trainer.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rankpipe_core::reward::{filter_by_threshold, normalize_rewards, weight, Normalized};

use crate::datagen::SynthRecord;
use crate::gateway::{prompt_hash, ChatBackend, ChatRequest, GatewayError, Message, PromptLibrary};

#[derive(Debug, Error)]
pub enum RefineError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("gateway failure on (query {qid}, doc {docid}): {source}")]
    Gateway {
        qid: String,
        docid: String,
        #[source]
        source: GatewayError,
    },
    #[error("reward client failure on (query {qid}, doc {docid}): {reason}")]
    Reward { qid: String, docid: String, reason: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefineConfig {
    pub k: usize,
    pub tau: f64,
    pub m: u32,
    pub temperature: f64,
    pub top_p: f64,
    pub iterations: u32,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self { k: 8, tau: 0.85, m: 3, temperature: 1.0, top_p: 1.0, iterations: 2 }
    }
}

impl RefineConfig {
    pub fn validate(&self) -> Result<(), RefineError> {
        if self.k < 2 {
            return Err(RefineError::Config(format!("k must be >= 2, got {}", self.k)));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(RefineError::Config(format!("tau must be in [0, 1], got {}", self.tau)));
        }
        if self.m == 0 {
            return Err(RefineError::Config("m must be positive".into()));
        }
        Ok(())
    }
}

/// Reward scoring contract; deterministic for fixed inputs in mock mode.
pub trait RewardClient {
    fn score(&self, query: &str, doc: &str, output: &str) -> Result<f64, RefineError>;
}

/// One training row of the emitted weighted dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedExample {
    pub prompt: Vec<Message>,
    pub completion: String,
    pub weight: f64,
    pub qid: String,
    pub docid: String,
    pub iter: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub iter: u32,
    pub pairs: usize,
    pub degenerate: usize,
    pub kept_examples: usize,
    pub mean_weight: f64,
}

/// A (query, document) pair entering the refinement loop.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefinePair {
    pub qid: String,
    pub query: String,
    pub docid: String,
    pub doc_text: String,
}

pub fn load_pairs(path: &Path) -> Result<Vec<RefinePair>, RefineError> {
    let content = std::fs::read_to_string(path).map_err(|source| RefineError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut pairs = Vec::new();
    for line in content.lines().filter(|l| !l.trim().is_empty()) {
        let pair: RefinePair = serde_json::from_str(line)
            .map_err(|e| RefineError::Config(format!("bad pairs line: {e}")))?;
        pairs.push(pair);
    }
    Ok(pairs)
}

/// One request with n = k at the configured sampling settings; duplicate
/// texts are kept.
pub fn sample_outputs(
    backend: &dyn ChatBackend,
    prompt: Vec<Message>,
    config: &RefineConfig,
    qid: &str,
    docid: &str,
) -> Result<Vec<String>, RefineError> {
    let request = ChatRequest {
        messages: prompt,
        temperature: config.temperature,
        top_p: config.top_p,
        n: config.k as u32,
        max_tokens: 1024,
        seed: None,
    };
    let completions = backend.complete(&request).map_err(|source| RefineError::Gateway {
        qid: qid.to_string(),
        docid: docid.to_string(),
        source,
    })?;
    Ok(completions.into_iter().map(|c| c.text).collect())
}

/// Emits the distillation dataset: one (prompt, completion) row per synthetic
/// record, weight 1.0.
pub fn emit_sft_dataset(
    records: &[SynthRecord],
    prompts: &PromptLibrary,
    path: &Path,
    budget_tokens: usize,
) -> Result<(), RefineError> {
    #[derive(Serialize)]
    struct SftRow<'a> {
        prompt: Vec<Message>,
        completion: String,
        weight: f64,
        doc_id: &'a str,
    }
    let mut out = String::new();
    for record in records {
        let prompt = prompts
            .render_rerank_prompt(&record.query, &record.doc.text, None, budget_tokens)
            .map_err(|e| RefineError::Config(e.to_string()))?;
        let row = SftRow {
            prompt,
            completion: format!("{}\nRelevance: {}", record.explanation, record.label),
            weight: 1.0,
            doc_id: &record.doc.id,
        };
        out.push_str(&serde_json::to_string(&row).expect("serializable"));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|source| RefineError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Runs one refinement iteration over all pairs and writes the weighted
/// dataset file. Degenerate groups (all rewards equal) are skipped and
/// counted. Output rows are sorted by (qid, docid, sample index).
pub fn run_iteration(
    pairs: &[RefinePair],
    backend: &dyn ChatBackend,
    reward_client: &dyn RewardClient,
    prompts: &PromptLibrary,
    config: &RefineConfig,
    iter: u32,
    out_path: &Path,
    budget_tokens: usize,
) -> Result<IterationReport, RefineError> {
    config.validate()?;
    let mut report = IterationReport { iter, pairs: pairs.len(), ..Default::default() };
    let mut rows: Vec<(String, String, usize, WeightedExample)> = Vec::new();

    for pair in pairs {
        let prompt = prompts
            .render_rerank_prompt(&pair.query, &pair.doc_text, None, budget_tokens)
            .map_err(|e| RefineError::Config(e.to_string()))?;
        let samples = sample_outputs(backend, prompt.clone(), config, &pair.qid, &pair.docid)?;
        let rewards: Vec<f64> = samples
            .iter()
            .map(|text| reward_client.score(&pair.query, &pair.doc_text, text))
            .collect::<Result<_, _>>()?;

        let normalized = normalize_rewards(&rewards).map_err(|e| RefineError::Config(e.to_string()))?;
        let Normalized::Values(normalized) = normalized else {
            report.degenerate += 1;
            continue;
        };
        for (index, rbar) in filter_by_threshold(&normalized, config.tau) {
            let w = weight(rbar, config.m);
            rows.push((
                pair.qid.clone(),
                pair.docid.clone(),
                index,
                WeightedExample {
                    prompt: prompt.clone(),
                    completion: samples[index].clone(),
                    weight: w,
                    qid: pair.qid.clone(),
                    docid: pair.docid.clone(),
                    iter,
                },
            ));
        }
    }

    rows.sort_by(|a, b| (&a.0, &a.1, a.2).cmp(&(&b.0, &b.1, b.2)));
    report.kept_examples = rows.len();
    report.mean_weight = if rows.is_empty() {
        0.0
    } else {
        rows.iter().map(|r| r.3.weight).sum::<f64>() / rows.len() as f64
    };

    let mut out = String::new();
    for (_, _, _, example) in &rows {
        out.push_str(&serde_json::to_string(example).expect("serializable"));
        out.push('\n');
    }
    std::fs::write(out_path, out).map_err(|source| RefineError::Io {
        path: out_path.display().to_string(),
        source,
    })?;
    Ok(report)
}

/// Scripted reward client for tests and offline runs: rewards keyed by output
/// text, with an optional per-group sequence fallback.
#[derive(Debug, Default)]
pub struct MockRewardClient {
    by_text: HashMap<String, f64>,
}

impl MockRewardClient {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, output: impl Into<String>, reward: f64) {
        self.by_text.insert(output.into(), reward);
    }

    /// Loads JSONL `{"output": str, "reward": real}`.
    pub fn load(path: &Path) -> Result<Self, RefineError> {
        #[derive(Deserialize)]
        struct Line {
            output: String,
            reward: f64,
        }
        let content = std::fs::read_to_string(path).map_err(|source| RefineError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut client = Self::new();
        for line in content.lines().filter(|l| !l.trim().is_empty()) {
            let l: Line = serde_json::from_str(line)
                .map_err(|e| RefineError::Config(format!("bad reward fixture line: {e}")))?;
            client.by_text.insert(l.output, l.reward);
        }
        Ok(client)
    }
}

impl RewardClient for MockRewardClient {
    fn score(&self, _query: &str, _doc: &str, output: &str) -> Result<f64, RefineError> {
        self.by_text.get(output).copied().ok_or_else(|| RefineError::Reward {
            qid: String::new(),
            docid: String::new(),
            reason: format!("no scripted reward for output {output:?}"),
        })
    }
}

/// Reward adapter over a dedicated scoring endpoint:
/// POST {query, document, output} -> {"score": real}.
pub struct ScoringEndpointClient {
    client: reqwest::blocking::Client,
    url: String,
}

impl ScoringEndpointClient {
    pub fn new(url: impl Into<String>) -> Self {
        Self {
            client: reqwest::blocking::Client::builder()
                .timeout(std::time::Duration::from_secs(60))
                .build()
                .expect("reqwest client"),
            url: url.into(),
        }
    }
}

impl RewardClient for ScoringEndpointClient {
    fn score(&self, query: &str, doc: &str, output: &str) -> Result<f64, RefineError> {
        let fail = |reason: String| RefineError::Reward {
            qid: String::new(),
            docid: String::new(),
            reason,
        };
        let resp = self
            .client
            .post(&self.url)
            .json(&serde_json::json!({"query": query, "document": doc, "output": output}))
            .send()
            .map_err(|e| fail(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(fail(format!("status {}", resp.status())));
        }
        let value: serde_json::Value = resp.json().map_err(|e| fail(e.to_string()))?;
        value
            .get("score")
            .and_then(|s| s.as_f64())
            .ok_or_else(|| fail("response missing score".into()))
    }
}

/// Reward adapter over the chat-completions protocol: formats (query, doc,
/// output) with the reward template and parses a number from the completion.
/// Scores are cached by (query, doc, output) hash since reward calls dominate
/// cost.
pub struct ChatRewardClient<'a> {
    backend: &'a dyn ChatBackend,
    prompts: &'a PromptLibrary,
    budget_tokens: usize,
    cache: Mutex<HashMap<String, f64>>,
}

impl<'a> ChatRewardClient<'a> {
    pub fn new(backend: &'a dyn ChatBackend, prompts: &'a PromptLibrary, budget_tokens: usize) -> Self {
        Self { backend, prompts, budget_tokens, cache: Mutex::new(HashMap::new()) }
    }
}

impl RewardClient for ChatRewardClient<'_> {
    fn score(&self, query: &str, doc: &str, output: &str) -> Result<f64, RefineError> {
        let messages = self
            .prompts
            .render_reward_prompt(query, doc, output, self.budget_tokens)
            .map_err(|e| RefineError::Config(e.to_string()))?;
        let key = prompt_hash(&messages);
        if let Some(&cached) = self.cache.lock().unwrap().get(&key) {
            return Ok(cached);
        }
        let completions = self
            .backend
            .complete(&ChatRequest::greedy(messages))
            .map_err(|source| RefineError::Gateway {
                qid: String::new(),
                docid: String::new(),
                source,
            })?;
        let text = completions[0].text.trim();
        let score: f64 = text
            .split_whitespace()
            .find_map(|tok| tok.trim_matches(|c: char| !c.is_ascii_digit() && c != '.' && c != '-').parse().ok())
            .ok_or_else(|| RefineError::Reward {
                qid: String::new(),
                docid: String::new(),
                reason: format!("no numeric score in completion {text:?}"),
            })?;
        self.cache.lock().unwrap().insert(key, score);
        Ok(score)
    }
}
