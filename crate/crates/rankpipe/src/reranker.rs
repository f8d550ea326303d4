//! Second-stage reranking: one generation per candidate, parsed into an
//! explanation and discrete label, combined with the retrieval score.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rankpipe_core::{combined_score, parse_rerank_output, sort_scored, RetrievalResult, ScoredDoc};

use crate::gateway::{ChatBackend, ChatRequest, GatewayError, PromptLibrary};
use crate::model::Corpus;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RerankConfig {
    pub alpha: f64,
    pub candidates: usize,
    pub retries_on_parse_fail: u32,
    /// Token budget for the document text in the prompt.
    pub doc_token_budget: usize,
}

impl Default for RerankConfig {
    fn default() -> Self {
        Self { alpha: 100.0, candidates: 100, retries_on_parse_fail: 1, doc_token_budget: 4096 }
    }
}

#[derive(Debug, Error)]
pub enum RerankError {
    #[error("candidate {docid} for query {qid} not in corpus")]
    UnknownDoc { qid: String, docid: String },
    #[error("gateway failure on (query {qid}, doc {docid}) after {completed} completed candidates: {source}")]
    Gateway {
        qid: String,
        docid: String,
        /// Candidates already reranked before the failure.
        completed: usize,
        #[source]
        source: GatewayError,
    },
    #[error("no candidates for query {qid}")]
    NoCandidates { qid: String },
}

/// One line of the persisted explanations file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExplanationRecord {
    pub qid: String,
    pub docid: String,
    pub label: u8,
    pub parse_ok: bool,
    pub explanation: String,
}

/// Reranks first-stage candidates for one query. Inference is greedy
/// (temperature 0, top-p 1, n=1); a parse failure is retried up to
/// `retries_on_parse_fail` times, then the label-0 fallback is kept and
/// flagged.
pub fn rerank(
    qid: &str,
    query_text: &str,
    candidates: &[RetrievalResult],
    corpus: &Corpus,
    backend: &dyn ChatBackend,
    prompts: &PromptLibrary,
    relevance_definition: Option<&str>,
    config: &RerankConfig,
) -> Result<Vec<ScoredDoc>, RerankError> {
    if candidates.is_empty() {
        return Err(RerankError::NoCandidates { qid: qid.to_string() });
    }
    let mut scored = Vec::with_capacity(candidates.len().min(config.candidates));
    for candidate in candidates.iter().take(config.candidates) {
        let doc = corpus.get(&candidate.doc_id).ok_or_else(|| RerankError::UnknownDoc {
            qid: qid.to_string(),
            docid: candidate.doc_id.clone(),
        })?;
        let messages = prompts
            .render_rerank_prompt(query_text, &doc.text, relevance_definition, config.doc_token_budget)
            .map_err(|e| RerankError::Gateway {
                qid: qid.to_string(),
                docid: candidate.doc_id.clone(),
                completed: scored.len(),
                source: GatewayError::Prompt(e),
            })?;
        let request = ChatRequest::greedy(messages);

        let mut output = None;
        for _ in 0..=config.retries_on_parse_fail {
            let completions =
                backend.complete(&request).map_err(|source| RerankError::Gateway {
                    qid: qid.to_string(),
                    docid: candidate.doc_id.clone(),
                    completed: scored.len(),
                    source,
                })?;
            let parsed = parse_rerank_output(&completions[0].text);
            let ok = parsed.parse_ok;
            output = Some(parsed);
            if ok {
                break;
            }
        }
        let parsed = output.expect("at least one attempt");

        scored.push(ScoredDoc {
            doc_id: candidate.doc_id.clone(),
            retrieval_score: candidate.score,
            label: parsed.label,
            combined_score: combined_score(candidate.score, parsed.label, config.alpha)
                .expect("parser only emits labels 0..=2"),
            explanation: parsed.explanation,
            parse_ok: parsed.parse_ok,
        });
    }
    sort_scored(&mut scored);
    Ok(scored)
}

/// Writes explanation records as JSONL next to the run file.
pub fn write_explanations(records: &[ExplanationRecord], path: &Path) -> anyhow::Result<()> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
