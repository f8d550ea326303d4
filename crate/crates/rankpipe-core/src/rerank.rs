//! Parsing of explanation-plus-label generations and hybrid score assembly.
//!
//! The reranker emits free-form reasoning followed by a final line
//! `Relevance: <0|1|2>`. The final score is
//! `retrieval_score + alpha * label` with alpha large (default 100) so the
//! discrete label dominates and the retrieval score breaks ties inside each
//! label band.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Parsed generation. `parse_ok == false` forces `label == 0`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RerankOutput {
    pub explanation: String,
    pub label: u8,
    pub parse_ok: bool,
    pub raw_text: String,
}

/// A reranked candidate with its hybrid score.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScoredDoc {
    pub doc_id: String,
    pub retrieval_score: f64,
    pub label: u8,
    pub combined_score: f64,
    pub explanation: String,
    pub parse_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RerankError {
    LabelOutOfRange(u8),
}

impl core::fmt::Display for RerankError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RerankError::LabelOutOfRange(l) => write!(f, "relevance label {l} not in {{0,1,2}}"),
        }
    }
}

fn label_from_line(line: &str) -> Option<u8> {
    let trimmed = line.trim();
    // Bare trailing digit line.
    if let Ok(d) = trimmed.parse::<u8>() {
        if d <= 2 {
            return Some(d);
        }
        return None;
    }
    let rest = trimmed.strip_prefix("Relevance:")?;
    let rest = rest.trim();
    match rest {
        "0" => Some(0),
        "1" => Some(1),
        "2" => Some(2),
        _ => None,
    }
}

/// Scans from the end for the last line matching `Relevance: <0|1|2>` (or a
/// bare 0/1/2 line). No match means parse failure, encoded as label 0.
pub fn parse_rerank_output(raw: &str) -> RerankOutput {
    let lines: Vec<&str> = raw.lines().collect();
    for (i, line) in lines.iter().enumerate().rev() {
        if let Some(label) = label_from_line(line) {
            let explanation: Vec<&str> = lines[..i]
                .iter()
                .chain(lines[i + 1..].iter())
                .copied()
                .collect();
            return RerankOutput {
                explanation: explanation.join("\n").trim().to_string(),
                label,
                parse_ok: true,
                raw_text: raw.to_string(),
            };
        }
    }
    RerankOutput {
        explanation: raw.to_string(),
        label: 0,
        parse_ok: false,
        raw_text: raw.to_string(),
    }
}

/// Hybrid score: retrieval score plus `alpha` times the discrete label.
pub fn combined_score(retrieval_score: f64, label: u8, alpha: f64) -> Result<f64, RerankError> {
    if label > 2 {
        return Err(RerankError::LabelOutOfRange(label));
    }
    Ok(retrieval_score + alpha * label as f64)
}

/// Orders by combined score descending, then retrieval score descending,
/// then doc id ascending.
pub fn sort_scored(docs: &mut [ScoredDoc]) {
    docs.sort_by(|a, b| {
        b.combined_score
            .partial_cmp(&a.combined_score)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| {
                b.retrieval_score
                    .partial_cmp(&a.retrieval_score)
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
            .then_with(|| a.doc_id.cmp(&b.doc_id))
    });
}
