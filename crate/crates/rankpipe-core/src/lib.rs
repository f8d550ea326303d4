//! Pure scoring and evaluation primitives for a two-stage retrieve-then-rerank
//! pipeline: BM25 and dot-product retrieval, hybrid score combination, reward
//! normalization for rejection-sampling refinement, nDCG, and paired t-tests.
//!
//! This crate is `no_std` + `alloc`; all IO, file formats and clients live in
//! the companion `rankpipe` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bm25;
pub mod dense;
pub mod ndcg;
pub mod rerank;
pub mod reward;
pub mod stats;
pub mod text;
pub mod tokenize;

pub use bm25::{Bm25Index, Bm25Params};
pub use dense::EmbeddingStore;
pub use rerank::{combined_score, parse_rerank_output, sort_scored, RerankOutput, ScoredDoc};
pub use reward::{normalize_rewards, Normalized};
pub use stats::{paired_t_test, TTestResult};

use alloc::string::String;

/// One first-stage retrieval hit.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RetrievalResult {
    pub doc_id: String,
    pub score: f64,
    /// 1-based rank within the query's result list.
    pub rank: u32,
}

/// Sorts (doc_id, score) pairs by score descending, doc id ascending on ties,
/// truncates to `k`, and assigns 1-based ranks.
pub(crate) fn rank_hits(mut hits: alloc::vec::Vec<(String, f64)>, k: usize) -> alloc::vec::Vec<RetrievalResult> {
    hits.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    hits.truncate(k);
    hits.into_iter()
        .enumerate()
        .map(|(i, (doc_id, score))| RetrievalResult {
            doc_id,
            score,
            rank: (i + 1) as u32,
        })
        .collect()
}
