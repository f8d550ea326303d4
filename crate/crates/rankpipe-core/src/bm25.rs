//! Okapi BM25 inverted index with non-negative idf.
//!
//! idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)), so term scores are never
//! negative and the downstream hybrid sum stays monotone in the label.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::collections::BTreeMap;

use crate::tokenize::tokenize;
use crate::RetrievalResult;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

/// Immutable after construction; queries may run in parallel.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bm25Index {
    /// term -> postings sorted by doc ordinal, each (ordinal, term frequency).
    postings: BTreeMap<String, Vec<(u32, u32)>>,
    doc_ids: Vec<String>,
    doc_lengths: Vec<u32>,
    avgdl: f64,
    params: Bm25Params,
}

impl Bm25Index {
    /// Builds the index from `(doc_id, text)` pairs in corpus order.
    pub fn build<'a, I>(docs: I, params: Bm25Params) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut postings: BTreeMap<String, Vec<(u32, u32)>> = BTreeMap::new();
        let mut doc_ids = Vec::new();
        let mut doc_lengths = Vec::new();

        for (ordinal, (id, text)) in docs.into_iter().enumerate() {
            let terms = tokenize(text);
            doc_ids.push(String::from(id));
            doc_lengths.push(terms.len() as u32);

            let mut tf: BTreeMap<String, u32> = BTreeMap::new();
            for term in terms {
                *tf.entry(term).or_insert(0) += 1;
            }
            for (term, count) in tf {
                postings.entry(term).or_default().push((ordinal as u32, count));
            }
        }

        let avgdl = if doc_lengths.is_empty() {
            0.0
        } else {
            doc_lengths.iter().map(|&l| l as f64).sum::<f64>() / doc_lengths.len() as f64
        };

        Self { postings, doc_ids, doc_lengths, avgdl, params }
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn avgdl(&self) -> f64 {
        self.avgdl
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    /// Document frequency of a term.
    pub fn df(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, |p| p.len())
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    /// Top-k documents by BM25 score. Ties break by doc id ascending; docs
    /// scoring exactly 0 are omitted.
    pub fn search(&self, query: &str, k: usize) -> Vec<RetrievalResult> {
        let terms = tokenize(query);
        if terms.is_empty() || self.doc_ids.is_empty() || k == 0 {
            return Vec::new();
        }

        let n = self.doc_ids.len() as f64;
        let Bm25Params { k1, b } = self.params;
        let mut scores: BTreeMap<u32, f64> = BTreeMap::new();

        for term in &terms {
            let Some(postings) = self.postings.get(term.as_str()) else {
                continue;
            };
            let df = postings.len() as f64;
            let idf = libm::log(1.0 + (n - df + 0.5) / (df + 0.5));
            for &(ordinal, tf) in postings {
                let dl = self.doc_lengths[ordinal as usize] as f64;
                let tf = tf as f64;
                let norm = (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * dl / self.avgdl));
                *scores.entry(ordinal).or_insert(0.0) += idf * norm;
            }
        }

        let hits: Vec<(String, f64)> = scores
            .into_iter()
            .filter(|&(_, s)| s > 0.0)
            .map(|(ordinal, s)| (self.doc_ids[ordinal as usize].clone(), s))
            .collect();
        crate::rank_hits(hits, k)
    }
}
