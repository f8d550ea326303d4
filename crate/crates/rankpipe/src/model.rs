//! Canonical data types and readers/writers for corpora, queries, qrels, and
//! TREC run files.
//!
//! Corpus and query files are JSON lines; qrels use `qid 0 docid gain`; runs
//! use `qid Q0 docid rank score tag` with scores printed at 6 decimal places.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid UTF-8")]
    Utf8 { path: String },
    #[error("{path}:{line}: malformed line: {reason}")]
    MalformedLine { path: String, line: usize, reason: String },
    #[error("{path}:{line}: duplicate id {id}")]
    DuplicateId { path: String, line: usize, id: String },
    #[error("run validation: query {qid} has rank {got} where {expected} was expected")]
    RankGap { qid: String, expected: u32, got: u32 },
    #[error("run validation: query {qid} score increases at rank {rank}")]
    ScoreInversion { qid: String, rank: u32 },
    #[error("run validation: duplicate (query, doc) pair ({qid}, {docid})")]
    DuplicatePair { qid: String, docid: String },
    #[error("io error writing {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub id: String,
    pub text: String,
    pub domain: String,
}

/// Order-preserving corpus with an id index.
#[derive(Debug, Clone)]
pub struct Corpus {
    docs: Vec<Document>,
    index: HashMap<String, usize>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn docs(&self) -> &[Document] {
        &self.docs
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.index.get(id).map(|&i| &self.docs[i])
    }
}

/// Graded gold judgments: query id -> doc id -> gain.
#[derive(Debug, Clone, Default)]
pub struct Qrels {
    map: BTreeMap<String, BTreeMap<String, u32>>,
    /// Later duplicate (qid, docid) lines that overrode earlier ones.
    pub duplicate_overrides: usize,
}

impl Qrels {
    pub fn gains(&self, qid: &str) -> Option<&BTreeMap<String, u32>> {
        self.map.get(qid)
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &String> {
        self.map.keys()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub qid: String,
    pub docid: String,
    pub rank: u32,
    pub score: f64,
    pub tag: String,
}

/// Loads a JSONL embedding sidecar `{"id": str, "vector": [real]}`; the
/// dimension is fixed by the first line.
pub fn load_embeddings(path: &Path) -> Result<rankpipe_core::EmbeddingStore, ModelError> {
    #[derive(Deserialize)]
    struct Line {
        id: String,
        vector: Vec<f64>,
    }
    let content = read_utf8(path)?;
    let mut store: Option<rankpipe_core::EmbeddingStore> = None;
    for (lineno, line) in content.lines().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let l: Line = serde_json::from_str(line).map_err(|e| ModelError::MalformedLine {
            path: path.display().to_string(),
            line: lineno,
            reason: e.to_string(),
        })?;
        let store = store.get_or_insert_with(|| rankpipe_core::EmbeddingStore::new(l.vector.len()));
        store.insert(l.id, l.vector).map_err(|e| ModelError::MalformedLine {
            path: path.display().to_string(),
            line: lineno,
            reason: e.to_string(),
        })?;
    }
    Ok(store.unwrap_or_else(|| rankpipe_core::EmbeddingStore::new(0)))
}

fn read_utf8(path: &Path) -> Result<String, ModelError> {
    let bytes = fs::read(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    String::from_utf8(bytes).map_err(|_| ModelError::Utf8 {
        path: path.display().to_string(),
    })
}

pub fn load_corpus(path: &Path) -> Result<Corpus, ModelError> {
    let content = read_utf8(path)?;
    let mut docs = Vec::new();
    let mut index = HashMap::new();
    for (lineno, line) in content.lines().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document =
            serde_json::from_str(line).map_err(|e| ModelError::MalformedLine {
                path: path.display().to_string(),
                line: lineno,
                reason: e.to_string(),
            })?;
        if doc.id.is_empty() || doc.text.trim().is_empty() {
            return Err(ModelError::MalformedLine {
                path: path.display().to_string(),
                line: lineno,
                reason: "empty id or text".into(),
            });
        }
        if index.contains_key(&doc.id) {
            return Err(ModelError::DuplicateId {
                path: path.display().to_string(),
                line: lineno,
                id: doc.id,
            });
        }
        index.insert(doc.id.clone(), docs.len());
        docs.push(doc);
    }
    Ok(Corpus { docs, index })
}

pub fn load_queries(path: &Path) -> Result<Vec<Query>, ModelError> {
    let content = read_utf8(path)?;
    let mut queries = Vec::new();
    let mut seen = HashMap::new();
    for (lineno, line) in content.lines().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let q: Query = serde_json::from_str(line).map_err(|e| ModelError::MalformedLine {
            path: path.display().to_string(),
            line: lineno,
            reason: e.to_string(),
        })?;
        if seen.insert(q.id.clone(), lineno).is_some() {
            return Err(ModelError::DuplicateId {
                path: path.display().to_string(),
                line: lineno,
                id: q.id,
            });
        }
        queries.push(q);
    }
    Ok(queries)
}

/// Parses `qid 0 docid gain` lines. Later duplicates override earlier ones;
/// the override count is kept on the returned struct.
pub fn load_qrels(path: &Path) -> Result<Qrels, ModelError> {
    let content = read_utf8(path)?;
    let mut qrels = Qrels::default();
    for (lineno, line) in content.lines().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(ModelError::MalformedLine {
                path: path.display().to_string(),
                line: lineno,
                reason: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let gain: u32 = fields[3].parse().map_err(|_| ModelError::MalformedLine {
            path: path.display().to_string(),
            line: lineno,
            reason: format!("non-integer gain {:?}", fields[3]),
        })?;
        let prev = qrels
            .map
            .entry(fields[0].to_string())
            .or_default()
            .insert(fields[2].to_string(), gain);
        if prev.is_some() {
            qrels.duplicate_overrides += 1;
        }
    }
    Ok(qrels)
}

/// Ranks must be 1..n per query in order of appearance, scores non-increasing,
/// (qid, docid) pairs unique.
pub fn validate_run(entries: &[RunEntry]) -> Result<(), ModelError> {
    let mut state: HashMap<&str, (u32, f64)> = HashMap::new();
    let mut pairs: HashMap<(&str, &str), ()> = HashMap::new();
    for e in entries {
        if pairs.insert((&e.qid, &e.docid), ()).is_some() {
            return Err(ModelError::DuplicatePair {
                qid: e.qid.clone(),
                docid: e.docid.clone(),
            });
        }
        match state.get(e.qid.as_str()) {
            None => {
                if e.rank != 1 {
                    return Err(ModelError::RankGap { qid: e.qid.clone(), expected: 1, got: e.rank });
                }
            }
            Some(&(last_rank, last_score)) => {
                if e.rank != last_rank + 1 {
                    return Err(ModelError::RankGap {
                        qid: e.qid.clone(),
                        expected: last_rank + 1,
                        got: e.rank,
                    });
                }
                if e.score > last_score {
                    return Err(ModelError::ScoreInversion { qid: e.qid.clone(), rank: e.rank });
                }
            }
        }
        state.insert(&e.qid, (e.rank, e.score));
    }
    Ok(())
}

pub fn write_run(entries: &[RunEntry], path: &Path) -> Result<(), ModelError> {
    validate_run(entries)?;
    let mut out = String::new();
    for e in entries {
        out.push_str(&format!(
            "{} Q0 {} {} {:.6} {}\n",
            e.qid, e.docid, e.rank, e.score, e.tag
        ));
    }
    fs::write(path, out).map_err(|source| ModelError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_run(path: &Path) -> Result<Vec<RunEntry>, ModelError> {
    let content = read_utf8(path)?;
    let mut entries = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 || fields[1] != "Q0" {
            return Err(ModelError::MalformedLine {
                path: path.display().to_string(),
                line: lineno,
                reason: "expected 'qid Q0 docid rank score tag'".into(),
            });
        }
        let rank: u32 = fields[3].parse().map_err(|_| ModelError::MalformedLine {
            path: path.display().to_string(),
            line: lineno,
            reason: format!("bad rank {:?}", fields[3]),
        })?;
        let score: f64 = fields[4].parse().map_err(|_| ModelError::MalformedLine {
            path: path.display().to_string(),
            line: lineno,
            reason: format!("bad score {:?}", fields[4]),
        })?;
        entries.push(RunEntry {
            qid: fields[0].to_string(),
            docid: fields[2].to_string(),
            rank,
            score,
            tag: fields[5].to_string(),
        });
    }
    validate_run(&entries)?;
    Ok(entries)
}
