//! Synthetic distillation-data generation: from seed question-answer pairs to
//! a labeled dataset, via linked-document extraction, teacher annotation,
//! related-query generation, and web search.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use rankpipe_core::parse_rerank_output;

use crate::gateway::{ChatBackend, ChatRequest, GatewayError, PromptLibrary};
use crate::model::Document;

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("gateway failure for (query {query:?}, doc {doc_id:?}): {source}")]
    Gateway {
        query: String,
        doc_id: String,
        #[source]
        source: GatewayError,
    },
    #[error("search failed for {query:?}: {reason}")]
    SearchFailed { query: String, reason: String },
    #[error("fetch failed for {url}: {reason}")]
    FetchFailed { url: String, reason: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Malformed { path: String, line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedPair {
    #[serde(rename = "id")]
    pub source_id: String,
    pub community: String,
    pub query: String,
    pub answer: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Linked,
    Websearch,
}

/// One element of the synthetic dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthRecord {
    pub query: String,
    pub doc: Document,
    pub explanation: String,
    pub label: u8,
    pub provenance: Provenance,
    pub teacher_model: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SynthLine {
    query: String,
    doc_id: String,
    doc_text: String,
    explanation: String,
    label: u8,
    provenance: Provenance,
    teacher_model: String,
}

/// Run accounting; silent data loss would corrupt distillation, so every skip
/// is counted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatagenManifest {
    pub seeds: usize,
    pub linked_found: usize,
    pub fetched: usize,
    pub annotated: usize,
    pub skipped: usize,
    pub websearch_ok: usize,
}

/// Web search contract: up to 10 results per query.
pub trait SearchClient {
    fn search(&self, query: &str) -> Result<Vec<SearchResult>, DatagenError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub url: String,
    pub title: String,
    pub snippet: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fetched_text: Option<String>,
}

/// Document fetch contract: url -> plain text with HTML stripped.
pub trait Fetcher {
    fn fetch(&self, url: &str) -> Result<String, DatagenError>;
}

pub fn load_seeds(path: &Path) -> Result<Vec<SeedPair>, DatagenError> {
    let content = std::fs::read_to_string(path).map_err(|source| DatagenError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut seeds = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let seed: SeedPair = serde_json::from_str(line).map_err(|e| DatagenError::Malformed {
            path: path.display().to_string(),
            line: lineno + 1,
            reason: e.to_string(),
        })?;
        if seed.query.trim().is_empty() || seed.answer.trim().is_empty() {
            return Err(DatagenError::Malformed {
                path: path.display().to_string(),
                line: lineno + 1,
                reason: "empty query or answer".into(),
            });
        }
        seeds.push(seed);
    }
    Ok(seeds)
}

/// Cycles communities in sorted name order, drawing one
/// shuffled-without-replacement seed per community per cycle, until `n` seeds
/// are drawn or all communities are exhausted.
pub fn round_robin_sample(seeds: &[SeedPair], n: usize, rng: &mut ChaCha8Rng) -> Vec<SeedPair> {
    let mut communities: Vec<String> = seeds.iter().map(|s| s.community.clone()).collect();
    communities.sort();
    communities.dedup();

    let mut pools: Vec<Vec<&SeedPair>> = communities
        .iter()
        .map(|c| {
            let mut pool: Vec<&SeedPair> = seeds.iter().filter(|s| &s.community == c).collect();
            pool.shuffle(rng);
            pool
        })
        .collect();

    let mut out = Vec::with_capacity(n.min(seeds.len()));
    while out.len() < n {
        let mut drew = false;
        for pool in &mut pools {
            if out.len() >= n {
                break;
            }
            if let Some(seed) = pool.pop() {
                out.push(seed.clone());
                drew = true;
            }
        }
        if !drew {
            break;
        }
    }
    out
}

/// Lowercase, strip punctuation, collapse whitespace.
pub fn normalize_query(text: &str) -> String {
    text.to_lowercase()
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect::<String>()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Drops seeds whose normalized query is in the exclusion set. Returns the
/// kept seeds and the dropped count.
pub fn contamination_filter(
    seeds: Vec<SeedPair>,
    exclusion: &HashSet<String>,
) -> (Vec<SeedPair>, usize) {
    let before = seeds.len();
    let kept: Vec<SeedPair> = seeds
        .into_iter()
        .filter(|s| !exclusion.contains(&normalize_query(&s.query)))
        .collect();
    let dropped = before - kept.len();
    (kept, dropped)
}

/// Extracts anchor href targets and bare http(s) URLs, deduplicated in first
/// occurrence order. Non-http(s) schemes and fragment-only links are dropped.
pub fn extract_links(answer: &str) -> Vec<String> {
    let href = Regex::new(r#"href\s*=\s*["']([^"']+)["']"#).unwrap();
    let bare = Regex::new(r#"https?://[^\s<>"']+"#).unwrap();

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut push = |url: &str| {
        let url = url.trim_end_matches(['.', ',', ';', '!', '?', ')']);
        if !url.starts_with("http://") && !url.starts_with("https://") {
            return;
        }
        if seen.insert(url.to_string()) {
            out.push(url.to_string());
        }
    };
    for cap in href.captures_iter(answer) {
        push(&cap[1]);
    }
    for m in bare.find_iter(answer) {
        push(m.as_str());
    }
    out
}

/// Strips tags, decodes common entities, collapses whitespace.
pub fn html_to_text(html: &str) -> String {
    let no_script = Regex::new(r"(?is)<(script|style)[^>]*>.*?</(script|style)>")
        .unwrap()
        .replace_all(html, " ");
    let no_tags = Regex::new(r"<[^>]*>").unwrap().replace_all(&no_script, " ");
    let decoded = no_tags
        .replace("&amp;", "&")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&nbsp;", " ");
    decoded.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Teacher annotation for one (query, document) pair. A parse failure is
/// retried once; a second failure skips the pair (`Ok(None)`).
pub fn annotate(
    backend: &dyn ChatBackend,
    prompts: &PromptLibrary,
    query: &str,
    doc_text: &str,
    budget_tokens: usize,
) -> Result<Option<(String, u8)>, DatagenError> {
    let messages = prompts
        .render_teacher_prompt(query, doc_text, budget_tokens)
        .map_err(|e| DatagenError::Gateway {
            query: query.to_string(),
            doc_id: String::new(),
            source: GatewayError::Prompt(e),
        })?;
    let request = ChatRequest::greedy(messages);
    for _ in 0..2 {
        let completions = backend.complete(&request).map_err(|source| DatagenError::Gateway {
            query: query.to_string(),
            doc_id: String::new(),
            source,
        })?;
        let parsed = parse_rerank_output(&completions[0].text);
        if parsed.parse_ok {
            return Ok(Some((parsed.explanation, parsed.label)));
        }
    }
    Ok(None)
}

/// Parses a numbered-list completion into queries; an unparseable completion
/// yields an empty list.
pub fn generate_related_queries(
    backend: &dyn ChatBackend,
    prompts: &PromptLibrary,
    seed: &SeedPair,
    linked_docs: &[String],
    budget_tokens: usize,
) -> Result<Vec<String>, DatagenError> {
    let messages = prompts
        .render_related_queries_prompt(&seed.query, &seed.answer, linked_docs, budget_tokens)
        .map_err(|e| DatagenError::Gateway {
            query: seed.query.clone(),
            doc_id: String::new(),
            source: GatewayError::Prompt(e),
        })?;
    let completions = backend
        .complete(&ChatRequest::greedy(messages))
        .map_err(|source| DatagenError::Gateway {
            query: seed.query.clone(),
            doc_id: String::new(),
            source,
        })?;
    let numbered = Regex::new(r"^\s*\d+[.)]\s*(.+?)\s*$").unwrap();
    Ok(completions[0]
        .text
        .lines()
        .filter_map(|line| numbered.captures(line).map(|c| c[1].to_string()))
        .filter(|q| !q.is_empty())
        .collect())
}

/// Runs the generation procedure for one seed: annotate each fetchable linked
/// document with the original query, then sample one related query, search,
/// sample one result, and annotate it with the related query.
#[allow(clippy::too_many_arguments)]
pub fn generate_synth(
    seed: &SeedPair,
    backend: &dyn ChatBackend,
    prompts: &PromptLibrary,
    search: &dyn SearchClient,
    fetcher: &dyn Fetcher,
    rng: &mut ChaCha8Rng,
    manifest: &mut DatagenManifest,
    teacher_model: &str,
    budget_tokens: usize,
) -> Result<Vec<SynthRecord>, DatagenError> {
    let mut records = Vec::new();
    let links = extract_links(&seed.answer);
    manifest.linked_found += links.len();

    let mut linked_texts = Vec::new();
    for url in &links {
        let text = match fetcher.fetch(url) {
            Ok(t) => t,
            Err(e) => {
                log::warn!("skipping linked doc: {e}");
                manifest.skipped += 1;
                continue;
            }
        };
        manifest.fetched += 1;
        if text.trim().is_empty() {
            manifest.skipped += 1;
            continue;
        }
        linked_texts.push(text.clone());
        match annotate(backend, prompts, &seed.query, &text, budget_tokens)? {
            Some((explanation, label)) => {
                manifest.annotated += 1;
                records.push(SynthRecord {
                    query: seed.query.clone(),
                    doc: Document { id: url.clone(), title: None, text, domain: None },
                    explanation,
                    label,
                    provenance: Provenance::Linked,
                    teacher_model: teacher_model.to_string(),
                });
            }
            None => manifest.skipped += 1,
        }
    }

    let related = generate_related_queries(backend, prompts, seed, &linked_texts, budget_tokens)?;
    if let Some(related_query) = pick(&related, rng) {
        match search.search(related_query) {
            Ok(results) if !results.is_empty() => {
                let results: Vec<&SearchResult> = results.iter().take(10).collect();
                let result = results[rng.gen_range(0..results.len())];
                let fetched = match &result.fetched_text {
                    Some(t) => Ok(t.clone()),
                    None => fetcher.fetch(&result.url),
                };
                match fetched {
                    Ok(text) if !text.trim().is_empty() => {
                        match annotate(backend, prompts, related_query, &text, budget_tokens)? {
                            Some((explanation, label)) => {
                                manifest.annotated += 1;
                                manifest.websearch_ok += 1;
                                records.push(SynthRecord {
                                    query: related_query.clone(),
                                    doc: Document {
                                        id: result.url.clone(),
                                        title: Some(result.title.clone()),
                                        text,
                                        domain: None,
                                    },
                                    explanation,
                                    label,
                                    provenance: Provenance::Websearch,
                                    teacher_model: teacher_model.to_string(),
                                });
                            }
                            None => manifest.skipped += 1,
                        }
                    }
                    Ok(_) => manifest.skipped += 1,
                    Err(e) => {
                        log::warn!("skipping websearch doc: {e}");
                        manifest.skipped += 1;
                    }
                }
            }
            Ok(_) => {}
            Err(e) => {
                log::warn!("skipping websearch step: {e}");
            }
        }
    }
    Ok(records)
}

fn pick<'a>(items: &'a [String], rng: &mut ChaCha8Rng) -> Option<&'a String> {
    if items.is_empty() {
        None
    } else {
        Some(&items[rng.gen_range(0..items.len())])
    }
}

/// Seeded sort-then-shuffle, then JSONL emission; byte-identical across runs
/// with the same rng seed.
pub fn emit_synth_dataset(
    records: &[SynthRecord],
    path: &Path,
    rng: &mut ChaCha8Rng,
) -> Result<(), DatagenError> {
    let mut lines: Vec<SynthLine> = records
        .iter()
        .map(|r| SynthLine {
            query: r.query.clone(),
            doc_id: r.doc.id.clone(),
            doc_text: r.doc.text.clone(),
            explanation: r.explanation.clone(),
            label: r.label,
            provenance: r.provenance,
            teacher_model: r.teacher_model.clone(),
        })
        .collect();
    lines.sort_by(|a, b| (&a.query, &a.doc_id).cmp(&(&b.query, &b.doc_id)));
    lines.shuffle(rng);

    let mut out = String::new();
    for line in &lines {
        out.push_str(&serde_json::to_string(line).expect("serializable"));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|source| DatagenError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_synth_dataset(path: &Path) -> Result<Vec<SynthRecord>, DatagenError> {
    let content = std::fs::read_to_string(path).map_err(|source| DatagenError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut records = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let l: SynthLine = serde_json::from_str(line).map_err(|e| DatagenError::Malformed {
            path: path.display().to_string(),
            line: lineno + 1,
            reason: e.to_string(),
        })?;
        records.push(SynthRecord {
            query: l.query,
            doc: Document { id: l.doc_id, title: None, text: l.doc_text, domain: None },
            explanation: l.explanation,
            label: l.label,
            provenance: l.provenance,
            teacher_model: l.teacher_model,
        });
    }
    Ok(records)
}

/// Offline search client backed by a JSONL fixture
/// `{"query": str, "results": [...]}`. A query missing from the fixture is a
/// search failure.
#[derive(Debug, Default)]
pub struct FixtureSearchClient {
    table: std::collections::HashMap<String, Vec<SearchResult>>,
}

impl FixtureSearchClient {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, query: impl Into<String>, results: Vec<SearchResult>) {
        self.table.insert(query.into(), results);
    }

    pub fn load(path: &Path) -> Result<Self, DatagenError> {
        #[derive(Deserialize)]
        struct Line {
            query: String,
            results: Vec<SearchResult>,
        }
        let content = std::fs::read_to_string(path).map_err(|source| DatagenError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut client = Self::new();
        for (lineno, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let l: Line = serde_json::from_str(line).map_err(|e| DatagenError::Malformed {
                path: path.display().to_string(),
                line: lineno + 1,
                reason: e.to_string(),
            })?;
            client.table.insert(l.query, l.results);
        }
        Ok(client)
    }
}

impl SearchClient for FixtureSearchClient {
    fn search(&self, query: &str) -> Result<Vec<SearchResult>, DatagenError> {
        match self.table.get(query) {
            Some(results) => Ok(results.iter().take(10).cloned().collect()),
            None => Err(DatagenError::SearchFailed {
                query: query.to_string(),
                reason: "no fixture entry".into(),
            }),
        }
    }
}

/// Offline fetcher backed by a JSONL fixture `{"url": str, "text": str}`.
#[derive(Debug, Default)]
pub struct FixtureFetcher {
    table: std::collections::HashMap<String, String>,
}

impl FixtureFetcher {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, url: impl Into<String>, text: impl Into<String>) {
        self.table.insert(url.into(), text.into());
    }

    pub fn load(path: &Path) -> Result<Self, DatagenError> {
        #[derive(Deserialize)]
        struct Line {
            url: String,
            text: String,
        }
        let content = std::fs::read_to_string(path).map_err(|source| DatagenError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut fetcher = Self::new();
        for (lineno, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let l: Line = serde_json::from_str(line).map_err(|e| DatagenError::Malformed {
                path: path.display().to_string(),
                line: lineno + 1,
                reason: e.to_string(),
            })?;
            fetcher.table.insert(l.url, l.text);
        }
        Ok(fetcher)
    }
}

impl Fetcher for FixtureFetcher {
    fn fetch(&self, url: &str) -> Result<String, DatagenError> {
        self.table.get(url).cloned().ok_or_else(|| DatagenError::FetchFailed {
            url: url.to_string(),
            reason: "no fixture entry".into(),
        })
    }
}

/// Live web search over a Brave-style JSON API: GET with a `q` parameter,
/// results under `web.results[]` or `results[]` with url/title/description.
pub struct HttpSearchClient {
    client: reqwest::blocking::Client,
    base_url: String,
    api_key: String,
}

impl HttpSearchClient {
    pub fn new(base_url: impl Into<String>, api_key: impl Into<String>) -> Self {
        Self {
            client: reqwest::blocking::Client::builder()
                .timeout(std::time::Duration::from_secs(20))
                .build()
                .expect("reqwest client"),
            base_url: base_url.into(),
            api_key: api_key.into(),
        }
    }
}

impl SearchClient for HttpSearchClient {
    fn search(&self, query: &str) -> Result<Vec<SearchResult>, DatagenError> {
        let fail = |reason: String| DatagenError::SearchFailed {
            query: query.to_string(),
            reason,
        };
        let resp = self
            .client
            .get(&self.base_url)
            .query(&[("q", query)])
            .header("X-Subscription-Token", &self.api_key)
            .send()
            .map_err(|e| fail(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(fail(format!("status {}", resp.status())));
        }
        let value: serde_json::Value = resp.json().map_err(|e| fail(e.to_string()))?;
        let results = value
            .pointer("/web/results")
            .or_else(|| value.get("results"))
            .and_then(|r| r.as_array())
            .ok_or_else(|| fail("no results array".into()))?;
        Ok(results
            .iter()
            .take(10)
            .filter_map(|r| {
                Some(SearchResult {
                    url: r.get("url")?.as_str()?.to_string(),
                    title: r.get("title").and_then(|t| t.as_str()).unwrap_or("").to_string(),
                    snippet: r
                        .get("description")
                        .or_else(|| r.get("snippet"))
                        .and_then(|s| s.as_str())
                        .unwrap_or("")
                        .to_string(),
                    fetched_text: None,
                })
            })
            .collect())
    }
}

/// Live fetcher with timeout and response-size caps; strips HTML to text.
pub struct HttpFetcher {
    client: reqwest::blocking::Client,
    max_bytes: usize,
}

impl HttpFetcher {
    pub fn new() -> Self {
        Self {
            client: reqwest::blocking::Client::builder()
                .timeout(std::time::Duration::from_secs(20))
                .build()
                .expect("reqwest client"),
            max_bytes: 1 << 20,
        }
    }
}

impl Default for HttpFetcher {
    fn default() -> Self {
        Self::new()
    }
}

impl Fetcher for HttpFetcher {
    fn fetch(&self, url: &str) -> Result<String, DatagenError> {
        let fail = |reason: String| DatagenError::FetchFailed { url: url.to_string(), reason };
        let resp = self.client.get(url).send().map_err(|e| fail(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(fail(format!("status {}", resp.status())));
        }
        let body = resp.text().map_err(|e| fail(e.to_string()))?;
        let truncated: String = body.chars().take(self.max_bytes).collect();
        Ok(html_to_text(&truncated))
    }
}
