//! Declarative pipeline configuration (TOML), shared by every CLI command.
//! Command-line flags override file values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::refine::RefineConfig;
use crate::reranker::RerankConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {reason}")]
    Parse { path: String, reason: String },
    #[error("missing required path: {0}")]
    MissingPath(&'static str),
    #[error("{field} does not exist: {path}")]
    PathNotFound { field: &'static str, path: String },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Paths {
    pub corpus: Option<PathBuf>,
    pub queries: Option<PathBuf>,
    pub qrels: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub query_embeddings: Option<PathBuf>,
    pub seeds: Option<PathBuf>,
    pub exclusion: Option<PathBuf>,
    pub templates_dir: Option<PathBuf>,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GatewayConfig {
    /// "mock" (JSONL fixtures) or "http".
    pub mode: String,
    pub base_url: String,
    pub student_model: String,
    pub teacher_model: String,
    pub reward_model: String,
    pub api_key_env: String,
    pub max_inflight: usize,
    pub max_retries: u32,
    pub backoff_ms: u64,
    pub mock_fixture: Option<PathBuf>,
    pub teacher_mock_fixture: Option<PathBuf>,
    /// "chat", "endpoint", or "mock".
    pub reward_mode: String,
    pub reward_endpoint: Option<String>,
    pub reward_mock_fixture: Option<PathBuf>,
}

impl Default for GatewayConfig {
    fn default() -> Self {
        Self {
            mode: "mock".into(),
            base_url: "http://localhost:8000/v1".into(),
            student_model: "student".into(),
            teacher_model: "teacher".into(),
            reward_model: "reward".into(),
            api_key_env: "LLM_API_KEY".into(),
            max_inflight: 8,
            max_retries: 3,
            backoff_ms: 200,
            mock_fixture: None,
            teacher_mock_fixture: None,
            reward_mode: "mock".into(),
            reward_endpoint: None,
            reward_mock_fixture: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// "fixture" or "http".
    pub mode: String,
    pub base_url: String,
    pub api_key_env: String,
    pub fixture: Option<PathBuf>,
    pub fetch_fixture: Option<PathBuf>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            mode: "fixture".into(),
            base_url: "https://api.search.brave.com/res/v1/web/search".into(),
            api_key_env: "SEARCH_API_KEY".into(),
            fixture: None,
            fetch_fixture: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RetrievalConfig {
    /// "bm25" or "dense".
    pub mode: String,
    pub k: usize,
    pub k1: f64,
    pub b: f64,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self { mode: "bm25".into(), k: 100, k1: 1.2, b: 0.75 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub rng_seed: u64,
    pub paths: Paths,
    pub gateway: GatewayConfig,
    pub search: SearchConfig,
    pub retrieval: RetrievalConfig,
    pub rerank: RerankConfig,
    pub refine: RefineConfig,
    pub relevance_definitions: BTreeMap<String, String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            rng_seed: 42,
            paths: Paths { output_dir: PathBuf::from("out"), ..Default::default() },
            gateway: GatewayConfig::default(),
            search: SearchConfig::default(),
            retrieval: RetrievalConfig::default(),
            rerank: RerankConfig::default(),
            refine: RefineConfig::default(),
            relevance_definitions: BTreeMap::new(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let content = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&content).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }

    pub fn require(
        &self,
        field: &'static str,
        value: &Option<PathBuf>,
    ) -> Result<PathBuf, ConfigError> {
        let path = value.clone().ok_or(ConfigError::MissingPath(field))?;
        if !path.exists() {
            return Err(ConfigError::PathNotFound { field, path: path.display().to_string() });
        }
        Ok(path)
    }
}
