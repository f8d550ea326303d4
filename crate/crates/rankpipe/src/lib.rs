//! Batch pipeline for reasoning-intensive document reranking: first-stage
//! retrieval, pointwise LLM reranking with explanations and hybrid scoring,
//! synthetic training-data generation, reward-normalized rejection-sampling
//! refinement, and TREC-style evaluation.
//!
//! Scoring and metric primitives live in [`rankpipe_core`]; this crate adds
//! file formats, clients, and the pipeline wiring.

pub mod config;
pub mod datagen;
pub mod evaluate;
pub mod gateway;
pub mod model;
pub mod refine;
pub mod reranker;

pub use rankpipe_core as core;

use sha2::{Digest, Sha256};
use std::path::Path;

/// Content hash used in run manifests and the index cache.
pub fn file_sha256(path: &Path) -> std::io::Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Derives an independent named RNG sub-stream from the pipeline seed, so
/// each stage is reproducible on its own.
pub fn substream(rng_seed: u64, name: &str) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut hasher = Sha256::new();
    hasher.update(rng_seed.to_le_bytes());
    hasher.update(name.as_bytes());
    let digest = hasher.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    rand_chacha::ChaCha8Rng::from_seed(seed)
}
