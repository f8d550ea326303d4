//! Exact dot-product scoring over pre-computed embeddings.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::RetrievalResult;

#[derive(Debug, Clone, PartialEq)]
pub enum DenseError {
    /// Vector length does not match the store dimension.
    DimensionMismatch { expected: usize, got: usize },
}

impl core::fmt::Display for DenseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DenseError::DimensionMismatch { expected, got } => {
                write!(f, "embedding dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

/// id -> vector map with a fixed dimension. Keyed by a BTreeMap so scoring is
/// invariant to insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingStore {
    pub fn new(dim: usize) -> Self {
        Self { dim, vectors: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn insert(&mut self, id: String, vector: Vec<f64>) -> Result<(), DenseError> {
        if vector.len() != self.dim {
            return Err(DenseError::DimensionMismatch { expected: self.dim, got: vector.len() });
        }
        self.vectors.insert(id, vector);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.vectors.get(id).map(|v| v.as_slice())
    }

    /// Top-k documents by dot product with `query`, ties by doc id ascending.
    pub fn search(&self, query: &[f64], k: usize) -> Result<Vec<RetrievalResult>, DenseError> {
        if query.len() != self.dim {
            return Err(DenseError::DimensionMismatch { expected: self.dim, got: query.len() });
        }
        let hits: Vec<(String, f64)> = self
            .vectors
            .iter()
            .map(|(id, v)| {
                let dot = v.iter().zip(query).map(|(a, b)| a * b).sum();
                (id.clone(), dot)
            })
            .collect();
        Ok(crate::rank_hits(hits, k))
    }
}
