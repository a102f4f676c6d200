//! Multi-vector retrieval over graph nodes.
//!
//! Every node's rendering is embedded as one vector per token. A query is
//! scored against a node with the late-interaction (MaxSim) rule: each query
//! token takes its best dot product over the node's tokens, and the scores
//! are averaged over query tokens.

mod embed;
mod index;
mod score;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use embed::{tokenize, Embedder, HashEmbedder, DEFAULT_DIM, DEFAULT_SEED};
pub use index::{build_index, rank, retrieve_topk, Candidate, IndexEntry, RetrievalIndex};
pub use score::{dense_score, late_interaction_score, Scorer};

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("text has no tokens")]
    EmptyText,
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("a multi-vector needs at least one row and one column")]
    EmptyMatrix,
    #[error("row {row} has {found} columns, expected {expected}")]
    RaggedRows {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("cannot index an empty graph")]
    EmptyGraph,
    #[error("index was built with {index:?} but the query embedder is {query:?}")]
    EmbedderMismatch { index: String, query: String },
    #[error("k must be at least 1")]
    InvalidK,
    #[error("malformed index: {0}")]
    MalformedIndex(String),
}

/// An `n x d` matrix of token embeddings, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct MultiVector {
    dim: usize,
    data: Vec<f64>,
}

impl MultiVector {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, RetrievalError> {
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(RetrievalError::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(RetrievalError::RaggedRows {
                    row: i,
                    found: r.len(),
                    expected: dim,
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { dim, data })
    }

    /// Builds from row-major `data` with `dim` columns.
    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self, RetrievalError> {
        if dim == 0 || data.is_empty() {
            return Err(RetrievalError::EmptyMatrix);
        }
        if !data.len().is_multiple_of(dim) {
            return Err(RetrievalError::RaggedRows {
                row: data.len() / dim,
                found: data.len() % dim,
                expected: dim,
            });
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn token_count(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }
}

impl TryFrom<Vec<Vec<f64>>> for MultiVector {
    type Error = RetrievalError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, Self::Error> {
        Self::from_rows(rows)
    }
}

impl From<MultiVector> for Vec<Vec<f64>> {
    fn from(m: MultiVector) -> Self {
        m.rows().map(<[f64]>::to_vec).collect()
    }
}
