use md5::{Digest, Md5};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{MultiVector, RetrievalError};

pub const DEFAULT_DIM: usize = 16;
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Turns text into one embedding row per token.
///
/// Implementations must be deterministic for a given [`tag`](Embedder::tag).
pub trait Embedder: Send + Sync {
    /// Identifies the model and every parameter that affects its output.
    fn tag(&self) -> String;

    fn embed(&self, text: &str) -> Result<MultiVector, RetrievalError>;
}

impl<T: Embedder + ?Sized> Embedder for &T {
    fn tag(&self) -> String {
        (**self).tag()
    }

    fn embed(&self, text: &str) -> Result<MultiVector, RetrievalError> {
        (**self).embed(text)
    }
}

/// Lowercased alphanumeric runs; everything else separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Maps every token to a pseudo-random point on the unit sphere, seeded by
/// the token's bytes.
///
/// Equal tokens always get equal rows, so a text scored against itself is
/// exactly 1.0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashEmbedder {
    dim: usize,
    seed: u64,
}

impl Default for HashEmbedder {
    fn default() -> Self {
        Self::new(DEFAULT_DIM, DEFAULT_SEED)
    }
}

impl HashEmbedder {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        Self { dim, seed }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Unit-norm row for one token.
    pub fn token_vector(&self, token: &str) -> Vec<f64> {
        let mut h = Md5::new();
        h.update(self.seed.to_le_bytes());
        h.update(token.as_bytes());
        let digest = h.finalize();
        let mut word = [0u8; 8];
        word.copy_from_slice(&digest[..8]);
        let mut rng = ChaCha8Rng::seed_from_u64(u64::from_le_bytes(word));
        loop {
            let v: Vec<f64> = (0..self.dim).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        }
    }
}

impl Embedder for HashEmbedder {
    fn tag(&self) -> String {
        format!("hash-sphere-v1;dim={};seed={}", self.dim, self.seed)
    }

    fn embed(&self, text: &str) -> Result<MultiVector, RetrievalError> {
        let tokens = tokenize(text);
        if tokens.is_empty() {
            return Err(RetrievalError::EmptyText);
        }
        let data = tokens.iter().flat_map(|t| self.token_vector(t)).collect();
        MultiVector::from_flat(self.dim, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer_lowercases_and_splits() {
        assert_eq!(tokenize("Edit  Product-Info: v2!"), ["edit", "product", "info", "v2"]);
        assert!(tokenize(" -- ").is_empty());
    }

    #[test]
    fn embedding_is_deterministic() {
        let e = HashEmbedder::default();
        assert_eq!(e.embed("edit product").unwrap(), e.embed("edit product").unwrap());
    }

    #[test]
    fn rows_are_unit_norm() {
        let m = HashEmbedder::default().embed("edit product").unwrap();
        assert_eq!(m.token_count(), 2);
        assert_eq!(m.dim(), DEFAULT_DIM);
        for row in m.rows() {
            let n: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn token_rows_are_context_free() {
        let e = HashEmbedder::default();
        let a = e.embed("edit product").unwrap();
        let b = e.embed("please EDIT this").unwrap();
        assert_eq!(a.row(0), b.row(1));
    }

    #[test]
    fn empty_text_rejected() {
        assert!(matches!(
            HashEmbedder::default().embed("  ,. "),
            Err(RetrievalError::EmptyText)
        ));
    }

    #[test]
    fn seed_and_dim_in_tag() {
        assert_ne!(HashEmbedder::new(16, 1).tag(), HashEmbedder::new(16, 2).tag());
        assert_ne!(
            HashEmbedder::new(16, 1).token_vector("x"),
            HashEmbedder::new(16, 2).token_vector("x")
        );
    }
}
