use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const DEFAULT_DIM: usize = 64;

/// Word vectors for row scoring. Implementations must be safe to share
/// between threads.
pub trait EmbeddingProvider: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn vector(&self, word: &str) -> Vec<f64>;
}

/// Deterministic pseudo-random unit vectors keyed by the word's hash.
/// Distinct words are nearly orthogonal, identical words dot to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashEmbeddings {
    dim: usize,
    seed: u64,
}

impl Default for HashEmbeddings {
    fn default() -> Self {
        HashEmbeddings::new(DEFAULT_DIM, 0)
    }
}

impl HashEmbeddings {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        HashEmbeddings { dim, seed }
    }
}

impl EmbeddingProvider for HashEmbeddings {
    fn dim(&self) -> usize {
        self.dim
    }

    fn vector(&self, word: &str) -> Vec<f64> {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(word.as_bytes());
        let digest: [u8; 32] = h.finalize().into();
        let mut rng = ChaCha8Rng::from_seed(digest);
        let mut v: Vec<f64> = (0..self.dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        normalize(&mut v);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("cannot read embeddings: {0}")]
    Io(String),
}

/// What to return for a word missing from a vector file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OovPolicy {
    /// Hash vector of the same dimension.
    Hash,
    Zero,
}

/// Vectors read from a `word v1 … vd` text file. Vectors are normalized on
/// load so dot products are cosines.
#[derive(Debug, Clone)]
pub struct FileEmbeddings {
    vectors: HashMap<String, Vec<f64>>,
    fallback: HashEmbeddings,
    oov: OovPolicy,
}

impl FileEmbeddings {
    pub fn parse(text: &str, oov: OovPolicy) -> Result<Self, EmbeddingError> {
        let mut vectors = HashMap::new();
        let mut dim = None;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let mut parts = line.split_whitespace();
            let Some(word) = parts.next() else { continue };
            if word.starts_with('#') {
                continue;
            }
            let mut v = parts
                .map(|p| p.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| EmbeddingError::Format { line: line_no, message: e.to_string() })?;
            match dim {
                None if v.is_empty() => {
                    return Err(EmbeddingError::Format {
                        line: line_no,
                        message: format!("no components for {word:?}"),
                    })
                }
                None => dim = Some(v.len()),
                Some(d) if d != v.len() => {
                    return Err(EmbeddingError::Format {
                        line: line_no,
                        message: format!("expected {d} components, found {}", v.len()),
                    })
                }
                _ => {}
            }
            normalize(&mut v);
            vectors.insert(word.to_lowercase(), v);
        }
        let dim = dim.unwrap_or(DEFAULT_DIM);
        Ok(FileEmbeddings { vectors, fallback: HashEmbeddings::new(dim, 0), oov })
    }

    pub fn load(path: &Path, oov: OovPolicy) -> Result<Self, EmbeddingError> {
        let text = std::fs::read_to_string(path).map_err(|e| EmbeddingError::Io(format!("{}: {e}", path.display())))?;
        FileEmbeddings::parse(&text, oov)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

impl EmbeddingProvider for FileEmbeddings {
    fn dim(&self) -> usize {
        self.fallback.dim()
    }

    fn vector(&self, word: &str) -> Vec<f64> {
        match self.vectors.get(word) {
            Some(v) => v.clone(),
            None => match self.oov {
                OovPolicy::Hash => self.fallback.vector(word),
                OovPolicy::Zero => vec![0.0; self.dim()],
            },
        }
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
