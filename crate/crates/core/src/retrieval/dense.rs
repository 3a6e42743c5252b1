//! In-memory dense index with exhaustive cosine scan, plus the embedding
//! endpoint client and a JSON sidecar for persistence.
//!
//! The corpus is a few hundred chunks per manual, so an exhaustive scan
//! is the whole story. Vectors are L2-normalized on ingestion, which
//! makes dot product equal cosine.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{top_k, RankedList, RetrievalError, StrategyKind};

pub const NORM_TOLERANCE: f64 = 1e-6;

/// Produces one embedding vector per input string, in order.
pub trait EmbeddingClient: Send + Sync {
    fn embed(&self, inputs: &[String]) -> Result<Vec<Vec<f64>>, RetrievalError>;
}

/// chunk_id -> unit-norm vector, all of dimension `dim`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenseIndex {
    dim: usize,
    chunk_ids: Vec<u32>,
    vectors: Vec<Vec<f64>>,
    /// Hash over (chunk parameters, manual content, embedding model);
    /// a mismatch on load forces re-embedding.
    fingerprint: String,
}

pub fn l2_normalize(vector: &mut [f64]) {
    let norm: f64 = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in vector.iter_mut() {
            *x /= norm;
        }
    }
}

/// Content hash guarding index staleness.
pub fn index_fingerprint(
    chunk_size: usize,
    overlap: usize,
    manual_content: &str,
    embedding_model: &str,
) -> String {
    let mut hasher = Sha256::new();
    hasher.update(chunk_size.to_le_bytes());
    hasher.update(overlap.to_le_bytes());
    hasher.update(manual_content.as_bytes());
    hasher.update(embedding_model.as_bytes());
    format!("{:x}", hasher.finalize())
}

impl DenseIndex {
    /// Build from (chunk_id, vector) pairs; vectors are normalized here.
    pub fn build(
        entries: Vec<(u32, Vec<f64>)>,
        fingerprint: String,
    ) -> Result<Self, RetrievalError> {
        if entries.is_empty() {
            return Err(RetrievalError::EmptyCorpus);
        }
        let dim = entries[0].1.len();
        let mut chunk_ids = Vec::with_capacity(entries.len());
        let mut vectors = Vec::with_capacity(entries.len());
        for (id, mut v) in entries {
            if v.len() != dim {
                return Err(RetrievalError::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            l2_normalize(&mut v);
            chunk_ids.push(id);
            vectors.push(v);
        }
        Ok(DenseIndex {
            dim,
            chunk_ids,
            vectors,
            fingerprint,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.chunk_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunk_ids.is_empty()
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Top-k chunks by dot product against a unit-norm query vector.
    pub fn query(&self, query_vector: &[f64], k: usize) -> Result<RankedList, RetrievalError> {
        if k == 0 {
            return Err(RetrievalError::ZeroK);
        }
        if query_vector.len() != self.dim {
            return Err(RetrievalError::DimensionMismatch {
                expected: self.dim,
                got: query_vector.len(),
            });
        }
        let mut normalized = query_vector.to_vec();
        l2_normalize(&mut normalized);
        let scored: Vec<(u32, f64)> = self
            .chunk_ids
            .iter()
            .zip(&self.vectors)
            .map(|(&id, v)| {
                let dot: f64 = v.iter().zip(&normalized).map(|(a, b)| a * b).sum();
                (id, dot)
            })
            .collect();
        Ok(RankedList {
            entries: top_k(scored, k),
            strategy: StrategyKind::Semantic,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), std::io::Error> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, serde_json::to_vec_pretty(self)?)
    }

    /// Load a sidecar file; `None` when missing or when the fingerprint
    /// does not match (stale index).
    pub fn load_if_fresh(path: &Path, fingerprint: &str) -> Option<Self> {
        let content = fs::read_to_string(path).ok()?;
        let index: DenseIndex = serde_json::from_str(&content).ok()?;
        (index.fingerprint == fingerprint).then_some(index)
    }
}

/// HTTP embedding client speaking the common embeddings wire shape:
/// POST `{model, input: [..]}`, response `{data: [{embedding: [..]}]}`.
pub struct HttpEmbeddingClient {
    pub url: String,
    pub model: String,
    client: reqwest::blocking::Client,
}

#[derive(Serialize)]
struct EmbeddingRequest<'a> {
    model: &'a str,
    input: &'a [String],
}

#[derive(Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingDatum>,
}

#[derive(Deserialize)]
struct EmbeddingDatum {
    embedding: Vec<f64>,
}

impl HttpEmbeddingClient {
    pub fn new(url: &str, model: &str, timeout_secs: u64) -> Self {
        HttpEmbeddingClient {
            url: url.to_string(),
            model: model.to_string(),
            client: reqwest::blocking::Client::builder()
                .timeout(std::time::Duration::from_secs(timeout_secs))
                .build()
                .expect("http client"),
        }
    }
}

impl EmbeddingClient for HttpEmbeddingClient {
    fn embed(&self, inputs: &[String]) -> Result<Vec<Vec<f64>>, RetrievalError> {
        let body = EmbeddingRequest {
            model: &self.model,
            input: inputs,
        };
        let response = self
            .client
            .post(&self.url)
            .json(&body)
            .send()
            .map_err(|e| RetrievalError::Embedding(e.to_string()))?;
        if !response.status().is_success() {
            return Err(RetrievalError::Embedding(format!(
                "endpoint returned status {}",
                response.status()
            )));
        }
        let parsed: EmbeddingResponse = response
            .json()
            .map_err(|e| RetrievalError::Embedding(e.to_string()))?;
        if parsed.data.len() != inputs.len() {
            return Err(RetrievalError::Embedding(format!(
                "expected {} vectors, got {}",
                inputs.len(),
                parsed.data.len()
            )));
        }
        Ok(parsed.data.into_iter().map(|d| d.embedding).collect())
    }
}

/// Deterministic offline embeddings: each text hashes to a seed that
/// drives a fixed-dimension pseudo-random unit vector. Identical text
/// always yields the identical vector, so mock runs are reproducible.
pub struct MockEmbeddingClient {
    pub dim: usize,
}

impl MockEmbeddingClient {
    pub fn new(dim: usize) -> Self {
        MockEmbeddingClient { dim }
    }

    pub fn vector_for(&self, text: &str) -> Vec<f64> {
        use rand::{Rng, SeedableRng};
        let digest = Sha256::digest(text.as_bytes());
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest);
        let mut rng = rand_chacha::ChaCha8Rng::from_seed(seed);
        let mut v: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        l2_normalize(&mut v);
        v
    }
}

impl EmbeddingClient for MockEmbeddingClient {
    fn embed(&self, inputs: &[String]) -> Result<Vec<Vec<f64>>, RetrievalError> {
        Ok(inputs.iter().map(|t| self.vector_for(t)).collect())
    }
}
