//! The three retrieval strategies: BM25 keyword ranking, dense cosine
//! ranking over an embedding endpoint, and hybrid reciprocal-rank fusion.
//!
//! Every retriever implements [`Retriever`] and is selected by name at
//! runtime through [`RetrieverRegistry`].

pub mod bm25;
pub mod dense;
pub mod rrf;

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bm25::Bm25Index;
pub use dense::{DenseIndex, EmbeddingClient};
pub use rrf::rrf_fuse;

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("k must be positive")]
    ZeroK,
    #[error("cannot build an index over an empty chunk list")]
    EmptyCorpus,
    #[error("query vector dimension {got} does not match index dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("embedding request failed: {0}")]
    Embedding(String),
    #[error("unknown retrieval strategy: {0}")]
    UnknownStrategy(String),
}

/// Which strategy produced a ranked list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Keyword,
    Semantic,
    Hybrid,
}

/// Ordered chunk references with scores. Scores are non-increasing and
/// ties are broken by ascending chunk id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub entries: Vec<(u32, f64)>,
    pub strategy: StrategyKind,
}

impl RankedList {
    pub fn chunk_ids(&self) -> Vec<u32> {
        self.entries.iter().map(|(id, _)| *id).collect()
    }
}

/// Sort scored chunks by descending score, ties by ascending chunk id,
/// and keep the top `k`.
pub(crate) fn top_k(mut scored: Vec<(u32, f64)>, k: usize) -> Vec<(u32, f64)> {
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    scored.truncate(k);
    scored
}

/// A retrieval strategy: question in, top-k ranked chunks out.
pub trait Retriever: Send + Sync {
    fn kind(&self) -> StrategyKind;
    fn retrieve(&self, question: &str, k: usize) -> Result<RankedList, RetrievalError>;
}

/// Keyword retrieval backed by a BM25 index.
pub struct KeywordRetriever {
    pub index: Arc<Bm25Index>,
}

impl Retriever for KeywordRetriever {
    fn kind(&self) -> StrategyKind {
        StrategyKind::Keyword
    }

    fn retrieve(&self, question: &str, k: usize) -> Result<RankedList, RetrievalError> {
        self.index.query(question, k)
    }
}

/// Semantic retrieval: embed the question, rank chunks by cosine.
pub struct SemanticRetriever {
    pub index: Arc<DenseIndex>,
    pub client: Arc<dyn EmbeddingClient>,
}

impl Retriever for SemanticRetriever {
    fn kind(&self) -> StrategyKind {
        StrategyKind::Semantic
    }

    fn retrieve(&self, question: &str, k: usize) -> Result<RankedList, RetrievalError> {
        let vector = self
            .client
            .embed(&[question.to_string()])
            .map_err(|e| RetrievalError::Embedding(e.to_string()))?
            .into_iter()
            .next()
            .ok_or_else(|| RetrievalError::Embedding("empty embedding response".to_string()))?;
        self.index.query(&vector, k)
    }
}

/// Hybrid retrieval: fuse keyword and semantic lists with RRF.
///
/// Each input list is taken to `fusion_depth` before fusing, so rank
/// evidence beyond the final top-k still counts.
pub struct HybridRetriever {
    pub keyword: KeywordRetriever,
    pub semantic: SemanticRetriever,
    pub rrf_k: u32,
    pub fusion_depth: usize,
}

impl Retriever for HybridRetriever {
    fn kind(&self) -> StrategyKind {
        StrategyKind::Hybrid
    }

    fn retrieve(&self, question: &str, k: usize) -> Result<RankedList, RetrievalError> {
        if k == 0 {
            return Err(RetrievalError::ZeroK);
        }
        let keyword = self.keyword.retrieve(question, self.fusion_depth)?;
        let semantic = self.semantic.retrieve(question, self.fusion_depth)?;
        rrf_fuse(&[keyword, semantic], self.rrf_k, k)
    }
}

/// Name-keyed registry of retrieval strategies.
#[derive(Default)]
pub struct RetrieverRegistry {
    retrievers: HashMap<String, Arc<dyn Retriever>>,
}

impl RetrieverRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: &str, retriever: Arc<dyn Retriever>) {
        self.retrievers.insert(name.to_string(), retriever);
    }

    pub fn get(&self, name: &str) -> Result<&Arc<dyn Retriever>, RetrievalError> {
        self.retrievers
            .get(name)
            .ok_or_else(|| RetrievalError::UnknownStrategy(name.to_string()))
    }

    pub fn names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.retrievers.keys().map(|s| s.as_str()).collect();
        names.sort_unstable();
        names
    }
}
