//! Okapi BM25 over an inverted index of chunk terms.

use std::collections::HashMap;

use crate::chunker::Chunk;
use crate::corpus::tokenize_terms;

use super::{top_k, RankedList, RetrievalError, StrategyKind};

pub const DEFAULT_K1: f64 = 1.5;
pub const DEFAULT_B: f64 = 0.75;

/// Inverted index with BM25 scoring. Terms come from the shared
/// tokenizer, case-folded.
#[derive(Debug)]
pub struct Bm25Index {
    /// term -> (chunk_id, term frequency) postings
    postings: HashMap<String, Vec<(u32, u32)>>,
    chunk_lengths: HashMap<u32, usize>,
    average_chunk_length: f64,
    chunk_count: usize,
    k1: f64,
    b: f64,
}

impl Bm25Index {
    pub fn build(chunks: &[Chunk]) -> Result<Self, RetrievalError> {
        Self::build_with_params(chunks, DEFAULT_K1, DEFAULT_B)
    }

    pub fn build_with_params(chunks: &[Chunk], k1: f64, b: f64) -> Result<Self, RetrievalError> {
        if chunks.is_empty() {
            return Err(RetrievalError::EmptyCorpus);
        }
        let mut postings: HashMap<String, Vec<(u32, u32)>> = HashMap::new();
        let mut chunk_lengths = HashMap::new();
        let mut total_len = 0usize;
        for chunk in chunks {
            let terms = tokenize_terms(&chunk.text);
            total_len += terms.len();
            chunk_lengths.insert(chunk.chunk_id, terms.len());
            let mut tf: HashMap<String, u32> = HashMap::new();
            for term in terms {
                *tf.entry(term).or_insert(0) += 1;
            }
            for (term, freq) in tf {
                postings.entry(term).or_default().push((chunk.chunk_id, freq));
            }
        }
        Ok(Bm25Index {
            postings,
            average_chunk_length: total_len as f64 / chunks.len() as f64,
            chunk_count: chunks.len(),
            chunk_lengths,
            k1,
            b,
        })
    }

    /// IDF with the +1 inside the log, so it never goes negative.
    fn idf(&self, doc_freq: usize) -> f64 {
        let n = self.chunk_count as f64;
        let n_t = doc_freq as f64;
        (1.0 + (n - n_t + 0.5) / (n_t + 0.5)).ln()
    }

    /// Top-k chunks by BM25 score. Only chunks scoring above zero are
    /// returned; query terms are deduplicated.
    pub fn query(&self, question: &str, k: usize) -> Result<RankedList, RetrievalError> {
        if k == 0 {
            return Err(RetrievalError::ZeroK);
        }
        let mut terms = tokenize_terms(question);
        terms.sort_unstable();
        terms.dedup();

        let mut scores: HashMap<u32, f64> = HashMap::new();
        for term in &terms {
            let Some(postings) = self.postings.get(term) else {
                continue;
            };
            let idf = self.idf(postings.len());
            for &(chunk_id, tf) in postings {
                let len = self.chunk_lengths[&chunk_id] as f64;
                let tf = tf as f64;
                let denom =
                    tf + self.k1 * (1.0 - self.b + self.b * len / self.average_chunk_length);
                *scores.entry(chunk_id).or_insert(0.0) += idf * tf * (self.k1 + 1.0) / denom;
            }
        }
        let scored: Vec<(u32, f64)> = scores.into_iter().filter(|&(_, s)| s > 0.0).collect();
        Ok(RankedList {
            entries: top_k(scored, k),
            strategy: StrategyKind::Keyword,
        })
    }
}
