//! Reciprocal Rank Fusion of ranked lists.

use std::collections::HashMap;

use super::{top_k, RankedList, RetrievalError, StrategyKind};

pub const DEFAULT_RRF_K: u32 = 60;

/// Fuse two or more ranked lists: each chunk scores the sum over lists
/// containing it of `1 / (rrf_k + rank)` with 1-based ranks. Chunks
/// absent from a list contribute nothing for it. Ties break by ascending
/// chunk id.
pub fn rrf_fuse(
    lists: &[RankedList],
    rrf_k: u32,
    k: usize,
) -> Result<RankedList, RetrievalError> {
    if k == 0 {
        return Err(RetrievalError::ZeroK);
    }
    let mut scores: HashMap<u32, f64> = HashMap::new();
    for list in lists {
        for (rank0, (chunk_id, _)) in list.entries.iter().enumerate() {
            let rank = rank0 as u32 + 1;
            *scores.entry(*chunk_id).or_insert(0.0) += 1.0 / f64::from(rrf_k + rank);
        }
    }
    let scored: Vec<(u32, f64)> = scores.into_iter().collect();
    Ok(RankedList {
        entries: top_k(scored, k),
        strategy: StrategyKind::Hybrid,
    })
}
