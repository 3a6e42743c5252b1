//! Benchmark engine for question answering over long technical manuals.
//!
//! The engine compares three retrieval strategies (keyword BM25, dense
//! cosine similarity, and hybrid reciprocal-rank fusion) against direct
//! long-context prompting with controlled page noise. Answers are scored
//! by an LLM judge and aggregated into confusion-matrix metrics per
//! model, language, and strategy.

pub mod chunker;
pub mod context;
pub mod corpus;
pub mod eval;
pub mod llm;
pub mod retrieval;
pub mod runner;
