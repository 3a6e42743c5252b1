//! Evaluation strategies behind one trait: each variant turns a QA item
//! into prompt context. RAG variants delegate to a retriever; the
//! long-context variants build page windows.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chunker::Chunk;
use crate::context::{
    build_noise_context, full_manual_context, render_context_text, ExpansionOrder,
};
use crate::corpus::{ManualDocument, QAItem};
use crate::retrieval::Retriever;

use super::RunError;

/// Where the context came from, persisted with each record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Provenance {
    Chunks { chunk_ids: Vec<u32> },
    Pages {
        first: u32,
        last: u32,
        #[serde(default)]
        budget_exceeded: bool,
    },
}

#[derive(Debug, Clone)]
pub struct BuiltContext {
    pub text: String,
    pub provenance: Provenance,
}

/// An interchangeable evaluation strategy, selected by name at runtime.
pub trait EvalStrategy: Send + Sync {
    fn name(&self) -> &str;
    fn build_context(&self, item: &QAItem) -> Result<BuiltContext, RunError>;
}

/// RAG: retrieve top-k chunks and join them in rank order, each preceded
/// by a provenance marker line.
pub struct RagStrategy {
    pub label: String,
    pub retriever: Arc<dyn Retriever>,
    pub chunks: Arc<Vec<Chunk>>,
    pub top_k: usize,
}

impl EvalStrategy for RagStrategy {
    fn name(&self) -> &str {
        &self.label
    }

    fn build_context(&self, item: &QAItem) -> Result<BuiltContext, RunError> {
        let ranked = self
            .retriever
            .retrieve(&item.question, self.top_k)
            .map_err(|e| RunError::Retrieval {
                qa_id: item.id.clone(),
                source: e,
            })?;
        let mut text = String::new();
        let mut chunk_ids = Vec::new();
        for &(chunk_id, _) in &ranked.entries {
            let chunk = &self.chunks[chunk_id as usize];
            debug_assert_eq!(chunk.chunk_id, chunk_id);
            text.push_str(&format!(
                "--- Chunk {chunk_id} (pages {}-{}) ---\n",
                chunk.page_span.0, chunk.page_span.1
            ));
            text.push_str(&chunk.text);
            text.push('\n');
            chunk_ids.push(chunk_id);
        }
        Ok(BuiltContext {
            text,
            provenance: Provenance::Chunks { chunk_ids },
        })
    }
}

/// Long-context: the item's target page plus surrounding pages as noise
/// up to a token budget.
pub struct NoiseStrategy {
    pub label: String,
    pub doc: Arc<ManualDocument>,
    pub budget: usize,
    pub order: ExpansionOrder,
}

impl EvalStrategy for NoiseStrategy {
    fn name(&self) -> &str {
        &self.label
    }

    fn build_context(&self, item: &QAItem) -> Result<BuiltContext, RunError> {
        let window = build_noise_context(&self.doc, item.target_page, self.budget, self.order)
            .map_err(|e| RunError::Context {
                qa_id: item.id.clone(),
                source: e,
            })?;
        Ok(BuiltContext {
            text: render_context_text(&self.doc, &window),
            provenance: Provenance::Pages {
                first: *window.pages.first().unwrap(),
                last: *window.pages.last().unwrap(),
                budget_exceeded: window.budget_exceeded,
            },
        })
    }
}

/// Long-context: the entire manual.
pub struct FullManualStrategy {
    pub doc: Arc<ManualDocument>,
}

impl EvalStrategy for FullManualStrategy {
    fn name(&self) -> &str {
        "full_manual"
    }

    fn build_context(&self, _item: &QAItem) -> Result<BuiltContext, RunError> {
        let window = full_manual_context(&self.doc);
        Ok(BuiltContext {
            text: render_context_text(&self.doc, &window),
            provenance: Provenance::Pages {
                first: *window.pages.first().unwrap(),
                last: *window.pages.last().unwrap(),
                budget_exceeded: false,
            },
        })
    }
}

/// Name-keyed registry of strategies for one language.
#[derive(Default)]
pub struct StrategyRegistry {
    strategies: HashMap<String, Box<dyn EvalStrategy>>,
}

impl StrategyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, strategy: Box<dyn EvalStrategy>) {
        self.strategies.insert(strategy.name().to_string(), strategy);
    }

    pub fn get(&self, name: &str) -> Result<&dyn EvalStrategy, RunError> {
        self.strategies
            .get(name)
            .map(|s| s.as_ref())
            .ok_or_else(|| RunError::Config(format!("strategy `{name}` not registered")))
    }
}
