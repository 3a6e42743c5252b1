//! Benchmark orchestration: sweeps over models, languages, and
//! strategies, with append-only JSONL persistence, resume, and report
//! emission.

pub mod audit;
pub mod config;
pub mod mockserve;
pub mod report;
pub mod strategy;

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chunker::{chunk_document, Chunk};
use crate::context::ContextError;
use crate::corpus::{load_manual, load_qa_dataset, CorpusError, ManualDocument, QAItem};
use crate::eval::{classify, Outcome};
use crate::llm::{
    judge, prompt_hash, render_question_prompt, JudgeVerdict, LlmClient, LlmError, Verdict,
};
use crate::retrieval::{
    dense::{index_fingerprint, DenseIndex, HttpEmbeddingClient, MockEmbeddingClient},
    Bm25Index, EmbeddingClient, HybridRetriever, KeywordRetriever, RetrievalError,
    SemanticRetriever,
};

use config::{EmbeddingSpec, RunConfig, StrategyName};
use strategy::{
    EvalStrategy, FullManualStrategy, NoiseStrategy, Provenance, RagStrategy, StrategyRegistry,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("chunking failed: {0}")]
    Chunk(#[from] crate::chunker::ChunkError),
    #[error("retrieval failed for {qa_id}: {source}")]
    Retrieval {
        qa_id: String,
        source: RetrievalError,
    },
    #[error("context build failed for {qa_id}: {source}")]
    Context { qa_id: String, source: ContextError },
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("embedding failed: {0}")]
    Embedding(String),
}

/// One persisted result line. `(qa_id, language, strategy, model)` is the
/// resume key; re-running skips existing keys.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalRecord {
    pub qa_id: String,
    pub language: String,
    pub strategy: String,
    pub model: String,
    pub provenance: Option<Provenance>,
    pub prompt_hash: String,
    pub answer: String,
    pub verdict: Option<Verdict>,
    pub outcome: Outcome,
    pub latency_secs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Default)]
pub struct RunSummary {
    pub new_records: usize,
    pub skipped_records: usize,
    pub errored_records: usize,
    pub records_path: PathBuf,
    pub reports_dir: PathBuf,
}

struct LanguageResources {
    registry: StrategyRegistry,
}

fn embedding_client(spec: &EmbeddingSpec) -> Result<Arc<dyn EmbeddingClient>, RunError> {
    match spec.api_style.as_str() {
        "mock" => Ok(Arc::new(MockEmbeddingClient::new(spec.mock_dim))),
        "openai" => Ok(Arc::new(HttpEmbeddingClient::new(
            &spec.url,
            &spec.model,
            spec.request_timeout_secs,
        ))),
        other => Err(RunError::Config(format!(
            "unknown embedding api_style `{other}`"
        ))),
    }
}

fn embedding_model_label(spec: &EmbeddingSpec) -> String {
    match spec.api_style.as_str() {
        "mock" => format!("mock:{}", spec.mock_dim),
        _ => spec.model.clone(),
    }
}

/// Build (or reload from its sidecar) the dense index for one language.
pub fn build_dense_index(
    config: &RunConfig,
    language: &str,
    doc: &ManualDocument,
    chunks: &[Chunk],
) -> Result<DenseIndex, RunError> {
    let spec = config
        .embedding_endpoint
        .as_ref()
        .ok_or_else(|| RunError::Config("semantic/hybrid strategies need an embedding_endpoint".to_string()))?;
    let manual_content: String = doc.pages.iter().map(|p| p.text.as_str()).collect();
    let fingerprint = index_fingerprint(
        config.chunk_size,
        config.chunk_overlap,
        &manual_content,
        &embedding_model_label(spec),
    );
    let sidecar = config.index_dir().join(format!("{language}.json"));
    if let Some(index) = DenseIndex::load_if_fresh(&sidecar, &fingerprint) {
        return Ok(index);
    }
    let client = embedding_client(spec)?;
    let texts: Vec<String> = chunks.iter().map(|c| c.text.clone()).collect();
    let vectors = client
        .embed(&texts)
        .map_err(|e| RunError::Embedding(e.to_string()))?;
    if vectors.len() != chunks.len() {
        return Err(RunError::Embedding(format!(
            "expected {} vectors, got {}",
            chunks.len(),
            vectors.len()
        )));
    }
    let entries = chunks
        .iter()
        .map(|c| c.chunk_id)
        .zip(vectors)
        .map(|(id, v)| (id, v))
        .collect();
    let index = DenseIndex::build(entries, fingerprint)
        .map_err(|e| RunError::Embedding(e.to_string()))?;
    index.save(&sidecar)?;
    Ok(index)
}

fn prepare_language(
    config: &RunConfig,
    language: &str,
    source: &std::path::Path,
    strategies: &[StrategyName],
    items: &[QAItem],
) -> Result<LanguageResources, RunError> {
    let doc = Arc::new(load_manual(source, language)?);
    for item in items {
        if doc.page(item.target_page).is_none() {
            return Err(RunError::Config(format!(
                "dataset item {} targets page {} which is missing from the {language} manual",
                item.id, item.target_page
            )));
        }
    }

    let needs_retrieval = strategies.iter().any(|s| s.needs_retrieval());
    let needs_embeddings = strategies.iter().any(|s| s.needs_embeddings());

    let chunks: Arc<Vec<Chunk>> = if needs_retrieval {
        Arc::new(chunk_document(&doc, config.chunk_size, config.chunk_overlap)?)
    } else {
        Arc::new(Vec::new())
    };
    let bm25 = if needs_retrieval {
        Some(Arc::new(Bm25Index::build(&chunks).map_err(|e| {
            RunError::Config(format!("BM25 build failed for {language}: {e}"))
        })?))
    } else {
        None
    };
    let dense = if needs_embeddings {
        Some(Arc::new(build_dense_index(config, language, &doc, &chunks)?))
    } else {
        None
    };

    let mut registry = StrategyRegistry::new();
    for name in strategies {
        match name {
            StrategyName::Keyword => registry.register(Box::new(RagStrategy {
                label: name.label(),
                retriever: Arc::new(KeywordRetriever {
                    index: bm25.clone().unwrap(),
                }),
                chunks: chunks.clone(),
                top_k: config.top_k,
            })),
            StrategyName::Semantic => registry.register(Box::new(RagStrategy {
                label: name.label(),
                retriever: Arc::new(SemanticRetriever {
                    index: dense.clone().unwrap(),
                    client: embedding_client(config.embedding_endpoint.as_ref().unwrap())?,
                }),
                chunks: chunks.clone(),
                top_k: config.top_k,
            })),
            StrategyName::Hybrid => registry.register(Box::new(RagStrategy {
                label: name.label(),
                retriever: Arc::new(HybridRetriever {
                    keyword: KeywordRetriever {
                        index: bm25.clone().unwrap(),
                    },
                    semantic: SemanticRetriever {
                        index: dense.clone().unwrap(),
                        client: embedding_client(config.embedding_endpoint.as_ref().unwrap())?,
                    },
                    rrf_k: config.rrf_k,
                    fusion_depth: config.fusion_depth,
                }),
                chunks: chunks.clone(),
                top_k: config.top_k,
            })),
            StrategyName::FullManual => {
                registry.register(Box::new(FullManualStrategy { doc: doc.clone() }))
            }
            StrategyName::Noise(budget) => registry.register(Box::new(NoiseStrategy {
                label: name.label(),
                doc: doc.clone(),
                budget: *budget,
                order: config.expansion_order,
            })),
        }
    }
    Ok(LanguageResources { registry })
}

/// Build every index the configured strategies need, without running any
/// model requests. The expensive phase, cacheable independently of runs.
pub fn build_indexes(config: &RunConfig) -> Result<(), RunError> {
    let strategies = config.resolved_strategies()?;
    let items = load_qa_dataset(&config.dataset_path)?;
    for (language, source) in &config.manuals {
        prepare_language(config, language, source, &strategies, &items)?;
    }
    Ok(())
}

fn evaluate_item(
    item: &QAItem,
    language: &str,
    strategy: &dyn EvalStrategy,
    model_client: &LlmClient,
    judge_client: &LlmClient,
    judge_refusals: bool,
) -> EvalRecord {
    let model = model_client.endpoint.name.clone();
    let base = |outcome: Outcome| EvalRecord {
        qa_id: item.id.clone(),
        language: language.to_string(),
        strategy: strategy.name().to_string(),
        model: model.clone(),
        provenance: None,
        prompt_hash: String::new(),
        answer: String::new(),
        verdict: None,
        outcome,
        latency_secs: 0.0,
        error: None,
    };

    let context = match strategy.build_context(item) {
        Ok(c) => c,
        Err(e) => {
            let mut record = base(Outcome::ERR);
            record.error = Some(e.to_string());
            return record;
        }
    };
    let prompt = render_question_prompt(&context.text, &item.question);
    let hash = prompt_hash(&prompt);

    let answer = match model_client.ask(&prompt, Some(&item.id)) {
        Ok(a) => a,
        Err(e) => {
            let mut record = base(Outcome::ERR);
            record.provenance = Some(context.provenance);
            record.prompt_hash = hash;
            record.error = Some(e.to_string());
            return record;
        }
    };

    // refusal on an unanswerable item is a TN without judge traffic,
    // unless the config asks to judge refusals too
    let verdict: Option<JudgeVerdict> = if !item.answerable && answer.is_refusal && !judge_refusals
    {
        None
    } else {
        match judge(
            judge_client,
            &item.question,
            &answer.extracted,
            &item.expected_answer,
            Some(&item.id),
        ) {
            Ok(v) => Some(v),
            Err(e) => {
                let mut record = base(Outcome::ERR);
                record.provenance = Some(context.provenance);
                record.prompt_hash = hash;
                record.answer = answer.extracted;
                record.error = Some(e.to_string());
                return record;
            }
        }
    };

    let outcome = match &verdict {
        Some(v) => classify(item, &answer, v),
        None => Outcome::TN,
    };
    EvalRecord {
        qa_id: item.id.clone(),
        language: language.to_string(),
        strategy: strategy.name().to_string(),
        model,
        provenance: Some(context.provenance),
        prompt_hash: hash,
        answer: answer.extracted,
        verdict: verdict.map(|v| v.verdict),
        outcome,
        latency_secs: answer.latency_secs,
        error: None,
    }
}

/// Run the work items with up to `concurrency` threads, preserving input
/// order in the output.
fn ordered_parallel<T, F>(count: usize, concurrency: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let concurrency = concurrency.max(1).min(count.max(1));
    if concurrency <= 1 {
        return (0..count).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..count).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..concurrency {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= count {
                    break;
                }
                *slots[i].lock().unwrap() = Some(f(i));
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("worker filled slot"))
        .collect()
}

/// Execute the configured sweep. `limit` caps the number of new records,
/// which makes interrupted runs reproducible in tests.
pub fn run(config: &RunConfig, limit: Option<usize>) -> Result<RunSummary, RunError> {
    config.validate()?;
    let strategies = config.resolved_strategies()?;
    let mut items = load_qa_dataset(&config.dataset_path)?;
    items.sort_by(|a, b| a.id.cmp(&b.id));

    let config_dir = config.config_dir.as_path();
    let judge_client = Arc::new(LlmClient::new(
        config.judge_endpoint.to_endpoint(config_dir)?,
    )?);
    let mut model_clients = Vec::new();
    for spec in &config.endpoints {
        model_clients.push(Arc::new(LlmClient::new(spec.to_endpoint(config_dir)?)?));
    }

    let mut languages: BTreeMap<String, LanguageResources> = BTreeMap::new();
    for (language, source) in &config.manuals {
        languages.insert(
            language.clone(),
            prepare_language(config, language, source, &strategies, &items)?,
        );
    }

    let results_dir = config.results_dir();
    fs::create_dir_all(&results_dir)?;
    let records_path = results_dir.join("records.jsonl");
    let existing = load_existing_keys(&records_path)?;

    let mut summary = RunSummary {
        records_path: records_path.clone(),
        reports_dir: config.reports_dir(),
        ..Default::default()
    };
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&records_path)?;

    'outer: for client in &model_clients {
        for (language, resources) in &languages {
            for strategy_name in &strategies {
                let strategy = resources.registry.get(&strategy_name.label())?;
                let pending: Vec<&QAItem> = items
                    .iter()
                    .filter(|item| {
                        !existing.contains(&record_key(
                            &item.id,
                            language,
                            &strategy_name.label(),
                            &client.endpoint.name,
                        ))
                    })
                    .collect();
                summary.skipped_records += items.len() - pending.len();

                let remaining = limit.map(|l| l.saturating_sub(summary.new_records));
                let take = remaining.unwrap_or(pending.len()).min(pending.len());
                let batch = &pending[..take];

                let records = ordered_parallel(batch.len(), client.endpoint.max_concurrency, |i| {
                    evaluate_item(
                        batch[i],
                        language,
                        strategy,
                        client,
                        &judge_client,
                        config.judge_refusals,
                    )
                });
                for record in records {
                    if record.outcome == Outcome::ERR {
                        summary.errored_records += 1;
                    }
                    serde_json::to_writer(&mut file, &record)
                        .map_err(|e| RunError::Io(e.into()))?;
                    file.write_all(b"\n")?;
                    summary.new_records += 1;
                }
                file.flush()?;
                if limit.is_some_and(|l| summary.new_records >= l) {
                    break 'outer;
                }
            }
        }
    }
    drop(file);

    report::write_reports(&records_path, &config.reports_dir())?;
    Ok(summary)
}

fn record_key(qa_id: &str, language: &str, strategy: &str, model: &str) -> String {
    format!("{qa_id}\u{1f}{language}\u{1f}{strategy}\u{1f}{model}")
}

fn load_existing_keys(path: &std::path::Path) -> Result<HashSet<String>, RunError> {
    let mut keys = HashSet::new();
    if !path.exists() {
        return Ok(keys);
    }
    let content = fs::read_to_string(path)?;
    for line in content.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let record: EvalRecord = serde_json::from_str(line)
            .map_err(|e| RunError::Config(format!("corrupt record line: {e}")))?;
        keys.insert(record_key(
            &record.qa_id,
            &record.language,
            &record.strategy,
            &record.model,
        ));
    }
    Ok(keys)
}

/// Read every record in a results file.
pub fn load_records(path: &std::path::Path) -> Result<Vec<EvalRecord>, RunError> {
    let mut records = Vec::new();
    if !path.exists() {
        return Ok(records);
    }
    let content = fs::read_to_string(path)?;
    for line in content.lines() {
        if line.trim().is_empty() {
            continue;
        }
        records.push(
            serde_json::from_str(line)
                .map_err(|e| RunError::Config(format!("corrupt record line: {e}")))?,
        );
    }
    Ok(records)
}
