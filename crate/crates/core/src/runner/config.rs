//! Run configuration: JSON file mirroring the engine's knobs, with CLI
//! overrides applied on top.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::context::ExpansionOrder;
use crate::llm::{ApiStyle, LlmError, ModelEndpoint};

use super::RunError;

fn default_temperature() -> f64 {
    0.0
}
fn default_max_output_tokens() -> u32 {
    512
}
fn default_timeout() -> u64 {
    120
}
fn default_concurrency() -> usize {
    1
}
fn default_retries() -> u32 {
    2
}
fn default_backoff() -> f64 {
    1.0
}
fn default_chunk_size() -> usize {
    200
}
fn default_chunk_overlap() -> usize {
    100
}
fn default_top_k() -> usize {
    3
}
fn default_rrf_k() -> u32 {
    60
}
fn default_fusion_depth() -> usize {
    10
}
fn default_noise_budgets() -> Vec<usize> {
    vec![1000, 2000, 4000, 8000, 16000, 32000, 59000]
}
fn default_expansion_order() -> ExpansionOrder {
    ExpansionOrder::AfterFirst
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_run_id() -> String {
    "run".to_string()
}
fn default_embedding_dim() -> usize {
    64
}

/// One chat endpoint as it appears in the config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndpointSpec {
    pub name: String,
    #[serde(default)]
    pub base_url: String,
    #[serde(default)]
    pub model_id: Option<String>,
    /// "chat", "generate", or "mock:<script.json>"
    pub api_style: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_max_output_tokens")]
    pub max_output_tokens: u32,
    #[serde(default = "default_timeout")]
    pub request_timeout_secs: u64,
    #[serde(default = "default_concurrency")]
    pub max_concurrency: usize,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff")]
    pub backoff_base_secs: f64,
}

impl EndpointSpec {
    pub fn to_endpoint(&self, config_dir: &Path) -> Result<ModelEndpoint, LlmError> {
        let api_style = match ApiStyle::parse(&self.api_style)? {
            // script paths are relative to the config file
            ApiStyle::Mock(p) if p.is_relative() => ApiStyle::Mock(config_dir.join(p)),
            other => other,
        };
        Ok(ModelEndpoint {
            name: self.name.clone(),
            base_url: self.base_url.clone(),
            model_id: self.model_id.clone().unwrap_or_else(|| self.name.clone()),
            temperature: self.temperature,
            max_output_tokens: self.max_output_tokens,
            request_timeout_secs: self.request_timeout_secs,
            max_concurrency: self.max_concurrency,
            max_retries: self.max_retries,
            api_style,
            backoff_base_secs: self.backoff_base_secs,
        })
    }
}

/// The embedding endpoint: either a real HTTP endpoint speaking the
/// common embeddings shape, or deterministic offline mock vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    /// "openai" or "mock"
    pub api_style: String,
    #[serde(default)]
    pub url: String,
    #[serde(default)]
    pub model: String,
    #[serde(default = "default_timeout")]
    pub request_timeout_secs: u64,
    /// Vector dimension used by the mock style.
    #[serde(default = "default_embedding_dim")]
    pub mock_dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    /// language tag -> manual source (page directory or single file)
    pub manuals: BTreeMap<String, PathBuf>,
    pub dataset_path: PathBuf,
    /// "keyword" | "semantic" | "hybrid" | "full_manual" | "noise:<budget>" | "noise"
    /// (bare "noise" expands to every configured noise budget)
    pub strategies: Vec<String>,
    pub endpoints: Vec<EndpointSpec>,
    pub judge_endpoint: EndpointSpec,
    #[serde(default)]
    pub embedding_endpoint: Option<EmbeddingSpec>,
    #[serde(default = "default_chunk_size")]
    pub chunk_size: usize,
    #[serde(default = "default_chunk_overlap")]
    pub chunk_overlap: usize,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    #[serde(default = "default_rrf_k")]
    pub rrf_k: u32,
    #[serde(default = "default_fusion_depth")]
    pub fusion_depth: usize,
    #[serde(default = "default_noise_budgets")]
    pub noise_budgets: Vec<usize>,
    #[serde(default = "default_expansion_order")]
    pub expansion_order: ExpansionOrder,
    /// When true, refusals on unanswerable items still go to the judge
    /// instead of short-circuiting to TN.
    #[serde(default)]
    pub judge_refusals: bool,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_run_id")]
    pub run_id: String,
    /// Directory the config file was loaded from; mock script paths in
    /// endpoint specs resolve against it.
    #[serde(skip, default = "default_config_dir")]
    pub config_dir: PathBuf,
}

fn default_config_dir() -> PathBuf {
    PathBuf::from(".")
}

/// A fully parsed strategy name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StrategyName {
    Keyword,
    Semantic,
    Hybrid,
    FullManual,
    Noise(usize),
}

impl StrategyName {
    pub fn parse(s: &str) -> Result<Self, RunError> {
        match s {
            "keyword" => Ok(StrategyName::Keyword),
            "semantic" => Ok(StrategyName::Semantic),
            "hybrid" => Ok(StrategyName::Hybrid),
            "full_manual" => Ok(StrategyName::FullManual),
            other => {
                if let Some(budget) = other.strip_prefix("noise:") {
                    let budget: usize = budget.parse().map_err(|_| {
                        RunError::Config(format!("invalid noise budget in strategy `{other}`"))
                    })?;
                    if budget == 0 {
                        return Err(RunError::Config(
                            "noise budget must be positive".to_string(),
                        ));
                    }
                    Ok(StrategyName::Noise(budget))
                } else {
                    Err(RunError::Config(format!("unrecognized strategy `{other}`")))
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            StrategyName::Keyword => "keyword".to_string(),
            StrategyName::Semantic => "semantic".to_string(),
            StrategyName::Hybrid => "hybrid".to_string(),
            StrategyName::FullManual => "full_manual".to_string(),
            StrategyName::Noise(b) => format!("noise:{b}"),
        }
    }

    pub fn needs_retrieval(&self) -> bool {
        matches!(
            self,
            StrategyName::Keyword | StrategyName::Semantic | StrategyName::Hybrid
        )
    }

    pub fn needs_embeddings(&self) -> bool {
        matches!(self, StrategyName::Semantic | StrategyName::Hybrid)
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let content = fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config: RunConfig = serde_json::from_str(&content)
            .map_err(|e| RunError::Config(format!("invalid config {}: {e}", path.display())))?;
        // paths in the file are relative to the file itself
        let dir = path.parent().unwrap_or(Path::new("."));
        for source in config.manuals.values_mut() {
            if source.is_relative() {
                *source = dir.join(&*source);
            }
        }
        if config.dataset_path.is_relative() {
            config.dataset_path = dir.join(&config.dataset_path);
        }
        if config.output_dir.is_relative() {
            config.output_dir = dir.join(&config.output_dir);
        }
        config.config_dir = dir.to_path_buf();
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.manuals.is_empty() {
            return Err(RunError::Config("no manuals configured".to_string()));
        }
        if self.endpoints.is_empty() {
            return Err(RunError::Config("no model endpoints configured".to_string()));
        }
        if self.strategies.is_empty() {
            return Err(RunError::Config("no strategies configured".to_string()));
        }
        if self.chunk_overlap >= self.chunk_size {
            return Err(RunError::Config(format!(
                "chunk_overlap ({}) must be smaller than chunk_size ({})",
                self.chunk_overlap, self.chunk_size
            )));
        }
        if self.top_k == 0 {
            return Err(RunError::Config("top_k must be positive".to_string()));
        }
        for w in self.noise_budgets.windows(2) {
            if w[0] >= w[1] {
                return Err(RunError::Config(
                    "noise_budgets must be positive and strictly ascending".to_string(),
                ));
            }
        }
        if self.noise_budgets.first() == Some(&0) {
            return Err(RunError::Config("noise budgets must be positive".to_string()));
        }
        self.resolved_strategies()?;
        Ok(())
    }

    /// Expand and parse the strategy list; bare "noise" becomes one
    /// entry per configured budget. Order is preserved, duplicates
    /// dropped.
    pub fn resolved_strategies(&self) -> Result<Vec<StrategyName>, RunError> {
        let mut out = Vec::new();
        for s in &self.strategies {
            if s == "noise" {
                for &b in &self.noise_budgets {
                    out.push(StrategyName::Noise(b));
                }
            } else {
                out.push(StrategyName::parse(s)?);
            }
        }
        let mut seen = std::collections::HashSet::new();
        out.retain(|s| seen.insert(s.clone()));
        Ok(out)
    }

    pub fn results_dir(&self) -> PathBuf {
        self.output_dir.join("results").join(&self.run_id)
    }

    pub fn reports_dir(&self) -> PathBuf {
        self.output_dir.join("reports").join(&self.run_id)
    }

    pub fn index_dir(&self) -> PathBuf {
        self.output_dir.join("index")
    }
}
