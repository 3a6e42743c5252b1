use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};

use manualqa::llm::MockScript;
use manualqa::runner::{self, audit, config::RunConfig, mockserve::MockServer, report};

#[derive(Parser)]
#[command(
    name = "manualqa",
    about = "Benchmark LLM question answering over long technical manuals",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build retrieval indexes (chunking plus embeddings) without
    /// issuing any model requests
    Index {
        /// Path to the run config JSON
        #[arg(long)]
        config: PathBuf,
    },
    /// Execute the configured benchmark sweep and write reports
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Comma list overriding the config's strategies
        #[arg(long, value_delimiter = ',')]
        strategies: Option<Vec<String>>,
        /// Comma list of model endpoint names to include
        #[arg(long, value_delimiter = ',')]
        models: Option<Vec<String>>,
        /// Comma list of language tags to include
        #[arg(long, value_delimiter = ',')]
        languages: Option<Vec<String>>,
        /// Comma list overriding the config's noise budgets
        #[arg(long, value_delimiter = ',')]
        noise_budgets: Option<Vec<usize>>,
        /// Run identifier (results/<run-id>/records.jsonl)
        #[arg(long)]
        run_id: Option<String>,
        /// Stop after this many new records (mainly for resume tests)
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Regenerate CSV reports from an existing results file
    Report {
        /// Path to a records.jsonl file
        #[arg(long)]
        records: PathBuf,
        /// Directory to write summary.csv and noise_sweep.csv into
        #[arg(long)]
        out: PathBuf,
    },
    /// Check published metric tables for confusion-count consistency
    Audit {
        /// CSV with accuracy,f1,precision,recall,specificity columns
        #[arg(long)]
        published: PathBuf,
        /// Number of answerable questions per table row
        #[arg(long, default_value_t = 54)]
        positives: u32,
        /// Number of unanswerable questions per table row
        #[arg(long, default_value_t = 54)]
        negatives: u32,
        /// Optional file to write the audit report to (stdout otherwise)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve a mock script over HTTP (chat, generate, and embeddings)
    MockServe {
        /// Path to the mock script JSON
        #[arg(long)]
        script: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8713")]
        addr: String,
        /// Dimension of the deterministic mock embedding vectors
        #[arg(long, default_value_t = 64)]
        embedding_dim: usize,
    },
}

fn apply_overrides(
    config: &mut RunConfig,
    strategies: Option<Vec<String>>,
    models: Option<Vec<String>>,
    languages: Option<Vec<String>>,
    noise_budgets: Option<Vec<usize>>,
    run_id: Option<String>,
) -> anyhow::Result<()> {
    if let Some(strategies) = strategies {
        config.strategies = strategies;
    }
    if let Some(models) = models {
        config.endpoints.retain(|e| models.contains(&e.name));
        anyhow::ensure!(
            !config.endpoints.is_empty(),
            "--models matched no configured endpoint"
        );
    }
    if let Some(languages) = languages {
        config.manuals.retain(|lang, _| languages.contains(lang));
        anyhow::ensure!(
            !config.manuals.is_empty(),
            "--languages matched no configured manual"
        );
    }
    if let Some(budgets) = noise_budgets {
        config.noise_budgets = budgets;
    }
    if let Some(run_id) = run_id {
        config.run_id = run_id;
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Index { config } => {
            let config = RunConfig::load(&config)?;
            runner::build_indexes(&config)?;
            println!("indexes ready under {}", config.index_dir().display());
        }
        Command::Run {
            config,
            strategies,
            models,
            languages,
            noise_budgets,
            run_id,
            limit,
        } => {
            let mut config = RunConfig::load(&config)?;
            apply_overrides(&mut config, strategies, models, languages, noise_budgets, run_id)?;
            let summary = runner::run(&config, limit)?;
            println!(
                "run complete: {} new, {} skipped, {} errored",
                summary.new_records, summary.skipped_records, summary.errored_records
            );
            println!("records: {}", summary.records_path.display());
            println!("reports: {}", summary.reports_dir.display());
        }
        Command::Report { records, out } => {
            report::write_reports(&records, &out)?;
            println!("reports written to {}", out.display());
        }
        Command::Audit {
            published,
            positives,
            negatives,
            out,
        } => {
            let report = audit::audit_tables(&published, positives, negatives)?;
            let rendered = report.render();
            match out {
                Some(path) => {
                    std::fs::write(&path, &rendered)
                        .with_context(|| format!("writing {}", path.display()))?;
                    println!("audit written to {}", path.display());
                }
                None => print!("{rendered}"),
            }
            println!(
                "{} rows, {} infeasible",
                report.rows.len(),
                report.infeasible_count()
            );
            if report.infeasible_count() > 0 {
                std::process::exit(1);
            }
        }
        Command::MockServe {
            script,
            addr,
            embedding_dim,
        } => {
            let script = MockScript::load(&script)?;
            let server = MockServer::bind(&addr, script, embedding_dim)?;
            println!("mock server listening on {}", server.local_addr()?);
            server.serve()?;
        }
    }
    Ok(())
}
