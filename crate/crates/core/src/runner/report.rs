//! CSV report emission: per-slice summary and the long-form noise sweep.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::eval::{compute_metrics, round3, ConfusionCounts, MetricsReport};

use super::{load_records, RunError};

/// One aggregated (model, language, strategy) slice.
#[derive(Debug, Clone)]
pub struct SliceReport {
    pub model: String,
    pub language: String,
    pub strategy: String,
    pub counts: ConfusionCounts,
    pub metrics: MetricsReport,
}

fn fmt_metric(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{:.3}", round3(v)),
        None => String::new(),
    }
}

/// Aggregate a results file into slices, ordered by (model, language,
/// strategy).
pub fn aggregate(records_path: &Path) -> Result<Vec<SliceReport>, RunError> {
    let records = load_records(records_path)?;
    let mut slices: BTreeMap<(String, String, String), ConfusionCounts> = BTreeMap::new();
    for record in records {
        slices
            .entry((record.model.clone(), record.language.clone(), record.strategy.clone()))
            .or_default()
            .add(record.outcome);
    }
    Ok(slices
        .into_iter()
        .map(|((model, language, strategy), counts)| SliceReport {
            model,
            language,
            strategy,
            metrics: compute_metrics(&counts),
            counts,
        })
        .collect())
}

fn noise_budget(strategy: &str) -> Option<usize> {
    strategy.strip_prefix("noise:").and_then(|b| b.parse().ok())
}

/// Write `summary.csv` (one row per slice) and `noise_sweep.csv`
/// (long-form budget/metric points for plotting).
pub fn write_reports(records_path: &Path, reports_dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(reports_dir)?;
    let slices = aggregate(records_path)?;

    let mut summary = csv::Writer::from_path(reports_dir.join("summary.csv"))
        .map_err(|e| RunError::Config(e.to_string()))?;
    summary
        .write_record([
            "model",
            "language",
            "strategy",
            "budget",
            "tp",
            "tn",
            "fp",
            "fn",
            "errored",
            "accuracy",
            "f1",
            "precision",
            "recall",
            "specificity",
        ])
        .map_err(|e| RunError::Config(e.to_string()))?;
    for s in &slices {
        let budget = noise_budget(&s.strategy)
            .map(|b| b.to_string())
            .unwrap_or_default();
        summary
            .write_record([
                s.model.as_str(),
                s.language.as_str(),
                s.strategy.as_str(),
                budget.as_str(),
                &s.counts.tp.to_string(),
                &s.counts.tn.to_string(),
                &s.counts.fp.to_string(),
                &s.counts.fn_.to_string(),
                &s.counts.errored.to_string(),
                &fmt_metric(s.metrics.accuracy),
                &fmt_metric(s.metrics.f1),
                &fmt_metric(s.metrics.precision),
                &fmt_metric(s.metrics.recall),
                &fmt_metric(s.metrics.specificity),
            ])
            .map_err(|e| RunError::Config(e.to_string()))?;
    }
    summary.flush()?;

    let mut sweep = csv::Writer::from_path(reports_dir.join("noise_sweep.csv"))
        .map_err(|e| RunError::Config(e.to_string()))?;
    sweep
        .write_record(["model", "language", "budget", "metric", "value"])
        .map_err(|e| RunError::Config(e.to_string()))?;
    for s in &slices {
        let Some(budget) = noise_budget(&s.strategy) else {
            continue;
        };
        let points = [
            ("accuracy", s.metrics.accuracy),
            ("f1", s.metrics.f1),
            ("precision", s.metrics.precision),
            ("recall", s.metrics.recall),
            ("specificity", s.metrics.specificity),
        ];
        for (metric, value) in points {
            sweep
                .write_record([
                    s.model.as_str(),
                    s.language.as_str(),
                    &budget.to_string(),
                    metric,
                    &fmt_metric(value),
                ])
                .map_err(|e| RunError::Config(e.to_string()))?;
        }
    }
    sweep.flush()?;
    Ok(())
}
