//! Consistency audit of published metric tables: for each row, find the
//! integer confusion counts that reproduce the rounded metrics, or flag
//! the row as infeasible.

use std::fs;
use std::path::Path;

use crate::eval::{back_solve_counts, BackSolveResult, PublishedMetrics};

use super::RunError;

#[derive(Debug, Clone)]
pub struct AuditRow {
    pub label: String,
    pub metrics: PublishedMetrics,
    pub result: BackSolveResult,
}

#[derive(Debug, Default)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
}

impl AuditReport {
    pub fn infeasible_count(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.result == BackSolveResult::Infeasible)
            .count()
    }

    /// One line per row: the back-solved counts or INFEASIBLE.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            match row.result {
                BackSolveResult::Unique(c) => out.push_str(&format!(
                    "{}: tp={} tn={} fp={} fn={} OK\n",
                    row.label, c.tp, c.tn, c.fp, c.fn_
                )),
                BackSolveResult::Ambiguous(n) => {
                    out.push_str(&format!("{}: AMBIGUOUS ({n} solutions)\n", row.label))
                }
                BackSolveResult::Infeasible => {
                    out.push_str(&format!("{}: INFEASIBLE\n", row.label))
                }
            }
        }
        out
    }
}

/// Audit a CSV of published rows. The file needs `accuracy`, `f1`,
/// `precision`, `recall`, `specificity` columns; every other column
/// becomes part of the row label.
pub fn audit_tables(
    published_csv: &Path,
    positives: u32,
    negatives: u32,
) -> Result<AuditReport, RunError> {
    let content = fs::read_to_string(published_csv)
        .map_err(|e| RunError::Config(format!("cannot read {}: {e}", published_csv.display())))?;
    let mut reader = csv::Reader::from_reader(content.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| RunError::Config(e.to_string()))?
        .clone();
    let metric_names = ["accuracy", "f1", "precision", "recall", "specificity"];
    let mut metric_idx = Vec::new();
    for name in metric_names {
        let idx = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| RunError::Config(format!("published CSV missing column `{name}`")))?;
        metric_idx.push(idx);
    }

    let mut report = AuditReport::default();
    for row in reader.records() {
        let row = row.map_err(|e| RunError::Config(e.to_string()))?;
        let mut values = [0.0f64; 5];
        for (slot, &idx) in values.iter_mut().zip(&metric_idx) {
            *slot = row
                .get(idx)
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|e| RunError::Config(format!("bad metric value in audit row: {e}")))?;
        }
        let metrics = PublishedMetrics {
            accuracy: values[0],
            f1: values[1],
            precision: values[2],
            recall: values[3],
            specificity: values[4],
        };
        let label: Vec<String> = headers
            .iter()
            .enumerate()
            .filter(|(i, _)| !metric_idx.contains(i))
            .map(|(i, _)| row.get(i).unwrap_or("").to_string())
            .collect();
        report.rows.push(AuditRow {
            label: label.join("/"),
            result: back_solve_counts(&metrics, positives, negatives),
            metrics,
        });
    }
    Ok(report)
}
