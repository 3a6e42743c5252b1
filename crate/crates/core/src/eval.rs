//! Outcome classification and confusion-matrix metrics.
//!
//! Answerable questions are positives, unanswerable ones negatives.
//! A correct refusal on an unanswerable question is a true negative; a
//! substantive wrong answer to one is a false positive (hallucination).

use serde::{Deserialize, Serialize};

use crate::corpus::QAItem;
use crate::llm::{JudgeVerdict, ModelAnswer, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    TP,
    TN,
    FP,
    FN,
    /// Transport or other unrecoverable failure; excluded from counts.
    ERR,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u32,
    pub tn: u32,
    pub fp: u32,
    pub fn_: u32,
    pub errored: u32,
}

impl ConfusionCounts {
    pub fn new(tp: u32, tn: u32, fp: u32, fn_: u32) -> Self {
        ConfusionCounts {
            tp,
            tn,
            fp,
            fn_,
            errored: 0,
        }
    }

    pub fn add(&mut self, outcome: Outcome) {
        match outcome {
            Outcome::TP => self.tp += 1,
            Outcome::TN => self.tn += 1,
            Outcome::FP => self.fp += 1,
            Outcome::FN => self.fn_ += 1,
            Outcome::ERR => self.errored += 1,
        }
    }

    pub fn total(&self) -> u32 {
        self.tp + self.tn + self.fp + self.fn_ + self.errored
    }
}

/// The five metrics; `None` marks an undefined value (zero denominator),
/// never 0-by-convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub specificity: Option<f64>,
    pub f1: Option<f64>,
}

/// Map a judged answer to its confusion-matrix outcome.
///
/// Unparseable verdicts count as incorrect for answerable items and as
/// hallucinated for unanswerable ones. An unanswerable item where the
/// model refused is a TN regardless of the verdict.
pub fn classify(item: &QAItem, answer: &ModelAnswer, verdict: &JudgeVerdict) -> Outcome {
    if item.answerable {
        match verdict.verdict {
            Verdict::Yes => Outcome::TP,
            Verdict::No | Verdict::Unparseable => Outcome::FN,
        }
    } else if answer.is_refusal || verdict.verdict == Verdict::Yes {
        Outcome::TN
    } else {
        Outcome::FP
    }
}

fn ratio(num: u32, den: u32) -> Option<f64> {
    (den > 0).then(|| f64::from(num) / f64::from(den))
}

/// Apply the five metric formulas to the counts.
pub fn compute_metrics(counts: &ConfusionCounts) -> MetricsReport {
    let ConfusionCounts { tp, tn, fp, fn_, .. } = *counts;
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    MetricsReport {
        accuracy: ratio(tp + tn, tp + tn + fp + fn_),
        precision,
        recall,
        specificity: ratio(tn, tn + fp),
        f1,
    }
}

/// Round half-up to 3 decimals, the precision used in published tables.
pub fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Published metric values at 3-decimal precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PublishedMetrics {
    pub accuracy: f64,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackSolveResult {
    Unique(ConfusionCounts),
    /// More than one count assignment reproduces the rounded metrics.
    Ambiguous(u32),
    Infeasible,
}

/// A computed metric matches a published value when the published number
/// is a faithful 3-decimal rounding of it (exact midpoints like 0.3125
/// may print as either neighbor), or when it is undefined and the table
/// wrote 0 by convention.
fn metric_matches(computed: Option<f64>, published: f64) -> bool {
    match computed {
        Some(v) => (v - published).abs() <= 0.0005 + 1e-9,
        None => published == 0.0,
    }
}

/// Search integer counts consistent with published 3-decimal metrics for
/// a run of `positives` answerable and `negatives` unanswerable items.
pub fn back_solve_counts(
    metrics: &PublishedMetrics,
    positives: u32,
    negatives: u32,
) -> BackSolveResult {
    let mut found: Option<ConfusionCounts> = None;
    let mut matches = 0u32;
    for tp in 0..=positives {
        for tn in 0..=negatives {
            let counts = ConfusionCounts::new(tp, tn, negatives - tn, positives - tp);
            let m = compute_metrics(&counts);
            if metric_matches(m.accuracy, metrics.accuracy)
                && metric_matches(m.f1, metrics.f1)
                && metric_matches(m.precision, metrics.precision)
                && metric_matches(m.recall, metrics.recall)
                && metric_matches(m.specificity, metrics.specificity)
            {
                matches += 1;
                found.get_or_insert(counts);
            }
        }
    }
    match matches {
        0 => BackSolveResult::Infeasible,
        1 => BackSolveResult::Unique(found.unwrap()),
        n => BackSolveResult::Ambiguous(n),
    }
}
