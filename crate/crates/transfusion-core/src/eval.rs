//! Entity-level precision/recall/F1 with exact span-and-type matching.
//!
//! A predicted span counts as correct iff the gold annotation of the
//! same sentence contains a span with identical label, start and end.
//! Any metric whose denominator is zero reports 0 (the conlleval
//! convention).

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::sentence::Document;

/// Counts and derived metrics for one entity type (or the micro total).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabelMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub gold_count: usize,
    pub pred_count: usize,
    pub correct_count: usize,
}

impl LabelMetrics {
    fn from_counts(gold_count: usize, pred_count: usize, correct_count: usize) -> Self {
        let precision = ratio(correct_count, pred_count);
        let recall = ratio(correct_count, gold_count);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        LabelMetrics { precision, recall, f1, gold_count, pred_count, correct_count }
    }
}

fn ratio(numerator: usize, denominator: usize) -> f64 {
    if denominator == 0 {
        0.0
    } else {
        numerator as f64 / denominator as f64
    }
}

/// Scoring result over one gold/prediction document pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub per_label: BTreeMap<String, LabelMetrics>,
    pub micro: LabelMetrics,
    pub sentence_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    SentenceCountMismatch { gold: usize, pred: usize },
    TokenCountMismatch { sentence: usize, gold: usize, pred: usize },
    NoReports,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::SentenceCountMismatch { gold, pred } => {
                write!(f, "sentence count mismatch: {gold} gold vs {pred} predicted")
            }
            EvalError::TokenCountMismatch { sentence, gold, pred } => write!(
                f,
                "token count mismatch at sentence {sentence}: {gold} gold vs {pred} predicted"
            ),
            EvalError::NoReports => f.write_str("no reports to aggregate"),
        }
    }
}

impl core::error::Error for EvalError {}

/// Scores predictions against gold annotations.
pub fn score(gold: &Document, pred: &Document) -> Result<ScoreReport, EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::SentenceCountMismatch { gold: gold.len(), pred: pred.len() });
    }

    #[derive(Default)]
    struct Counts {
        gold: usize,
        pred: usize,
        correct: usize,
    }
    let mut per_label: BTreeMap<String, Counts> = BTreeMap::new();

    for (index, (g, p)) in gold.sentences().iter().zip(pred.sentences()).enumerate() {
        if g.len() != p.len() {
            return Err(EvalError::TokenCountMismatch {
                sentence: index,
                gold: g.len(),
                pred: p.len(),
            });
        }
        for span in g.spans() {
            per_label.entry(span.label.clone()).or_default().gold += 1;
        }
        for span in p.spans() {
            let counts = per_label.entry(span.label.clone()).or_default();
            counts.pred += 1;
            if g.spans().contains(span) {
                counts.correct += 1;
            }
        }
    }

    let (mut gold_total, mut pred_total, mut correct_total) = (0, 0, 0);
    let per_label: BTreeMap<String, LabelMetrics> = per_label
        .into_iter()
        .map(|(label, counts)| {
            gold_total += counts.gold;
            pred_total += counts.pred;
            correct_total += counts.correct;
            (label, LabelMetrics::from_counts(counts.gold, counts.pred, counts.correct))
        })
        .collect();

    Ok(ScoreReport {
        per_label,
        micro: LabelMetrics::from_counts(gold_total, pred_total, correct_total),
        sentence_count: gold.len(),
    })
}

/// Per-language micro F1 plus their unweighted mean.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateReport {
    pub per_language: Vec<(String, f64)>,
    pub macro_f1: f64,
}

/// Averages per-language reports; the macro average is the unweighted
/// mean of per-language micro F1, left unrounded (rounding happens at
/// display time).
pub fn aggregate(reports: &BTreeMap<String, ScoreReport>) -> Result<AggregateReport, EvalError> {
    if reports.is_empty() {
        return Err(EvalError::NoReports);
    }
    let per_language: Vec<(String, f64)> = reports
        .iter()
        .map(|(language, report)| (language.to_string(), report.micro.f1))
        .collect();
    let macro_f1 = per_language.iter().map(|(_, f1)| f1).sum::<f64>() / per_language.len() as f64;
    Ok(AggregateReport { per_language, macro_f1 })
}
