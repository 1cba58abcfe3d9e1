//! Score report serialization and plain-text tables.
//!
//! Metric values are kept unrounded in JSON; tables display percentages
//! with one decimal.

use std::collections::BTreeMap;

use serde::Serialize;
use transfusion_core::eval::{AggregateReport, LabelMetrics, ScoreReport};

#[derive(Debug, Clone, Serialize)]
pub struct LabelMetricsDto {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub gold_count: usize,
    pub pred_count: usize,
    pub correct_count: usize,
}

impl From<&LabelMetrics> for LabelMetricsDto {
    fn from(metrics: &LabelMetrics) -> Self {
        LabelMetricsDto {
            precision: metrics.precision,
            recall: metrics.recall,
            f1: metrics.f1,
            gold_count: metrics.gold_count,
            pred_count: metrics.pred_count,
            correct_count: metrics.correct_count,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScoreReportDto {
    pub per_label: BTreeMap<String, LabelMetricsDto>,
    pub micro: LabelMetricsDto,
    pub sentence_count: usize,
}

impl From<&ScoreReport> for ScoreReportDto {
    fn from(report: &ScoreReport) -> Self {
        ScoreReportDto {
            per_label: report
                .per_label
                .iter()
                .map(|(label, metrics)| (label.clone(), metrics.into()))
                .collect(),
            micro: (&report.micro).into(),
            sentence_count: report.sentence_count,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateReportDto {
    pub per_language: BTreeMap<String, ScoreReportDto>,
    pub macro_f1: f64,
}

pub fn report_to_json(report: &ScoreReport) -> String {
    serde_json::to_string_pretty(&ScoreReportDto::from(report)).expect("report serializes")
}

pub fn aggregate_to_json(reports: &BTreeMap<String, ScoreReport>, macro_f1: f64) -> String {
    let dto = AggregateReportDto {
        per_language: reports
            .iter()
            .map(|(language, report)| (language.clone(), report.into()))
            .collect(),
        macro_f1,
    };
    serde_json::to_string_pretty(&dto).expect("report serializes")
}

fn pct(value: f64) -> String {
    format!("{:.1}", value * 100.0)
}

/// Per-label table with a micro summary row, percentages at one decimal.
pub fn render_table(report: &ScoreReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12} {:>9} {:>9} {:>9} {:>6} {:>6} {:>8}\n",
        "label", "precision", "recall", "f1", "gold", "pred", "correct"
    ));
    for (label, metrics) in &report.per_label {
        out.push_str(&format!(
            "{:<12} {:>9} {:>9} {:>9} {:>6} {:>6} {:>8}\n",
            label,
            pct(metrics.precision),
            pct(metrics.recall),
            pct(metrics.f1),
            metrics.gold_count,
            metrics.pred_count,
            metrics.correct_count,
        ));
    }
    out.push_str(&format!(
        "{:<12} {:>9} {:>9} {:>9} {:>6} {:>6} {:>8}\n",
        "micro",
        pct(report.micro.precision),
        pct(report.micro.recall),
        pct(report.micro.f1),
        report.micro.gold_count,
        report.micro.pred_count,
        report.micro.correct_count,
    ));
    out
}

/// Per-language table with the unweighted macro-average row.
pub fn render_aggregate_table(
    reports: &BTreeMap<String, ScoreReport>,
    aggregate: &AggregateReport,
) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12} {:>9} {:>9} {:>9}\n",
        "language", "precision", "recall", "f1"
    ));
    for (language, report) in reports {
        out.push_str(&format!(
            "{:<12} {:>9} {:>9} {:>9}\n",
            language,
            pct(report.micro.precision),
            pct(report.micro.recall),
            pct(report.micro.f1),
        ));
    }
    out.push_str(&format!(
        "{:<12} {:>9} {:>9} {:>9}\n",
        "average",
        "",
        "",
        pct(aggregate.macro_f1)
    ));
    out
}
