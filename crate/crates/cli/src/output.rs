//! Machine-readable output records.
//!
//! Every command emits one `OutputRecord`, serialized with stable key order
//! and numbers rounded to 15 significant digits, so identical reruns are
//! byte-identical. The JSON schema is versioned; CSV carries the same
//! numeric values.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use mured_core::ingest::MeasureSeries;
use mured_core::MeasureReport;

pub const SCHEMA_VERSION: &str = "1";

/// Rounds to 15 significant digits; the JSON and CSV renderings of the
/// result round-trip exactly.
pub fn sig15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

#[derive(Serialize)]
pub struct OutputRecord {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub inputs: BTreeMap<String, String>,
    pub results: Vec<ResultItem>,
    pub warnings: Vec<String>,
}

impl OutputRecord {
    pub fn new(command: &'static str, inputs: BTreeMap<String, String>) -> Self {
        OutputRecord {
            schema_version: SCHEMA_VERSION,
            command,
            inputs,
            results: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut rendered = serde_json::to_string_pretty(self).expect("serializable record");
        rendered.push('\n');
        rendered
    }
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum ResultItem {
    Report(ReportItem),
    Point(PointItem),
    Describe(DescribeItem),
    OracleCheck(OracleItem),
    Synth(SynthItem),
}

#[derive(Serialize)]
pub struct ReportItem {
    pub measure: String,
    pub variables: Vec<String>,
    pub value: f64,
    pub log_base: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observation_count: Option<f64>,
    /// Present on mutual redundancy: how the value relates to T.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_rule: Option<&'static str>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

impl ReportItem {
    pub fn from_report(report: &MeasureReport) -> Self {
        let sign_rule = if report.measure_name == "r" {
            Some("(−1)^(n+1)·T")
        } else {
            None
        };
        ReportItem {
            measure: report.measure_name.clone(),
            variables: report
                .variables
                .iter()
                .map(|v| v.name().to_string())
                .collect(),
            value: sig15(report.value),
            log_base: sig15(report.log_base),
            observation_count: report.observation_count.map(sig15),
            sign_rule,
            extra: report
                .extra
                .iter()
                .map(|(k, v)| (k.clone(), sig15(*v)))
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct PointItem {
    pub window: String,
    pub measure: String,
    pub variables: Vec<String>,
    pub value: f64,
    pub log_base: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observation_count: Option<f64>,
}

#[derive(Serialize)]
pub struct DescribeItem {
    pub columns: Vec<ColumnSummary>,
    pub row_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeSummary>,
}

#[derive(Serialize)]
pub struct ColumnSummary {
    pub name: String,
    pub cardinality: usize,
}

#[derive(Serialize)]
pub struct TimeSummary {
    pub column: String,
    pub min: String,
    pub max: String,
}

#[derive(Serialize)]
pub struct OracleItem {
    pub measure: String,
    pub variables: Vec<String>,
    pub main: f64,
    pub oracle: f64,
    pub diff: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct SynthItem {
    pub kind: String,
    pub variables: Vec<String>,
    pub cells: usize,
    pub out: String,
}

/// CSV rendering: one row per report or point, same numeric values as JSON.
/// Variable lists are joined with `;` inside one field.
pub fn write_csv<W: Write>(record: &OutputRecord, writer: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let render = |x: f64| format!("{}", sig15(x));
    let opt = |x: Option<f64>| x.map(render).unwrap_or_default();

    let has_points = record
        .results
        .iter()
        .any(|r| matches!(r, ResultItem::Point(_)));
    if has_points {
        w.write_record([
            "window",
            "measure",
            "variables",
            "value",
            "log_base",
            "observation_count",
        ])?;
    } else {
        w.write_record(["measure", "variables", "value", "log_base", "observation_count"])?;
    }

    for item in &record.results {
        match item {
            ResultItem::Report(r) => {
                w.write_record([
                    r.measure.clone(),
                    r.variables.join(";"),
                    render(r.value),
                    render(r.log_base),
                    opt(r.observation_count),
                ])?;
            }
            ResultItem::Point(p) => {
                w.write_record([
                    p.window.clone(),
                    p.measure.clone(),
                    p.variables.join(";"),
                    render(p.value),
                    render(p.log_base),
                    opt(p.observation_count),
                ])?;
            }
            // Non-tabular results stay JSON-only.
            _ => {}
        }
    }
    w.flush()
}

pub fn series_points(series: &MeasureSeries) -> Vec<ResultItem> {
    series
        .points
        .iter()
        .map(|point| {
            ResultItem::Point(PointItem {
                window: point.label.clone(),
                measure: point.report.measure_name.clone(),
                variables: point
                    .report
                    .variables
                    .iter()
                    .map(|v| v.name().to_string())
                    .collect(),
                value: sig15(point.report.value),
                log_base: sig15(point.report.log_base),
                observation_count: point.report.observation_count.map(sig15),
            })
        })
        .collect()
}
