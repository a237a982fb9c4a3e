use std::fmt::Write as _;

use clap::ValueEnum;
use ltg_core::{AutocorrelationCurve, GapelmaperReport};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

const REPORT_COLUMNS: [&str; 12] = [
    "mape_power",
    "mape_exp",
    "gapelmaper",
    "n_tokens",
    "n_vectors",
    "tau_min",
    "tau_max",
    "grid_mode",
    "dropped_oov_fraction",
    "dropped_nonpositive_fraction",
    "embedding_name",
    "degenerate",
];

fn report_fields(r: &GapelmaperReport) -> [String; 12] {
    [
        float(r.mape_power),
        float(r.mape_exp),
        float(r.gapelmaper),
        r.n_tokens.to_string(),
        r.n_vectors.to_string(),
        r.tau_min.to_string(),
        r.tau_max.to_string(),
        r.grid_mode.to_string(),
        float(r.dropped_oov_fraction),
        float(r.dropped_nonpositive_fraction),
        r.embedding_name.clone(),
        r.degenerate.to_string(),
    ]
}

/// Shortest representation that parses back to the same value.
fn float(v: f64) -> String {
    format!("{v:?}")
}

pub fn render_report(report: &GapelmaperReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => csv_string(&REPORT_COLUMNS, [report_fields(report)]),
        OutputFormat::Table => {
            let mut s = String::new();
            for (key, value) in REPORT_COLUMNS.iter().zip(report_fields(report)) {
                let value = match *key {
                    "gapelmaper" => format!("{:.2}  ({value})", report.gapelmaper),
                    _ => value,
                };
                let _ = writeln!(s, "{key:<30} {value}");
            }
            let verdict = if report.degenerate {
                "degenerate (constant curve)"
            } else if report.is_structured() {
                "power-law decay (structured)"
            } else {
                "exponential decay (unstructured)"
            };
            let _ = writeln!(s, "{:<30} {verdict}", "verdict");
            s
        }
    }
}

/// One line of a corpus table: either metric values or the error that
/// stopped the file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusRow {
    pub name: String,
    pub mape_power: Option<f64>,
    pub mape_exp: Option<f64>,
    pub gapelmaper: Option<f64>,
    pub error: Option<String>,
}

impl CorpusRow {
    pub fn ok(name: String, report: &GapelmaperReport) -> Self {
        CorpusRow {
            name,
            mape_power: Some(report.mape_power),
            mape_exp: Some(report.mape_exp),
            gapelmaper: Some(report.gapelmaper),
            error: None,
        }
    }

    pub fn failed(name: String, error: String) -> Self {
        CorpusRow {
            name,
            mape_power: None,
            mape_exp: None,
            gapelmaper: None,
            error: Some(error),
        }
    }
}

pub fn render_corpus(rows: &[CorpusRow], format: OutputFormat) -> String {
    let opt = |v: Option<f64>, decimals: Option<usize>| match (v, decimals) {
        (Some(v), Some(d)) => format!("{v:.d$}"),
        (Some(v), None) => float(v),
        (None, _) => String::new(),
    };
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
            s.push('\n');
            s
        }
        OutputFormat::Csv => csv_string(
            &["name", "mape_power", "mape_exp", "gapelmaper", "error"],
            rows.iter().map(|r| {
                [
                    r.name.clone(),
                    opt(r.mape_power, None),
                    opt(r.mape_exp, None),
                    opt(r.gapelmaper, None),
                    r.error.clone().unwrap_or_default(),
                ]
            }),
        ),
        OutputFormat::Table => {
            let width = rows.iter().map(|r| r.name.chars().count()).max().unwrap_or(0).max(4);
            let mut s = format!(
                "{:<width$}  {:>10}  {:>10}  {:>10}  error\n",
                "name", "mape_power", "mape_exp", "gapelmaper"
            );
            for r in rows {
                let line = format!(
                    "{:<width$}  {:>10}  {:>10}  {:>10}  {}",
                    r.name,
                    opt(r.mape_power, Some(3)),
                    opt(r.mape_exp, Some(3)),
                    opt(r.gapelmaper, Some(2)),
                    r.error.as_deref().unwrap_or(""),
                );
                s.push_str(line.trim_end());
                s.push('\n');
            }
            s
        }
    }
}

pub fn render_curve(curve: &AutocorrelationCurve) -> String {
    let mut s = String::with_capacity(curve.len() * 24 + 6);
    s.push_str("tau,c\n");
    for (tau, c) in curve.iter() {
        let _ = writeln!(s, "{tau},{}", float(c));
    }
    s
}

fn csv_string<const N: usize>(header: &[&str; N], rows: impl IntoIterator<Item = [String; N]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}
