use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::ExperimentResult;
use crate::error::{Error, Result};
use crate::evaluation::{EvalMode, Prf};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
    Json,
}

impl ReportFormat {
    /// Guessed from the extension; anything unknown is JSON.
    pub fn from_path(path: &Path) -> ReportFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => ReportFormat::Csv,
            Some("md") | Some("markdown") => ReportFormat::Markdown,
            _ => ReportFormat::Json,
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ReportFormat> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Config(format!("unknown report format `{other}`"))),
        }
    }
}

fn pct(x: f64) -> String {
    format!("{:.1}", 100.0 * x)
}

fn metric_columns() -> Vec<String> {
    EvalMode::ALL
        .iter()
        .flat_map(|m| ["p", "r", "f1"].map(|s| format!("{}_{s}", m.slug())))
        .collect()
}

fn metric_titles() -> Vec<String> {
    EvalMode::ALL
        .iter()
        .flat_map(|m| ["P", "R", "F1"].map(|s| format!("{} {s}", m.title())))
        .collect()
}

fn cells(modes: &[Prf]) -> Vec<String> {
    modes.iter().flat_map(|p| [pct(p.precision), pct(p.recall), pct(p.f1)]).collect()
}

struct Table {
    header_csv: Vec<String>,
    header_md: Vec<String>,
    rows: Vec<Vec<String>>,
    /// Index of the row rendered in bold in markdown.
    emphasis: Option<usize>,
}

/// One row per category plus the macro Average row.
fn category_table(result: &ExperimentResult) -> Table {
    let mut rows: Vec<Vec<String>> = result
        .per_category
        .iter()
        .map(|c| std::iter::once(c.category.clone()).chain(cells(&c.modes)).collect())
        .collect();
    rows.push(std::iter::once("Average".to_string()).chain(cells(&result.aggregate)).collect());
    Table {
        header_csv: std::iter::once("category".to_string()).chain(metric_columns()).collect(),
        header_md: std::iter::once("Category".to_string()).chain(metric_titles()).collect(),
        emphasis: Some(rows.len() - 1),
        rows,
    }
}

/// One row per result with its procedure, size label and aggregate scores.
fn procedure_table(results: &[ExperimentResult]) -> Table {
    let sizes = size_labels(&results.iter().map(|r| r.mean_training_feature_tokens).collect::<Vec<_>>());
    let rows = results
        .iter()
        .zip(sizes)
        .map(|(r, size)| {
            [r.procedure.to_string(), size.to_string(), format!("{:.0}", r.mean_training_feature_tokens)]
                .into_iter()
                .chain(cells(&r.aggregate))
                .collect()
        })
        .collect();
    let lead = ["procedure", "size", "train_tokens"].map(String::from);
    let lead_md = ["Procedure", "Size", "Train tokens"].map(String::from);
    Table {
        header_csv: lead.into_iter().chain(metric_columns()).collect(),
        header_md: lead_md.into_iter().chain(metric_titles()).collect(),
        rows,
        emphasis: None,
    }
}

fn render_csv(t: &Table) -> String {
    let mut out = t.header_csv.join(",");
    out.push('\n');
    for row in &t.rows {
        let escaped: Vec<String> = row
            .iter()
            .map(|c| {
                if c.contains([',', '"', '\n']) {
                    format!("\"{}\"", c.replace('"', "\"\""))
                } else {
                    c.clone()
                }
            })
            .collect();
        out.push_str(&escaped.join(","));
        out.push('\n');
    }
    out
}

fn render_markdown(t: &Table) -> String {
    let mut out = format!("| {} |\n|", t.header_md.join(" | "));
    for i in 0..t.header_md.len() {
        out.push_str(if i == 0 { "---|" } else { "---:|" });
    }
    out.push('\n');
    for (i, row) in t.rows.iter().enumerate() {
        let row: Vec<String> = if t.emphasis == Some(i) {
            row.iter().map(|c| format!("**{c}**")).collect()
        } else {
            row.iter().map(|c| c.replace('|', "\\|")).collect()
        };
        let _ = writeln!(out, "| {} |", row.join(" | "));
    }
    out
}

#[derive(Serialize)]
struct JsonReport<'a> {
    schema_version: u32,
    results: &'a [ExperimentResult],
}

/// Renders results as a 12-column table (P/R/F1 for exact tokens, partial
/// tokens, exact types and partial types, in percent).
///
/// A single result gives one row per category followed by the macro
/// `Average` row. Several results give one row per result with the
/// procedure, a size label and the aggregate scores. JSON carries the full
/// results under a schema version.
pub fn emit_report(results: &[ExperimentResult], format: ReportFormat) -> Result<String> {
    if results.is_empty() {
        return Err(Error::Config("no experiment results to report".into()));
    }
    if format == ReportFormat::Json {
        let report = JsonReport {
            schema_version: REPORT_SCHEMA_VERSION,
            results,
        };
        return Ok(serde_json::to_string_pretty(&report)? + "\n");
    }
    let table = match results {
        [one] => category_table(one),
        many => procedure_table(many),
    };
    Ok(match format {
        ReportFormat::Csv => render_csv(&table),
        _ => render_markdown(&table),
    })
}

pub fn write_report(results: &[ExperimentResult], format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, emit_report(results, format)?).map_err(|e| Error::io(path, e))
}

/// S/M/L labels from training sizes: thirds of the log range between the
/// smallest and largest size. Equal sizes are all `M`.
pub fn size_labels(sizes: &[f64]) -> Vec<char> {
    let logs: Vec<f64> = sizes.iter().map(|s| s.max(1.0).ln()).collect();
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    logs.iter()
        .map(|&x| {
            if hi - lo < 1e-12 {
                return 'M';
            }
            let t = (x - lo) / (hi - lo);
            if t < 1.0 / 3.0 {
                'S'
            } else if t < 2.0 / 3.0 {
                'M'
            } else {
                'L'
            }
        })
        .collect()
}

/// Min/avg/max of the aggregate F1 across datasets for every procedure and
/// mode, as tidy CSV `procedure,mode,min,avg,max,datasets`. Procedures keep
/// their order of first appearance.
pub fn procedure_series_csv(results: &[(String, ExperimentResult)]) -> String {
    let mut procedures = Vec::new();
    for (_, r) in results {
        if !procedures.contains(&r.procedure) {
            procedures.push(r.procedure);
        }
    }
    let mut out = String::from("procedure,mode,min,avg,max,datasets\n");
    for p in procedures {
        let group: Vec<&ExperimentResult> = results.iter().map(|(_, r)| r).filter(|r| r.procedure == p).collect();
        for mode in EvalMode::ALL {
            let f1: Vec<f64> = group.iter().map(|r| r.aggregate_for(mode).f1).collect();
            let min = f1.iter().copied().fold(f64::INFINITY, f64::min);
            let max = f1.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let avg = f1.iter().sum::<f64>() / f1.len() as f64;
            let _ = writeln!(out, "{p},{mode},{min:.4},{avg:.4},{max:.4},{}", f1.len());
        }
    }
    out
}
