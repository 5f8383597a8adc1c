use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ExperimentError, ExperimentReport, MetricsRow, ReportBody};

pub const CSV_HEADER: [&str; 11] = [
    "T",
    "trials",
    "detection_rate",
    "detection_ci",
    "mean_rounds",
    "rounds_ci",
    "mean_leakage",
    "leakage_ci",
    "overhead",
    "overhead_ci",
    "master_seed",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "table" | "text" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?} (expected csv, json or table)")),
        }
    }
}

/// Six significant digits, printed in the shortest form that parses back to
/// the same rounded value.
pub fn format_sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("scientific notation parses");
    rounded.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig6).unwrap_or_default()
}

fn write_csv(report: &ExperimentReport, out: &mut dyn Write) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    match &report.body {
        ReportBody::Trials { rows, .. } => {
            w.write_record(CSV_HEADER)?;
            for r in rows {
                w.write_record([
                    r.transfer_length.to_string(),
                    r.trials.to_string(),
                    format_sig6(r.detection_rate),
                    format_sig6(r.detection_ci),
                    opt(r.mean_rounds),
                    opt(r.rounds_ci),
                    opt(r.mean_leakage),
                    opt(r.leakage_ci),
                    opt(r.overhead),
                    opt(r.overhead_ci),
                    r.master_seed.to_string(),
                ])?;
            }
        }
        ReportBody::Analytic { rows } => {
            w.write_record(["rounds", "detect_half_per_round", "detect_quarter_per_round"])?;
            for r in rows {
                w.write_record([
                    r.rounds.to_string(),
                    format_sig6(r.half_per_round),
                    format_sig6(r.quarter_per_round),
                ])?;
            }
        }
        ReportBody::Capacity { rows } => {
            w.write_record(["T", "key_length", "rounds", "capacity"])?;
            for r in rows {
                w.write_record([
                    r.transfer_length.to_string(),
                    r.key_length.to_string(),
                    r.rounds.to_string(),
                    r.capacity.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn write_table(report: &ExperimentReport, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "# {} (master seed {})", report.experiment, report.config.master_seed)?;
    let pm = |m: Option<f64>, ci: Option<f64>| match (m, ci) {
        (Some(m), Some(ci)) => format!("{m:.3} ± {ci:.3}"),
        (Some(m), None) => format!("{m:.3}"),
        _ => "-".to_string(),
    };
    match &report.body {
        ReportBody::Trials { rows, .. } => {
            writeln!(
                out,
                "{:>3} {:>7} {:>17} {:>17} {:>19} {:>17} {:>10}",
                "T", "trials", "detection", "rounds", "leakage", "overhead", "reference"
            )?;
            for r in rows {
                writeln!(
                    out,
                    "{:>3} {:>7} {:>17} {:>17} {:>19} {:>17} {:>10}",
                    r.transfer_length,
                    r.trials,
                    pm(Some(r.detection_rate), Some(r.detection_ci)),
                    pm(r.mean_rounds, r.rounds_ci),
                    pm(r.mean_leakage, r.leakage_ci),
                    pm(r.overhead, r.overhead_ci),
                    r.reference.map_or("-".to_string(), |v| format!("{v:.3}")),
                )?;
            }
        }
        ReportBody::Analytic { rows } => {
            writeln!(out, "{:>6} {:>12} {:>12}", "rounds", "1-(1/2)^n", "1-(3/4)^n")?;
            for r in rows {
                writeln!(out, "{:>6} {:>12.6} {:>12.6}", r.rounds, r.half_per_round, r.quarter_per_round)?;
            }
        }
        ReportBody::Capacity { rows } => {
            writeln!(out, "{:>3} {:>10} {:>8} {:>10}", "T", "key_bits", "rounds", "qubits")?;
            for r in rows {
                writeln!(out, "{:>3} {:>10} {:>8} {:>10}", r.transfer_length, r.key_length, r.rounds, r.capacity)?;
            }
        }
    }
    Ok(())
}

/// Writes `report` in `format`.
pub fn emit(report: &ExperimentReport, format: OutputFormat, out: &mut dyn Write) -> Result<(), ExperimentError> {
    match format {
        OutputFormat::Csv => write_csv(report, out)?,
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            writeln!(out)?;
        }
        OutputFormat::Table => write_table(report, out)?,
    }
    Ok(())
}

/// Writes to `path`, or stdout when `path` is `None`.
pub fn emit_to_path(report: &ExperimentReport, format: OutputFormat, path: Option<&Path>) -> Result<(), ExperimentError> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            emit(report, format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            emit(report, format, &mut lock)?;
        }
    }
    Ok(())
}

/// Reads back the metrics CSV written by [`emit`].
pub fn parse_metrics_csv(data: &str) -> Result<Vec<MetricsRow>, ExperimentError> {
    let mut rdr = csv::Reader::from_reader(data.as_bytes());
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(ExperimentError::Config(format!("unexpected CSV header {header:?}")));
    }
    let num = |s: &str| -> Result<Option<f64>, ExperimentError> {
        if s.is_empty() {
            return Ok(None);
        }
        s.parse().map(Some).map_err(|_| ExperimentError::Config(format!("bad number {s:?}")))
    };
    let int = |s: &str| -> Result<u64, ExperimentError> { s.parse().map_err(|_| ExperimentError::Config(format!("bad integer {s:?}"))) };
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rows.push(MetricsRow {
            transfer_length: int(&rec[0])? as u32,
            trials: int(&rec[1])? as usize,
            detection_rate: num(&rec[2])?.unwrap_or(f64::NAN),
            detection_ci: num(&rec[3])?.unwrap_or(f64::NAN),
            mean_rounds: num(&rec[4])?,
            rounds_ci: num(&rec[5])?,
            mean_leakage: num(&rec[6])?,
            leakage_ci: num(&rec[7])?,
            overhead: num(&rec[8])?,
            overhead_ci: num(&rec[9])?,
            master_seed: int(&rec[10])?,
            detected: 0,
            completed: 0,
            reference: None,
        });
    }
    Ok(rows)
}
