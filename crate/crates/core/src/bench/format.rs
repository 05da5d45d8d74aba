//! Report output formats: human table, CSV, and JSON lines.
//!
//! CSV and JSON round-trip exactly: parsing a row or line back yields the
//! in-memory report values, including the float (Rust prints the shortest
//! representation that reparses to the same bits).

use std::fmt::Write as _;

use thiserror::Error;

use super::{benchmark_label, BenchReport, WorkloadSpec};
use crate::memory::{MemoryKind, MemoryParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("bad CSV row: {0}")]
    Csv(String),
    #[error("bad JSON report: {0}")]
    Json(String),
}

/// Table mirroring the four benchmark columns.
pub fn render_table(reports: &[BenchReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:<10} {:>12} {:>14}",
        "Memory", "Benchmark", "Time (secs)", "Size (bytes)"
    );
    for report in reports {
        let _ = writeln!(
            out,
            "{:<12} {:<10} {:>12.3} {:>14}",
            report.spec.model.as_str(),
            benchmark_label(&report.spec),
            report.elapsed_seconds,
            report.footprint_bytes,
        );
    }
    out
}

const CSV_COLUMNS: [&str; 13] = [
    "model",
    "n_writes",
    "base_addr",
    "range_len",
    "value",
    "seed",
    "addr_bits",
    "page_bits",
    "flat_len",
    "elapsed_seconds",
    "footprint_bytes",
    "distinct_addresses",
    "verified",
];

pub fn csv_header() -> String {
    CSV_COLUMNS.join(",")
}

pub fn report_to_csv_row(report: &BenchReport) -> String {
    let s = &report.spec;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        s.model.as_str(),
        s.n_writes,
        s.base_addr,
        s.range_len,
        s.value,
        s.seed,
        s.params.addr_bits,
        s.params.page_bits,
        s.params.flat_len,
        report.elapsed_seconds,
        report.footprint_bytes,
        report.distinct_addresses,
        report.verified,
    )
}

pub fn report_from_csv_row(row: &str) -> Result<BenchReport, FormatError> {
    let fields: Vec<&str> = row.trim_end().split(',').collect();
    if fields.len() != CSV_COLUMNS.len() {
        return Err(FormatError::Csv(format!(
            "expected {} fields, got {}",
            CSV_COLUMNS.len(),
            fields.len()
        )));
    }
    fn parse<T: std::str::FromStr>(name: &str, raw: &str) -> Result<T, FormatError> {
        raw.parse().map_err(|_| FormatError::Csv(format!("bad `{name}` value `{raw}`")))
    }
    let model: MemoryKind = fields[0].parse().map_err(FormatError::Csv)?;
    Ok(BenchReport {
        spec: WorkloadSpec {
            model,
            n_writes: parse("n_writes", fields[1])?,
            base_addr: parse("base_addr", fields[2])?,
            range_len: parse("range_len", fields[3])?,
            value: parse("value", fields[4])?,
            seed: parse("seed", fields[5])?,
            params: MemoryParams {
                addr_bits: parse("addr_bits", fields[6])?,
                page_bits: parse("page_bits", fields[7])?,
                flat_len: parse("flat_len", fields[8])?,
            },
        },
        elapsed_seconds: parse("elapsed_seconds", fields[9])?,
        footprint_bytes: parse("footprint_bytes", fields[10])?,
        distinct_addresses: parse("distinct_addresses", fields[11])?,
        verified: parse("verified", fields[12])?,
    })
}

/// One JSON object per report, fields named as in [`BenchReport`].
pub fn report_to_json(report: &BenchReport) -> String {
    serde_json::to_string(report).expect("reports serialize")
}

pub fn report_from_json(line: &str) -> Result<BenchReport, FormatError> {
    serde_json::from_str(line).map_err(|e| FormatError::Json(e.to_string()))
}
