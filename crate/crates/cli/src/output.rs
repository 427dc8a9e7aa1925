//! Report serialization: a fixed-column CSV for spreadsheets and a JSON
//! document embedding the resolved config. Identical config + seed produce
//! byte-identical files (floats print through Rust's shortest-roundtrip
//! formatter; row order is ascending p; nothing time- or host-dependent is
//! written).

use crate::config::{Config, OutputFormat};
use serde::Serialize;
use std::fmt::Display;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use taulab_core::verify::{ExperimentReport, NestedReport};

pub const CSV_HEADER: &str =
    "p,root,surjective,girth,bound,girth_ok,lambda2,gap,c_sampled,excluded_reason";

fn cell<T: Display>(v: &Option<T>) -> String {
    match v {
        Some(x) => x.to_string(),
        None => String::new(),
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_csv<W: Write>(report: &ExperimentReport, mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.p,
            cell(&r.root),
            cell(&r.surjective),
            cell(&r.girth),
            cell(&r.bound),
            cell(&r.girth_ok),
            cell(&r.lambda2),
            cell(&r.gap),
            cell(&r.c_sampled),
            csv_escape(r.excluded_reason.as_deref().unwrap_or("")),
        )?;
    }
    Ok(())
}

/// The JSON document for a scan: the resolved config plus the full report.
#[derive(Serialize)]
pub struct ScanDocument<'a> {
    pub config: &'a Config,
    pub report: &'a ExperimentReport,
}

#[derive(Serialize)]
pub struct NestedDocument<'a> {
    pub config: &'a Config,
    pub report: &'a NestedReport,
}

pub fn write_json<W: Write, T: Serialize>(doc: &T, mut w: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, doc)?;
    writeln!(w)
}

/// Write the scan report files under `dir` and return their paths.
pub fn emit_report(
    report: &ExperimentReport,
    config: &Config,
    dir: &Path,
    format: OutputFormat,
) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        let path = dir.join("scan_report.csv");
        write_csv(report, std::fs::File::create(&path)?)?;
        written.push(path);
    }
    if matches!(format, OutputFormat::Json | OutputFormat::Both) {
        let path = dir.join("scan_report.json");
        write_json(&ScanDocument { config, report }, std::fs::File::create(&path)?)?;
        written.push(path);
    }
    Ok(written)
}
