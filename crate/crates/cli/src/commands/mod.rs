//! Subcommands and the pieces they share.

pub mod flow;
pub mod isometry;
pub mod soliton;
pub mod sweep;
pub mod verify;

use std::path::Path;

use clap::Args;
use soliton_core::diagnostics::{CheckRecord, DiagnosticsReport};
use soliton_core::io::{fmt_f64, write_report};
use soliton_core::{WarpKind, WarpModel};

use crate::config::Config;
use crate::failure::Failure;

/// Speed, dimension and curvature of the base.
#[derive(Args, Debug, Clone, Default)]
pub struct SpecArgs {
    /// Sectional curvature K ≤ 0 of the base [default: -1].
    #[arg(long = "K", allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Dimension n of the base [default: 2].
    #[arg(long)]
    pub n: Option<u32>,
    /// Translation speed c ≥ 0 [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
}

/// Resolved [`SpecArgs`].
#[derive(Debug, Clone, Copy)]
pub struct BaseParams {
    pub k: f64,
    pub n: u32,
    pub c: f64,
}

impl SpecArgs {
    pub fn resolve(&self, cfg: &Config) -> Result<BaseParams, Failure> {
        Ok(BaseParams {
            k: cfg.get(self.k, "K", -1.0)?,
            n: cfg.get(self.n, "n", 2)?,
            c: cfg.get(self.c, "c", 1.0)?,
        })
    }
}

pub fn warp(kind: WarpKind, k: f64) -> Result<WarpModel, Failure> {
    Ok(WarpModel::builtin(kind, k)?)
}

/// Prefixes every check name of `report` and appends it to `into`.
pub fn merge(into: &mut DiagnosticsReport, prefix: &str, report: DiagnosticsReport) {
    for mut rec in report.entries {
        rec.check = format!("{prefix}.{}", rec.check);
        into.push(rec);
    }
}

/// Writes the report, prints one line per check and fails on any failed
/// applicable check.
pub fn finish(report: &DiagnosticsReport, path: &Path) -> Result<(), Failure> {
    write_report(report, path)?;
    for rec in &report.entries {
        println!("{}", describe(rec));
    }
    println!("report: {}", path.display());
    let failed: Vec<&str> = report.failures().map(|r| r.check.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

fn describe(rec: &CheckRecord) -> String {
    let status = if !rec.applicable {
        "n/a "
    } else if rec.pass {
        "pass"
    } else {
        "FAIL"
    };
    format!(
        "{status} {:<32} max {:.3e} rms {:.3e} n {} tol {:.1e}",
        rec.check, rec.max_abs, rec.rms, rec.n, rec.tol
    )
}

/// Writes a CSV table with 17-digit floats.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), Failure> {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

/// Writes pretty JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Runtime(format!("cannot serialise: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}
