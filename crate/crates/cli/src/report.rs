//! CSV sweep files.
//!
//! Layout: a `#`-prefixed comment block carrying the resolved config (TOML) and
//! the content hash, a header row, then one row per angle. Numbers use Rust's
//! shortest round-trip scientific notation, so parsing a row gives back the
//! exact `f64` that was written.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};
use swarmbeam_core::SweepResult;

use crate::config::FileConfig;

pub const COLUMNS: [&str; 8] = [
    "theta_deg",
    "gain_real_mean",
    "gain_real_db",
    "prr_mean",
    "prr_db",
    "prr_std",
    "pvr_sq_mean",
    "pvr_sq_db",
];

/// `10·log10` of a power ratio.
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn render_csv(result: &SweepResult, resolved: &FileConfig) -> String {
    let mut out = String::new();
    out.push_str("# swarmbeam sweep\n");
    for line in resolved.to_toml().lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            let _ = writeln!(out, "# {line}");
        }
    }
    let _ = writeln!(out, "# seed = {}", result.config.master_seed);
    let _ = writeln!(out, "# content_hash = {}", result.content_hash);
    out.push_str(&COLUMNS.join(","));
    out.push('\n');
    for p in &result.points {
        let row = [
            p.theta.to_degrees(),
            p.real_pulse_gain.mean,
            to_db(p.real_pulse_gain.mean),
            p.prr.mean,
            to_db(p.prr.mean),
            p.prr.std,
            p.pvr_abs_sq.mean,
            to_db(p.pvr_abs_sq.mean),
        ];
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(result: &SweepResult, resolved: &FileConfig, path: &Path) -> anyhow::Result<()> {
    std::fs::write(path, render_csv(result, resolved))
        .with_context(|| format!("cannot write {}", path.display()))
}

/// One parsed data row, in [`COLUMNS`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub theta_deg: f64,
    pub gain_real_mean: f64,
    pub gain_real_db: f64,
    pub prr_mean: f64,
    pub prr_db: f64,
    pub prr_std: f64,
    pub pvr_sq_mean: f64,
    pub pvr_sq_db: f64,
}

pub fn parse_csv(text: &str) -> anyhow::Result<Vec<CsvRow>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    let Some((_, header)) = lines.next() else {
        bail!("missing header row");
    };
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    if names != COLUMNS {
        bail!("unexpected header `{header}`; expected `{}`", COLUMNS.join(","));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        let values = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("line {}: non-numeric cell", lineno + 1))?;
        let [theta_deg, gain_real_mean, gain_real_db, prr_mean, prr_db, prr_std, pvr_sq_mean, pvr_sq_db] =
            values[..]
        else {
            bail!("line {}: expected {} columns, found {}", lineno + 1, COLUMNS.len(), values.len());
        };
        rows.push(CsvRow {
            theta_deg,
            gain_real_mean,
            gain_real_db,
            prr_mean,
            prr_db,
            prr_std,
            pvr_sq_mean,
            pvr_sq_db,
        });
    }
    if rows.is_empty() {
        bail!("no data rows");
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> anyhow::Result<Vec<CsvRow>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    parse_csv(&text).with_context(|| format!("malformed CSV {}", path.display()))
}
