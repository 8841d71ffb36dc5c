//! Error-map serialization: a fixed-schema CSV and a JSON mirror with the
//! full configuration echo. Files are written to a temporary sibling and
//! renamed into place so a failed run never leaves a partial output.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use qradar_core::montecarlo::{CampaignConfig, ErrorMap};
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str = "r_center_m,theta_center_rad,mean_error_m,trial_count,degenerate_count";

/// Floats are serialized with 17 significant digits so parsing reproduces
/// the in-memory value exactly.
pub fn format_sig17(value: f64) -> String {
    if value.is_nan() {
        "NaN".to_string()
    } else {
        format!("{value:.16e}")
    }
}

/// One CSV row / JSON cell entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub r_center_m: f64,
    pub theta_center_rad: f64,
    pub mean_error_m: Option<f64>,
    pub trial_count: u64,
    pub degenerate_count: u64,
}

/// Flattens a map into records, one per cell, range-major then
/// angle-ascending.
pub fn error_map_records(map: &ErrorMap) -> Vec<CellRecord> {
    (0..map.grid.cell_count())
        .map(|linear| {
            let cell = map.grid.cell_at(linear);
            let (r, theta) = map.grid.cell_center(cell);
            let stats = &map.cells[linear];
            CellRecord {
                r_center_m: r,
                theta_center_rad: theta,
                mean_error_m: stats.mean_error_m,
                trial_count: stats.trial_count,
                degenerate_count: stats.degenerate_count,
            }
        })
        .collect()
}

pub fn error_map_to_csv(map: &ErrorMap) -> String {
    let mut out = String::with_capacity(64 * map.grid.cell_count());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for rec in error_map_records(map) {
        let mean = match rec.mean_error_m {
            Some(v) => format_sig17(v),
            None => "NaN".to_string(),
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            format_sig17(rec.r_center_m),
            format_sig17(rec.theta_center_rad),
            mean,
            rec.trial_count,
            rec.degenerate_count
        ));
    }
    out
}

pub fn parse_error_map_csv(text: &str) -> Result<Vec<CellRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == CSV_HEADER => {}
        other => bail!("unexpected CSV header: {other:?}"),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                bail!("row {}: expected 5 fields, got {}", i + 1, fields.len());
            }
            let float = |s: &str| s.parse::<f64>().with_context(|| format!("row {}: {s:?}", i + 1));
            let mean = float(fields[2])?;
            Ok(CellRecord {
                r_center_m: float(fields[0])?,
                theta_center_rad: float(fields[1])?,
                mean_error_m: (!mean.is_nan()).then_some(mean),
                trial_count: fields[3].parse().with_context(|| format!("row {}", i + 1))?,
                degenerate_count: fields[4].parse().with_context(|| format!("row {}", i + 1))?,
            })
        })
        .collect()
}

/// JSON file layout: the seed and full configuration echo for provenance,
/// plus the same per-cell records the CSV carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorMapFile {
    pub seed: u64,
    pub config: CampaignConfig,
    pub cells: Vec<CellRecord>,
}

pub fn error_map_to_json(map: &ErrorMap) -> Result<String> {
    let file = ErrorMapFile {
        seed: map.config.seed,
        config: map.config.clone(),
        cells: error_map_records(map),
    };
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    Ok(text)
}

/// Write-then-rename so partially written files never land on the target
/// path.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let file_name = path
        .file_name()
        .and_then(|n| n.to_str())
        .context("output path has no file name")?;
    let tmp = path.with_file_name(format!("{file_name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}
