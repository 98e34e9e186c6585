//! CSV writers and the JSON metadata sidecar.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use massaction_core::automaton::MacroState;
use massaction_core::meanfield::Concentration;
use massaction_core::spatial::SpatialState;
use massaction_core::wellstirred::EnsembleSummary;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn header(out: &mut String, names: &[String]) {
    out.push('t');
    for n in names {
        write!(out, ",{n}").unwrap();
    }
    out.push('\n');
}

/// `t,<names>` with concentrations at 12 decimals.
pub fn trajectory_csv(names: &[String], rows: &[Concentration]) -> String {
    let mut out = String::new();
    header(&mut out, names);
    for (t, x) in rows.iter().enumerate() {
        write!(out, "{t}").unwrap();
        for v in x.as_slice() {
            write!(out, ",{v:.12}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// `t,<names>` with integer counts.
pub fn counts_csv(names: &[String], rows: &[MacroState]) -> String {
    let mut out = String::new();
    header(&mut out, names);
    for (t, c) in rows.iter().enumerate() {
        write!(out, "{t}").unwrap();
        for v in c.counts() {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// `t,<name>_mean...,<name>_std...`.
pub fn ensemble_csv(names: &[String], summary: &EnsembleSummary) -> String {
    let mut out = String::from("t");
    for n in names {
        write!(out, ",{n}_mean").unwrap();
    }
    for n in names {
        write!(out, ",{n}_std").unwrap();
    }
    out.push('\n');
    for (t, (mean, std)) in summary.mean.iter().zip(&summary.std).enumerate() {
        write!(out, "{t}").unwrap();
        for v in mean.iter().chain(std) {
            write!(out, ",{v:.6}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// `id,species,x,y` with positions at 6 decimals.
pub fn frame_csv(names: &[String], state: &SpatialState) -> String {
    let mut out = String::from("id,species,x,y\n");
    for p in &state.particles {
        writeln!(out, "{},{},{:.6},{:.6}", p.id, names[p.state], p.pos.x, p.pos.y).unwrap();
    }
    out
}

/// Lowercase hex SHA-256 of `text`.
pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RunMetadata {
    pub tool_version: String,
    pub rng_algorithm: String,
    pub seed: u64,
    pub replicates: usize,
    /// SHA-256 of the canonical scenario text.
    pub scenario_hash: String,
    pub model: String,
    pub alpha: f64,
    pub c_bin: f64,
    pub population: u64,
    pub horizon: usize,
    /// How `alpha` and `c_bin` were chosen, when not taken from the scenario.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<String>,
    pub wall_clock_seconds: f64,
}

/// Path of the sidecar for `data`: `trajectory.csv` gets
/// `trajectory.csv.meta.json`.
pub fn sidecar_path(data: &Path) -> PathBuf {
    let mut name = data.file_name().unwrap_or_default().to_owned();
    name.push(".meta.json");
    data.with_file_name(name)
}

/// Writes `content` to `dir/name` and the metadata next to it.
pub fn write_with_meta(dir: &Path, name: &str, content: &str, meta: &RunMetadata) -> io::Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, content)?;
    let mut json = serde_json::to_string_pretty(meta).map_err(io::Error::other)?;
    json.push('\n');
    fs::write(sidecar_path(&path), json)?;
    Ok(path)
}
