//! Report envelopes, input hashes and grid parsing.

use std::path::Path;

use anyhow::{bail, Context, Result};
use qkt_core::rational::{format_rat, parse_rat};
use qkt_core::Rat;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = concat!("qkt ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Serialize)]
pub struct InputHash {
    pub name: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Hash of a file's bytes, keyed by its file name so reports do not depend
/// on the working directory.
pub fn hash_input(path: &Path) -> Result<InputHash> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(InputHash { name, sha256: sha256_hex(&bytes) })
}

pub fn hash_inputs(paths: &[&Path]) -> Result<Vec<InputHash>> {
    paths.iter().map(|p| hash_input(p)).collect()
}

/// Wraps a result in the common report header.
pub fn envelope(
    schema: &str,
    command: &str,
    seed: u64,
    inputs: &[InputHash],
    parameters: Value,
    result: Value,
) -> String {
    let doc = json!({
        "schema": schema,
        "tool_version": TOOL_VERSION,
        "command": command,
        "seed": seed,
        "inputs": inputs,
        "parameters": parameters,
        "result": result,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}

/// A decimal control parameter `0 < eps < 1/4`, kept with its source string.
pub fn parse_eps(s: &str) -> Result<f64> {
    let s = s.trim();
    let exact = parse_rat(s).with_context(|| format!("eps must be a decimal string, got {s:?}"))?;
    if exact <= Rat::from_integer(0) || exact >= Rat::new(1, 4) {
        bail!("eps must lie in (0, 1/4), got {s}");
    }
    Ok(s.parse::<f64>()?)
}

pub fn parse_nonneg(s: &str, what: &str) -> Result<Rat> {
    let r = parse_rat(s.trim()).with_context(|| format!("{what} must be a decimal or fraction, got {s:?}"))?;
    if r < Rat::from_integer(0) {
        bail!("{what} must be non-negative, got {s}");
    }
    Ok(r)
}

fn split(grid: &str) -> Vec<&str> {
    grid.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn check_ascending(vals: &[Rat], what: &str) -> Result<()> {
    if vals.is_empty() {
        bail!("{what} grid is empty");
    }
    if vals.windows(2).any(|w| w[0] >= w[1]) {
        bail!("{what} grid must be strictly ascending");
    }
    Ok(())
}

/// Comma-separated, strictly ascending rational grid.
pub fn parse_rat_grid(grid: &str, what: &str) -> Result<Vec<Rat>> {
    let vals = split(grid).into_iter().map(|s| parse_nonneg(s, what)).collect::<Result<Vec<_>>>()?;
    check_ascending(&vals, what)?;
    Ok(vals)
}

/// Comma-separated, strictly ascending eps grid.
pub fn parse_eps_grid(grid: &str) -> Result<Vec<f64>> {
    let parts = split(grid);
    let exact =
        parts.iter().map(|s| parse_rat(s).with_context(|| format!("bad eps {s:?}"))).collect::<Result<Vec<_>>>()?;
    check_ascending(&exact, "eps")?;
    parts.into_iter().map(parse_eps).collect()
}

pub fn rat_list(rs: &[Rat]) -> Vec<String> {
    rs.iter().map(format_rat).collect()
}
