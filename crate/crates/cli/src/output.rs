//! Artifact writers and readers. Everything written here is deterministic:
//! no timestamps, floats in shortest round-trip form, metadata as
//! `# key = value` comment lines (CSV) or a `meta` object (JSON).

use anyhow::{anyhow, Context, Result};
use std::path::Path;

pub const VERSION: &str = concat!("bakerlab ", env!("CARGO_PKG_VERSION"));

pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // avoid emitting the sign of a negative zero
        return "0".to_string();
    }
    format!("{v}")
}

pub fn write_csv(
    path: &Path,
    meta: &[(String, String)],
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut text = String::new();
    for (k, v) in meta {
        text.push_str(&format!("# {k} = {v}\n"));
    }
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub type CsvContents = (Vec<(String, String)>, Vec<String>, Vec<Vec<String>>);

/// Reads back a file produced by [`write_csv`]: metadata pairs, header,
/// data rows.
pub fn read_csv(path: &Path) -> Result<CsvContents> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut meta = Vec::new();
    let mut header = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| anyhow!("malformed metadata line `{line}`"))?;
            meta.push((k.trim().to_string(), v.trim().to_string()));
        } else if header.is_none() {
            header = Some(line.split(',').map(str::to_string).collect());
        } else {
            rows.push(line.split(',').map(str::to_string).collect());
        }
    }
    Ok((meta, header.ok_or_else(|| anyhow!("no header row"))?, rows))
}

/// Serializes `value` with a `meta` field injected at the top level.
pub fn write_json(path: &Path, meta: serde_json::Value, value: serde_json::Value) -> Result<()> {
    let mut value = value;
    value
        .as_object_mut()
        .ok_or_else(|| anyhow!("JSON artifact must be an object"))?
        .insert("meta".into(), meta);
    let text = serde_json::to_string_pretty(&value)? + "\n";
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}
