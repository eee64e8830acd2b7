use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use hilbert_bodies::RunConfig;
use serde::Serialize;
use serde_json::{json, Value};

pub const TOOL: &str = "hilbert-bodies";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// '#'-prefixed preamble: tool, command, config, then any extra lines.
pub fn csv_preamble(command: &str, cfg: &RunConfig, extra: &[String]) -> String {
    let mut out = format!("# {TOOL} {VERSION}\n# command: {command}\n# config: {}\n", cfg.summary());
    for line in extra {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

pub fn csv_table(columns: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?;
    Ok(String::from_utf8(bytes)?)
}

/// JSON document with the same provenance fields as the CSV preamble.
pub fn json_document(command: &str, cfg: &RunConfig, body: impl Serialize) -> Result<String> {
    let mut doc = json!({ "tool": TOOL, "version": VERSION, "command": command, "config": cfg });
    if let (Value::Object(dst), Value::Object(src)) = (&mut doc, serde_json::to_value(body)?) {
        dst.extend(src);
    }
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}

/// Writes `text` to `path` via a temporary file in the same directory and a
/// rename, so a failed run never leaves a half-written file. `None` means
/// standard output.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(text.as_bytes())?;
        return Ok(stdout.flush()?);
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Shortest round-trip rendering, so identical runs give identical bytes.
pub fn num(x: f64) -> String {
    format!("{x}")
}
