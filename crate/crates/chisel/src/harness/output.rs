//! CSV and JSON-sidecar writers. Floats are written with Rust's shortest
//! round-trip formatting; key order in sidecars is sorted, so identical
//! inputs produce byte-identical files.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::Result;

pub fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x}")
    }
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{}", header.join(","))?;
    for row in rows {
        writeln!(f, "{}", row.join(","))?;
    }
    f.flush()?;
    Ok(())
}

/// Sidecar with the full config echo, artifact version, seed and
/// command-specific extras.
pub fn write_meta(path: &Path, config_echo: &Value, seed: Option<u64>, extra: Map<String, Value>) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut meta = Map::new();
    meta.insert("artifact_version".into(), json!(env!("CARGO_PKG_VERSION")));
    meta.insert("config".into(), config_echo.clone());
    meta.insert("seed".into(), seed.map_or(Value::Null, |s| json!(s)));
    for (k, v) in extra {
        meta.insert(k, v);
    }
    let text = serde_json::to_string_pretty(&Value::Object(meta))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
