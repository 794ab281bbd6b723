//! Output emission: CSV tables and the run manifest.
//!
//! Every numeric cell is written in scientific notation with ten
//! significant digits, enough to reproduce comparisons downstream without
//! round-tripping through the binary. A manifest accompanies each run and
//! records what produced the tables: tool version, verb, the SHA-256 of the
//! exact configuration text, the seed and sample count in effect, and the
//! file list — a run is reproducible from the manifest plus the config.

use crate::error::{Error, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

/// Format one numeric cell: scientific, ten significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.9e}")
}

/// Format an optional numeric cell; absent values stay empty.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// Format an optional boolean flag as 1/0; absent stays empty.
pub fn fmt_flag(b: Option<bool>) -> String {
    b.map(|v| if v { "1" } else { "0" }.to_string()).unwrap_or_default()
}

/// SHA-256 of a text, hex-encoded.
pub fn sha256_hex(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// A sink for one run's artifacts: an output directory plus the context
/// every manifest repeats.
pub struct RunWriter {
    out_dir: PathBuf,
    verb: String,
    config_sha256: String,
    config_source: String,
    files: Vec<String>,
}

impl RunWriter {
    /// Create the output directory (and parents) and stage the manifest
    /// context. The exact configuration text is copied alongside the
    /// outputs so the manifest's hash always has its preimage next to it.
    pub fn new(out_dir: &Path, verb: &str, config_text: &str, config_source: &str) -> Result<Self> {
        fs::create_dir_all(out_dir)
            .map_err(|e| Error::Io(format!("cannot create {}: {e}", out_dir.display())))?;
        let mut w = RunWriter {
            out_dir: out_dir.to_path_buf(),
            verb: verb.to_string(),
            config_sha256: sha256_hex(config_text),
            config_source: config_source.to_string(),
            files: Vec::new(),
        };
        w.write_text("config.toml", config_text)?;
        Ok(w)
    }

    fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.out_dir.join(name);
        fs::write(&path, text).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Write one CSV table.
    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut text = String::new();
        text.push_str(&header.join(","));
        text.push('\n');
        for row in rows {
            debug_assert_eq!(row.len(), header.len(), "row width must match header");
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.write_text(name, &text)
    }

    /// Write the manifest, merging run-specific parameters into the common
    /// context, and return the path.
    pub fn finish(mut self, params: Value) -> Result<PathBuf> {
        self.files.push("manifest.json".to_string());
        self.files.sort();
        let manifest = json!({
            "tool": "leofade",
            "version": env!("CARGO_PKG_VERSION"),
            "verb": self.verb,
            "config_source": self.config_source,
            "config_sha256": self.config_sha256,
            "params": params,
            "files": self.files,
        });
        let path = self.out_dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| Error::Io(format!("manifest serialization failed: {e}")))?;
        fs::write(&path, text + "\n")
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}
