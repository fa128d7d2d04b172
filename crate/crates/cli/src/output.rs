//! Output artifacts with a reproducibility header, written atomically.
//!
//! Every CSV starts with `#` comment lines carrying the header and every
//! JSON file has a top-level `header` object. Wall-clock times go only into
//! `manifest.json`, so reruns of the same config give byte-identical
//! artifacts.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub const OUTPUT_SCHEMA: &str = "gxy-output/1";
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub schema: &'static str,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub modules: Vec<(&'static str, &'static str)>,
    pub command: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub overrides: Vec<String>,
}

impl Header {
    pub fn new<S: Serialize>(cfg: &RunConfig<S>) -> Self {
        Self {
            schema: OUTPUT_SCHEMA,
            tool: "gxy",
            tool_version: env!("CARGO_PKG_VERSION"),
            modules: vec![("gxy-core", gxy_core::VERSION), ("gxy-cli", env!("CARGO_PKG_VERSION"))],
            command: cfg.command,
            config_hash: cfg.hash(),
            seed: cfg.seed,
            config: serde_json::to_value(&cfg.params).expect("params serialise"),
            overrides: cfg.overrides.clone(),
        }
    }

    fn csv_comment(&self) -> String {
        let modules: Vec<String> = self.modules.iter().map(|(m, v)| format!("{m} {v}")).collect();
        let mut out = format!(
            "# {} {} {}\n# command={} config_hash={} seed={}\n# modules: {}\n# config: {}\n",
            self.schema,
            self.tool,
            self.tool_version,
            self.command,
            self.config_hash,
            self.seed,
            modules.join(", "),
            self.config,
        );
        if !self.overrides.is_empty() {
            out.push_str(&format!("# flag overrides: {}\n", self.overrides.join(", ")));
        }
        out
    }
}

/// Collects the artifacts of one run in an output directory.
pub struct Artifacts {
    dir: PathBuf,
    header: Header,
    written: Vec<(String, String)>,
    started: SystemTime,
}

impl Artifacts {
    pub fn create(dir: &Path, header: Header) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), header, written: Vec::new(), started: SystemTime::now() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn header(&self) -> &Header {
        &self.header
    }

    /// Writes `body` (which must start with its column line) behind the
    /// comment header.
    pub fn csv(&mut self, name: &str, body: &str) -> Result<()> {
        let text = format!("{}{}", self.header.csv_comment(), body);
        self.raw(name, text.as_bytes())
    }

    /// Writes `{"header": ..., "<key>": data}` as pretty JSON.
    pub fn json<T: Serialize>(&mut self, name: &str, key: &str, data: &T) -> Result<()> {
        let mut doc = serde_json::Map::new();
        doc.insert("header".into(), serde_json::to_value(&self.header)?);
        doc.insert(key.into(), serde_json::to_value(data)?);
        let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(doc))?;
        text.push('\n');
        self.raw(name, text.as_bytes())
    }

    fn raw(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.written.push((name.to_string(), hex::encode(Sha256::digest(bytes))));
        Ok(())
    }

    /// Writes `manifest.json` listing every artifact with its SHA-256 and
    /// the run's wall-clock span.
    pub fn finish(self) -> Result<Vec<String>> {
        let secs = |t: SystemTime| t.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        let finished = SystemTime::now();
        let manifest = serde_json::json!({
            "header": &self.header,
            "wall_clock": {
                "started_unix": secs(self.started),
                "finished_unix": secs(finished),
                "elapsed_seconds": secs(finished) - secs(self.started),
            },
            "artifacts": self.written.iter().map(|(n, h)| serde_json::json!({"file": n, "sha256": h})).collect::<Vec<_>>(),
        });
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        write_atomic(&self.dir.join(MANIFEST), text.as_bytes())?;
        Ok(self.written.into_iter().map(|(n, _)| n).collect())
    }
}

/// Temporary file in the target directory, renamed into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes).with_context(|| format!("writing {}", path.display()))?;
    tmp.as_file().sync_all().with_context(|| format!("syncing {}", path.display()))?;
    tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}
