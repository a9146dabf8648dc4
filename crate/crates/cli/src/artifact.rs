//! Run-directory plumbing: every invocation writes its outputs into one
//! directory named by the (config, command, seed) digest, so identical
//! inputs land in the same place with byte-identical numeric files, and a
//! `run_record.json` ties the artifacts to the exact configuration that
//! produced them.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Final status recorded for a run. Threshold failures still produce the
/// full set of outputs; only the record and the exit code differ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    ThresholdFailure,
}

#[derive(Serialize)]
struct RunRecord<'a> {
    schema: u32,
    command: &'a str,
    config_sha256: &'a str,
    seed: Option<u64>,
    threads: usize,
    versions: BTreeMap<&'a str, &'a str>,
    wall_time_ms: u64,
    status: &'a str,
    outputs: BTreeMap<String, String>,
}

/// One run's output directory plus the manifest of files written into it.
/// The directory name is derived from the config bytes, the command, and
/// the effective seed, so a rerun of the same experiment overwrites itself.
pub struct RunDir {
    pub path: PathBuf,
    command: &'static str,
    config_sha256: String,
    seed: Option<u64>,
    threads: usize,
    started: Instant,
    outputs: BTreeMap<String, String>,
}

impl RunDir {
    pub fn create(
        parent: &Path,
        command: &'static str,
        config_bytes: &[u8],
        seed: Option<u64>,
        threads: usize,
    ) -> Result<Self> {
        let config_sha256 = sha256_hex(config_bytes);
        // run identity = config ⊕ command ⊕ seed: flags that change outputs
        // without touching the file must still split the directory
        let mut id = Sha256::new();
        id.update(config_bytes);
        id.update(command.as_bytes());
        match seed {
            Some(s) => id.update(s.to_le_bytes()),
            None => id.update(b"none"),
        }
        let digest = id.finalize();
        let mut tag = String::with_capacity(12);
        for b in &digest[..6] {
            tag.push_str(&format!("{b:02x}"));
        }
        let path = parent.join(format!("{command}-{tag}"));
        fs::create_dir_all(&path)
            .with_context(|| format!("creating run directory {}", path.display()))?;
        let mut run = RunDir {
            path,
            command,
            config_sha256,
            seed,
            threads,
            started: Instant::now(),
            outputs: BTreeMap::new(),
        };
        run.write_bytes("config.toml", config_bytes)?;
        Ok(run)
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let file = self.path.join(name);
        fs::write(&file, bytes).with_context(|| format!("writing {}", file.display()))?;
        self.outputs.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value).context("serializing report")?;
        bytes.push(b'\n');
        self.write_bytes(name, &bytes)
    }

    /// CSV table with a header row. Cells are preformatted strings; floats
    /// formatted with `{}` round-trip and stay byte-stable across runs.
    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).context("writing csv header")?;
        for row in rows {
            debug_assert_eq!(row.len(), header.len());
            w.write_record(row).context("writing csv row")?;
        }
        let bytes = w.into_inner().context("flushing csv")?;
        self.write_bytes(name, &bytes)
    }

    /// Writes `run_record.json` and returns the directory path. The record
    /// carries wall time so it is excluded from determinism comparisons.
    pub fn finish(self, status: RunStatus) -> Result<PathBuf> {
        let mut versions = BTreeMap::new();
        versions.insert("fejer-cli", env!("CARGO_PKG_VERSION"));
        versions.insert("fejer-core", fejer_core::VERSION);
        let record = RunRecord {
            schema: 1,
            command: self.command,
            config_sha256: &self.config_sha256,
            seed: self.seed,
            threads: self.threads,
            versions,
            wall_time_ms: self.started.elapsed().as_millis() as u64,
            status: match status {
                RunStatus::Ok => "ok",
                RunStatus::ThresholdFailure => "threshold-failure",
            },
            outputs: self.outputs.clone(),
        };
        let mut bytes = serde_json::to_vec_pretty(&record).context("serializing run record")?;
        bytes.push(b'\n');
        let file = self.path.join("run_record.json");
        fs::write(&file, bytes).with_context(|| format!("writing {}", file.display()))?;
        Ok(self.path)
    }
}
