//! Run manifests: every subcommand writes `manifest.json` into its output
//! directory describing the exact invocation — argv, input files, seed, the
//! versions of the built-in models, and the artifacts produced. The manifest
//! is written even when the run fails on bad data, with the error recorded,
//! so a directory of artifacts is never silently unexplained.
//!
//! Manifests carry no timestamps: rerunning with the same argv, inputs, and
//! seed reproduces every artifact byte for byte, the manifest included.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

/// Names and versions of the models compiled into the binary.
fn builtin_models() -> BTreeMap<String, String> {
    BTreeMap::from([("paper-2015".to_string(), fleetfail::VERSION.to_string())])
}

#[derive(Debug, Serialize)]
struct Manifest {
    command: String,
    argv: Vec<String>,
    inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    builtin_models: BTreeMap<String, String>,
    outputs: Vec<String>,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// One subcommand invocation: owns the output directory and accumulates the
/// manifest while the command body runs.
pub struct Run {
    out_dir: PathBuf,
    manifest: Manifest,
}

impl Run {
    /// Creates the output directory and starts a manifest for `command`.
    pub fn new(
        command: &str,
        out_dir: &Path,
        inputs: Vec<PathBuf>,
        seed: Option<u64>,
    ) -> anyhow::Result<Run> {
        fs::create_dir_all(out_dir)
            .with_context(|| format!("--out {}: cannot create directory", out_dir.display()))?;
        Ok(Run {
            out_dir: out_dir.to_path_buf(),
            manifest: Manifest {
                command: command.to_string(),
                argv: std::env::args().collect(),
                inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
                seed,
                builtin_models: builtin_models(),
                outputs: Vec::new(),
                status: String::new(),
                error: None,
            },
        })
    }

    /// Resolves an artifact name inside the output directory and records it
    /// in the manifest.
    pub fn path(&mut self, name: &str) -> PathBuf {
        self.manifest.outputs.push(name.to_string());
        self.out_dir.join(name)
    }

    /// Runs the command body, then writes the manifest — on success with
    /// status `ok`, on failure with status `error` and the error chain —
    /// and propagates the body's result.
    pub fn execute<F>(mut self, body: F) -> anyhow::Result<()>
    where
        F: FnOnce(&mut Run) -> anyhow::Result<()>,
    {
        let result = body(&mut self);
        match &result {
            Ok(()) => self.manifest.status = "ok".to_string(),
            Err(err) => {
                self.manifest.status = "error".to_string();
                self.manifest.error = Some(format!("{err:#}"));
            }
        }
        let path = self.out_dir.join("manifest.json");
        let written = write_json_pretty(&path, &self.manifest);
        result.and(written)
    }
}

/// Writes a value as pretty-printed JSON with a trailing newline.
pub fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)
        .with_context(|| format!("writing {}", path.display()))?;
    w.write_all(b"\n")
        .with_context(|| format!("writing {}", path.display()))?;
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}
