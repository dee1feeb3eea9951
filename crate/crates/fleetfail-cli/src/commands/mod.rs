//! One module per subcommand, plus I/O helpers shared between them. Each
//! command's `execute` takes the [`Run`](crate::manifest::Run) it reports
//! artifacts to and returns errors that name the flag or file at fault.

pub mod classify;
pub mod fit;
pub mod generate;
pub mod net;
pub mod predict;
pub mod sim_offline;
pub mod sim_randomize;
pub mod ssd;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use fleetfail::trace::parse::{
    open_reader, parse_events, write_csv, write_jsonl, RecordBatch, Schema,
};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Reads and validates a JSONL record file (`.gz` transparent), blaming
/// `flag` in any error.
pub fn read_records(flag: &str, path: &Path, schema: Schema) -> anyhow::Result<RecordBatch> {
    let reader = open_reader(path).with_context(|| format!("{flag} {}", path.display()))?;
    parse_events(reader, schema).with_context(|| format!("{flag} {}", path.display()))
}

/// Reads a single JSON value from a file, blaming `flag` in any error.
pub fn read_json<T: DeserializeOwned>(flag: &str, path: &Path) -> anyhow::Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("{flag} {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{flag} {}", path.display()))
}

pub fn write_jsonl_file<T: Serialize>(path: &Path, records: &[T]) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_jsonl(records, &mut w).with_context(|| format!("writing {}", path.display()))?;
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

pub fn write_csv_file<T: Serialize>(path: &Path, records: &[T]) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_csv(records, &mut w).with_context(|| format!("writing {}", path.display()))?;
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
