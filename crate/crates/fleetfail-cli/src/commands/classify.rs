//! `classify`: attribute each DRAM error in a fleet trace to a component
//! class and summarize how errors and affected server-months split across
//! classes.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::Context;
use fleetfail::classify::{classify_fleet, summarize, ComponentClass};
use fleetfail::trace::parse::{RecordBatch, Schema};
use serde::Serialize;

use crate::commands::{read_records, write_csv_file, write_jsonl_file};
use crate::manifest::{write_json_pretty, Run};
use crate::Format;

/// One classified event, joined back to its trace position.
#[derive(Serialize)]
struct ClassifiedRow {
    index: usize,
    server_id: String,
    timestamp: i64,
    class: ComponentClass,
}

pub fn execute(
    run: &mut Run,
    input: &Path,
    threshold: u64,
    window: i64,
    format: Format,
) -> anyhow::Result<()> {
    let RecordBatch::MemErrors(events) = read_records("--input", input, Schema::MemError)? else {
        unreachable!("mem_error schema parses to MemErrors");
    };
    let (groups, classes) = classify_fleet(&events, threshold, window)
        .with_context(|| format!("--input {}", input.display()))?;
    let report = summarize(&groups).with_context(|| format!("--input {}", input.display()))?;

    let rows: Vec<ClassifiedRow> = events
        .iter()
        .zip(&classes)
        .enumerate()
        .map(|(index, (e, &class))| ClassifiedRow {
            index,
            server_id: e.server_id.clone(),
            timestamp: e.timestamp,
            class,
        })
        .collect();
    match format {
        Format::Csv => {
            write_csv_file(&run.path("classified_events.csv"), &rows)?;
            let path = run.path("class_summary.csv");
            let file =
                File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
            report
                .write_csv(BufWriter::new(file))
                .with_context(|| format!("writing {}", path.display()))?;
        }
        Format::Json => {
            write_jsonl_file(&run.path("classified_events.jsonl"), &rows)?;
            write_json_pretty(&run.path("class_summary.json"), &report)?;
        }
    }

    println!(
        "{} errors across {} server-months with errors",
        report.total_errors, report.server_months_with_errors
    );
    for class in ComponentClass::ALL {
        let errors = report.error_fraction.get(&class).copied().unwrap_or(0.0);
        let servers = report.server_fraction.get(&class).copied().unwrap_or(0.0);
        println!(
            "{class:<8} {:>6.2}% of errors  {:>6.2}% of server-months",
            errors * 100.0,
            servers * 100.0
        );
    }
    Ok(())
}
