//! `sim-offline`: classify a DRAM error trace, then replay it under a page
//! offlining policy to measure how many errors offlining would have
//! absorbed and at what capacity cost.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::Context;
use fleetfail::classify::classify_fleet;
use fleetfail::sim::{
    run_offline_sim, write_timeline_csv, OfflinePolicy, OfflineStore, RetryPolicy,
};
use fleetfail::trace::parse::{open_reader, RecordBatch, Schema};
use serde::Serialize;

use crate::commands::{read_records, write_jsonl_file, write_text};
use crate::manifest::{write_json_pretty, Run};
use crate::svg::{line_chart, Series};
use crate::Format;

#[derive(Serialize)]
struct OfflineSummary {
    total_errors: u64,
    observed_errors: u64,
    suppressed_errors: u64,
    pages_offlined: u64,
    failed_attempts: u64,
    tickets: Vec<String>,
    /// 1 − observed/total over the trailing 30-day window.
    error_rate_reduction: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn execute(
    run: &mut Run,
    input: &Path,
    seed: u64,
    threshold: u64,
    window: i64,
    errors_before_offline: u64,
    cap_frac: f64,
    fail_prob: f64,
    retry_delay: Option<i64>,
    capacity_bytes: u64,
    resume: Option<&Path>,
    format: Format,
    svg: bool,
) -> anyhow::Result<()> {
    let RecordBatch::MemErrors(mut events) = read_records("--input", input, Schema::MemError)?
    else {
        unreachable!("mem_error schema parses to MemErrors");
    };
    // Trace files are often ordered per server; the replay needs one global
    // timeline. Classification groups per server-month either way.
    events.sort_by(|a, b| (a.timestamp, &a.server_id).cmp(&(b.timestamp, &b.server_id)));
    let (_, classes) = classify_fleet(&events, threshold, window)
        .with_context(|| format!("--input {}", input.display()))?;

    let policy = OfflinePolicy {
        errors_before_offline,
        cap_frac,
        initial_fail_prob: fail_prob,
        retry: match retry_delay {
            Some(seconds) => RetryPolicy::FixedDelay { seconds },
            None => RetryPolicy::None,
        },
    };
    let store = match resume {
        Some(path) => {
            let reader =
                open_reader(path).with_context(|| format!("--resume {}", path.display()))?;
            Some(
                OfflineStore::read_jsonl(reader)
                    .with_context(|| format!("--resume {}", path.display()))?,
            )
        }
        None => None,
    };
    let report = run_offline_sim(
        &events,
        &classes,
        &policy,
        capacity_bytes,
        seed,
        store.as_ref(),
    )
    .with_context(|| format!("--input {}", input.display()))?;

    match format {
        Format::Csv => {
            let path = run.path("timeline.csv");
            let file =
                File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
            write_timeline_csv(&report.timeline, BufWriter::new(file))
                .with_context(|| format!("writing {}", path.display()))?;
        }
        Format::Json => write_jsonl_file(&run.path("timeline.jsonl"), &report.timeline)?,
    }
    {
        let path = run.path("offline_store.jsonl");
        let file =
            File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        report
            .store
            .write_jsonl(BufWriter::new(file))
            .with_context(|| format!("writing {}", path.display()))?;
    }

    let summary = OfflineSummary {
        total_errors: report.total_errors,
        observed_errors: report.observed_errors,
        suppressed_errors: report.suppressed_errors,
        pages_offlined: report.pages_offlined,
        failed_attempts: report.failed_attempts,
        tickets: report.tickets.clone(),
        error_rate_reduction: report.error_rate_reduction,
    };
    write_json_pretty(&run.path("offline_report.json"), &summary)?;

    if svg {
        let series = [Series {
            label: "errors/day".to_string(),
            points: report
                .timeline
                .iter()
                .map(|d| (d.day as f64, d.errors as f64))
                .collect(),
        }];
        let chart = line_chart("Observed errors per day", "day", "errors", &series);
        write_text(&run.path("timeline.svg"), &chart)?;
    }

    println!(
        "{} errors: {} observed, {} suppressed",
        summary.total_errors, summary.observed_errors, summary.suppressed_errors,
    );
    println!(
        "trailing 30-day error rate reduced {:.1}%",
        summary.error_rate_reduction * 100.0
    );
    println!(
        "{} pages offlined, {} failed attempts, {} capacity tickets",
        summary.pages_offlined,
        summary.failed_attempts,
        summary.tickets.len()
    );
    Ok(())
}
