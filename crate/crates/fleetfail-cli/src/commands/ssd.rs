//! `ssd`: fleet-level SSD reliability from SMART-style snapshots — failure
//! rate bucketed against a usage factor, lifecycle phase boundaries, fleet
//! UBER, two-SSD correlated-failure risk, and write amplification.

use std::path::Path;

use anyhow::Context;
use fleetfail::ssd::{
    bits_accessed, conditional_both_fail, factor_curve, is_failed, label_phases, uber,
    write_amplification_ratio, FleetPairIndex, LifecyclePhases, SsdFactor,
};
use fleetfail::trace::parse::{RecordBatch, Schema};
use serde::Serialize;

use crate::commands::{read_records, write_csv_file, write_jsonl_file, write_text};
use crate::manifest::{write_json_pretty, Run};
use crate::svg::{line_chart, Series};
use crate::Format;

#[derive(Serialize)]
struct SsdReport {
    snapshots: usize,
    failed_fraction: f64,
    /// Uncorrectable errors per bit accessed, fleet-wide; absent when the
    /// snapshots record no accessed bits.
    #[serde(skip_serializing_if = "Option::is_none")]
    fleet_uber: Option<f64>,
    /// P(both SSDs of a two-SSD server failed | at least one did); absent
    /// when no two-SSD server has a failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    conditional_both_fail: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_write_amplification: Option<f64>,
    factor: String,
    bucket_width: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    phases: Option<LifecyclePhases>,
    /// Why phases were not labeled, when they were not.
    #[serde(skip_serializing_if = "Option::is_none")]
    phases_note: Option<String>,
}

#[allow(clippy::too_many_arguments)]
pub fn execute(
    run: &mut Run,
    input: &Path,
    factor: SsdFactor,
    bucket_width: f64,
    min_frac: f64,
    format: Format,
    svg: bool,
) -> anyhow::Result<()> {
    let RecordBatch::Snapshots(snapshots) = read_records("--input", input, Schema::SsdSnapshot)?
    else {
        unreachable!("ssd_snapshot schema parses to Snapshots");
    };
    let curve = factor_curve(&snapshots, factor, bucket_width, min_frac)
        .with_context(|| format!("--input {}: factor curve", input.display()))?;

    match format {
        Format::Csv => write_csv_file(&run.path("factor_curve.csv"), &curve.buckets)?,
        Format::Json => write_jsonl_file(&run.path("factor_curve.jsonl"), &curve.buckets)?,
    }

    // Phases are genuinely absent on many curves (e.g. too few buckets or
    // no wearout in range); that is a finding, not a failure.
    let (phases, phases_note) = match label_phases(&curve) {
        Ok(p) => (Some(p), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let total_uncorrectable: u64 = snapshots.iter().map(|s| s.uncorrectable_errors).sum();
    let total_bits: u64 = snapshots.iter().map(bits_accessed).sum();
    let fleet_uber = if total_bits > 0 {
        Some(uber(total_uncorrectable, total_bits)?)
    } else {
        None
    };
    let failed = snapshots.iter().filter(|s| is_failed(s)).count();
    let pair_index = FleetPairIndex::from_snapshots(&snapshots);
    let both_fail = conditional_both_fail(&pair_index).ok();
    let amps: Vec<f64> = snapshots
        .iter()
        .filter(|s| s.os_sectors_written > 0)
        .map(write_amplification_ratio)
        .collect::<fleetfail::Result<_>>()?;
    let mean_write_amplification = if amps.is_empty() {
        None
    } else {
        Some(amps.iter().sum::<f64>() / amps.len() as f64)
    };

    let report = SsdReport {
        snapshots: snapshots.len(),
        failed_fraction: failed as f64 / snapshots.len() as f64,
        fleet_uber,
        conditional_both_fail: both_fail,
        mean_write_amplification,
        factor: factor.to_string(),
        bucket_width,
        phases,
        phases_note,
    };
    write_json_pretty(&run.path("ssd_report.json"), &report)?;

    if svg {
        let series = vec![
            Series {
                label: "failure rate".to_string(),
                points: curve.buckets.iter().map(|b| (b.x, b.rate)).collect(),
            },
            Series {
                label: "95% CI low".to_string(),
                points: curve.buckets.iter().map(|b| (b.x, b.ci_low)).collect(),
            },
            Series {
                label: "95% CI high".to_string(),
                points: curve.buckets.iter().map(|b| (b.x, b.ci_high)).collect(),
            },
        ];
        let chart = line_chart(
            &format!("SSD failure rate by {factor}"),
            &factor.to_string(),
            "failure rate",
            &series,
        );
        write_text(&run.path("factor_curve.svg"), &chart)?;
    }

    println!(
        "{} snapshots, {:.2}% failed, {} curve buckets",
        report.snapshots,
        report.failed_fraction * 100.0,
        curve.buckets.len()
    );
    if let Some(u) = report.fleet_uber {
        println!("fleet UBER: {u:.3e}");
    }
    if let Some(p) = report.conditional_both_fail {
        println!("P(both SSDs fail | one failed): {:.1}%", p * 100.0);
    }
    if let Some(a) = report.mean_write_amplification {
        println!("mean write amplification: {a:.2}");
    }
    match (&report.phases, &report.phases_note) {
        (Some(p), _) => println!(
            "lifecycle phases (TB written): early detection ends {:.1}, \
             early failure ends {:.1}, wearout from {:.1}",
            p.early_detection_end_tb, p.early_failure_end_tb, p.wearout_onset_tb
        ),
        (None, Some(note)) => println!("lifecycle phases not labeled: {note}"),
        (None, None) => {}
    }
    Ok(())
}
