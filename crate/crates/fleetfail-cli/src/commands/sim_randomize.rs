//! `sim-randomize`: cost and benefit of periodic physical page
//! randomization — the steady-state migration overhead implied by a
//! capacity/utilization/period plan, and optionally a wear-leveling
//! simulation under a skewed write workload.

use std::path::Path;

use anyhow::Context;
use fleetfail::sim::{
    overhead_estimate, run_randomizer_sim, RandomizationPlan, DEFAULT_PAGE_MIGRATE_LATENCY_S,
};
use serde::Serialize;

use crate::commands::{read_json, write_csv_file, write_jsonl_file, write_text};
use crate::manifest::{write_json_pretty, Run};
use crate::svg::{line_chart, Series};
use crate::Format;

#[derive(Serialize)]
struct WearRow {
    frame: usize,
    baseline: u64,
    randomized: u64,
}

#[derive(Serialize)]
struct SimPart {
    frames: usize,
    steps: u64,
    pages_migrated: u64,
    gini_baseline: f64,
    gini_randomized: f64,
}

#[derive(Serialize)]
struct RandomizeReport {
    pages_per_second: f64,
    overhead_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sim: Option<SimPart>,
}

#[allow(clippy::too_many_arguments)]
pub fn execute(
    run: &mut Run,
    seed: u64,
    capacity_bytes: u64,
    utilization: f64,
    period_days: f64,
    steps: Option<u64>,
    pages: usize,
    weights_path: Option<&Path>,
    format: Format,
    svg: bool,
) -> anyhow::Result<()> {
    let plan = RandomizationPlan {
        capacity_bytes,
        utilization,
        period_days,
        per_page_latency_s: DEFAULT_PAGE_MIGRATE_LATENCY_S,
    };
    let overhead = overhead_estimate(&plan)
        .context("check --capacity-bytes, --utilization, and --period-days")?;
    println!(
        "{:.1} pages/s migrated, {:.2}% of one core",
        overhead.pages_per_second,
        overhead.overhead_fraction * 100.0
    );

    let sim = match steps {
        Some(steps) => {
            let weights: Vec<f64> = match weights_path {
                Some(path) => read_json("--weights", path)?,
                None => vec![1.0; pages],
            };
            let report = run_randomizer_sim(&weights, &plan, steps, seed)
                .context("check --weights/--pages against --capacity-bytes")?;

            let rows: Vec<WearRow> = report
                .wear_baseline
                .iter()
                .zip(&report.wear_randomized)
                .enumerate()
                .map(|(frame, (&baseline, &randomized))| WearRow {
                    frame,
                    baseline,
                    randomized,
                })
                .collect();
            match format {
                Format::Csv => write_csv_file(&run.path("wear.csv"), &rows)?,
                Format::Json => write_jsonl_file(&run.path("wear.jsonl"), &rows)?,
            }
            if svg {
                let series = [
                    Series {
                        label: "baseline".to_string(),
                        points: rows
                            .iter()
                            .map(|r| (r.frame as f64, r.baseline as f64))
                            .collect(),
                    },
                    Series {
                        label: "randomized".to_string(),
                        points: rows
                            .iter()
                            .map(|r| (r.frame as f64, r.randomized as f64))
                            .collect(),
                    },
                ];
                let chart = line_chart("Per-frame write wear", "frame", "writes", &series);
                write_text(&run.path("wear.svg"), &chart)?;
            }

            println!(
                "{} steps over {} frames: {} migrations, write Gini {:.3} -> {:.3}",
                report.steps,
                report.frames,
                report.pages_migrated,
                report.gini_baseline,
                report.gini_randomized
            );
            Some(SimPart {
                frames: report.frames,
                steps: report.steps,
                pages_migrated: report.pages_migrated,
                gini_baseline: report.gini_baseline,
                gini_randomized: report.gini_randomized,
            })
        }
        None => None,
    };

    let report = RandomizeReport {
        pages_per_second: overhead.pages_per_second,
        overhead_fraction: overhead.overhead_fraction,
        sim,
    };
    write_json_pretty(&run.path("randomize_report.json"), &report)
}
