//! `net`: network reliability reporting — incident breakdowns and
//! resolution times, per-device-type rates against population counts, and
//! backbone-link MTBF/MTTR percentile curves from fiber repair tickets.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;
use fleetfail::net::{
    breakdown, device_report, link_mtbf_values, link_mttr_values, percentile_curve,
    resolution_percentile, ticket_group_report, DeviceReliability, GroupBy, GroupReliability,
    ReliabilityCurve, TicketGroupBy,
};
use fleetfail::stats::ExponentialCurve;
use fleetfail::trace::parse::{RecordBatch, Schema};
use fleetfail::trace::types::DeviceType;
use serde::Serialize;

use crate::commands::{read_json, read_records, write_csv_file, write_jsonl_file, write_text};
use crate::manifest::{write_json_pretty, Run};
use crate::svg::{line_chart, Series};
use crate::Format;

#[derive(Serialize)]
struct BreakdownRow {
    label: String,
    fraction: f64,
}

#[derive(Serialize)]
struct CurveRow {
    percentile: f64,
    hours: f64,
}

#[derive(Serialize)]
struct TicketGroupRow {
    group: String,
    links: usize,
    tickets: usize,
    median_mtbf_h: Option<f64>,
    median_mttr_h: Option<f64>,
}

#[derive(Serialize)]
struct NetReport {
    incidents: usize,
    p75_resolution_h: f64,
    breakdown: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    devices: Option<Vec<DeviceReliability>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mtbf_fit: Option<ExponentialCurve>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mttr_fit: Option<ExponentialCurve>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ticket_groups: Option<BTreeMap<String, GroupReliability>>,
}

/// Sorted per-entity values as (percentile, hours) rows, the same
/// percentile the exponential fit used.
fn curve_rows(curve: &ReliabilityCurve) -> Vec<CurveRow> {
    let n = curve.values.len() as f64;
    curve
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| CurveRow {
            percentile: (i + 1) as f64 / n,
            hours: v,
        })
        .collect()
}

fn curve_chart(title: &str, curve: &ReliabilityCurve) -> String {
    let observed: Vec<(f64, f64)> = curve_rows(curve)
        .iter()
        .map(|r| (r.percentile, r.hours))
        .collect();
    let fitted: Vec<(f64, f64)> = observed
        .iter()
        .map(|&(p, _)| (p, curve.fit.a * (curve.fit.b * p).exp()))
        .collect();
    line_chart(
        title,
        "percentile",
        "hours",
        &[
            Series {
                label: "observed".to_string(),
                points: observed,
            },
            Series {
                label: "fit".to_string(),
                points: fitted,
            },
        ],
    )
}

#[allow(clippy::too_many_arguments)]
pub fn execute(
    run: &mut Run,
    input: &Path,
    tickets_path: Option<&Path>,
    population_path: Option<&Path>,
    group_by: GroupBy,
    ticket_group_by: TicketGroupBy,
    format: Format,
    svg: bool,
) -> anyhow::Result<()> {
    let RecordBatch::Incidents(incidents) = read_records("--input", input, Schema::Incident)?
    else {
        unreachable!("incident schema parses to Incidents");
    };
    let shares =
        breakdown(&incidents, group_by).with_context(|| format!("--input {}", input.display()))?;
    let p75 = resolution_percentile(&incidents, 0.75)
        .with_context(|| format!("--input {}", input.display()))?;

    let rows: Vec<BreakdownRow> = shares
        .iter()
        .map(|(label, &fraction)| BreakdownRow {
            label: label.clone(),
            fraction,
        })
        .collect();
    match format {
        Format::Csv => write_csv_file(&run.path("breakdown.csv"), &rows)?,
        Format::Json => write_jsonl_file(&run.path("breakdown.jsonl"), &rows)?,
    }

    let devices = match population_path {
        Some(path) => {
            let populations: BTreeMap<DeviceType, u64> = read_json("--population", path)?;
            let report = device_report(&incidents, &populations)
                .with_context(|| format!("--population {}", path.display()))?;
            match format {
                Format::Csv => write_csv_file(&run.path("devices.csv"), &report)?,
                Format::Json => write_jsonl_file(&run.path("devices.jsonl"), &report)?,
            }
            Some(report)
        }
        None => None,
    };

    let mut mtbf_fit = None;
    let mut mttr_fit = None;
    let mut ticket_groups = None;
    if let Some(path) = tickets_path {
        let RecordBatch::Tickets(tickets) = read_records("--tickets", path, Schema::FiberTicket)?
        else {
            unreachable!("fiber_ticket schema parses to Tickets");
        };

        // Percentile curves need at least 3 links with enough tickets;
        // smaller populations still get the per-group medians below.
        let mtbf: Vec<f64> = link_mtbf_values(&tickets)?.into_values().collect();
        if mtbf.len() >= 3 {
            let curve = percentile_curve(&mtbf)?;
            match format {
                Format::Csv => write_csv_file(&run.path("link_mtbf.csv"), &curve_rows(&curve))?,
                Format::Json => {
                    write_jsonl_file(&run.path("link_mtbf.jsonl"), &curve_rows(&curve))?
                }
            }
            if svg {
                write_text(
                    &run.path("link_mtbf.svg"),
                    &curve_chart("Backbone link MTBF by percentile", &curve),
                )?;
            }
            mtbf_fit = Some(curve.fit);
        }
        let mttr: Vec<f64> = link_mttr_values(&tickets)?.into_values().collect();
        if mttr.len() >= 3 {
            let curve = percentile_curve(&mttr)?;
            match format {
                Format::Csv => write_csv_file(&run.path("link_mttr.csv"), &curve_rows(&curve))?,
                Format::Json => {
                    write_jsonl_file(&run.path("link_mttr.jsonl"), &curve_rows(&curve))?
                }
            }
            if svg {
                write_text(
                    &run.path("link_mttr.svg"),
                    &curve_chart("Backbone link MTTR by percentile", &curve),
                )?;
            }
            mttr_fit = Some(curve.fit);
        }

        let groups = ticket_group_report(&tickets, ticket_group_by)
            .with_context(|| format!("--tickets {}", path.display()))?;
        let group_rows: Vec<TicketGroupRow> = groups
            .iter()
            .map(|(group, g)| TicketGroupRow {
                group: group.clone(),
                links: g.links,
                tickets: g.tickets,
                median_mtbf_h: g.median_mtbf_h,
                median_mttr_h: g.median_mttr_h,
            })
            .collect();
        match format {
            Format::Csv => write_csv_file(&run.path("ticket_groups.csv"), &group_rows)?,
            Format::Json => write_jsonl_file(&run.path("ticket_groups.jsonl"), &group_rows)?,
        }
        ticket_groups = Some(groups);
    }

    let report = NetReport {
        incidents: incidents.len(),
        p75_resolution_h: p75,
        breakdown: shares,
        devices,
        mtbf_fit,
        mttr_fit,
        ticket_groups,
    };
    write_json_pretty(&run.path("net_report.json"), &report)?;

    println!(
        "{} incidents, p75 resolution {:.1} h",
        report.incidents, report.p75_resolution_h
    );
    for (label, fraction) in &report.breakdown {
        println!("{label:<18} {:>6.2}%", fraction * 100.0);
    }
    if let Some(fit) = &report.mtbf_fit {
        println!(
            "link MTBF curve: {:.2}·e^({:.4}·p) h, R² {:.4}",
            fit.a, fit.b, fit.r2
        );
    }
    if let Some(fit) = &report.mttr_fit {
        println!(
            "link MTTR curve: {:.2}·e^({:.4}·p) h, R² {:.4}",
            fit.a, fit.b, fit.r2
        );
    }
    Ok(())
}
