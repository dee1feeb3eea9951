//! `generate`: write a synthetic fleet trace bundle. Which files appear
//! depends on which sections the generator spec enables; the resolved spec
//! itself is always written so a bundle documents its own provenance.

use std::path::Path;

use anyhow::Context;
use fleetfail::trace::gen::{generate_traces, GeneratorSpec};
use serde::Serialize;

use crate::commands::{read_json, write_jsonl_file};
use crate::manifest::{write_json_pretty, Run};

pub fn execute(
    run: &mut Run,
    seed: u64,
    spec_path: Option<&Path>,
    fleet_size: Option<usize>,
) -> anyhow::Result<()> {
    let mut spec: GeneratorSpec = match spec_path {
        Some(path) => read_json("--spec", path)?,
        None => GeneratorSpec::default(),
    };
    spec.seed = seed;
    if let Some(n) = fleet_size {
        spec.fleet_size = n;
    }

    let bundle = generate_traces(&spec).context("generating traces")?;

    write_json_pretty(&run.path("generator_spec.json"), &spec)?;
    let mut counts: Vec<(&str, usize)> = Vec::new();
    if spec.dram.is_some() {
        emit(run, "mem_events.jsonl", &bundle.mem_events, &mut counts)?;
        emit(run, "designs.jsonl", &bundle.designs, &mut counts)?;
    }
    if spec.ssd.is_some() {
        emit(run, "ssd_snapshots.jsonl", &bundle.snapshots, &mut counts)?;
    }
    if let Some(net) = &spec.net {
        emit(run, "incidents.jsonl", &bundle.incidents, &mut counts)?;
        if net.fiber.is_some() {
            emit(run, "fiber_tickets.jsonl", &bundle.tickets, &mut counts)?;
        }
    }

    for (name, n) in &counts {
        println!("{name}: {n} records");
    }
    Ok(())
}

fn emit<T: Serialize>(
    run: &mut Run,
    name: &'static str,
    records: &[T],
    counts: &mut Vec<(&'static str, usize)>,
) -> anyhow::Result<()> {
    write_jsonl_file(&run.path(name), records)?;
    counts.push((name, records.len()));
    Ok(())
}
