//! Command-line front end: wires trace ingestion, classification, model
//! fitting, reliability reporting, and mitigation simulation into
//! reproducible runs. Every run writes a manifest of its inputs, seed, and
//! outputs next to its artifacts — same argv, same inputs, same seed gives
//! byte-identical files.
//!
//! Exit codes: 0 success, 1 data error (bad file contents, failed
//! preconditions), 2 usage error (unknown flags, missing required
//! arguments).

mod commands;
mod manifest;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fleetfail::classify::{DEFAULT_CELL_WINDOW_S, DEFAULT_THRESHOLD};
use fleetfail::net::{GroupBy, TicketGroupBy};
use fleetfail::sim::{OfflinePolicy, DEFAULT_HOST_CAPACITY_BYTES};
use fleetfail::ssd::{SsdFactor, DEFAULT_BUCKET_MIN_FRAC};

use manifest::Run;

#[derive(Parser)]
#[command(
    name = "fleetfail",
    version,
    about = "Data-center device-failure analysis: DRAM error classification, \
             failure models, SSD and network reliability, mitigation simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Tabular artifact format: CSV files or JSON-lines files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn parse_group_by(s: &str) -> Result<GroupBy, fleetfail::Error> {
    s.parse()
}

fn parse_ticket_group_by(s: &str) -> Result<TicketGroupBy, fleetfail::Error> {
    s.parse()
}

fn parse_factor(s: &str) -> Result<SsdFactor, fleetfail::Error> {
    s.parse()
}

#[derive(Subcommand)]
enum Command {
    /// Generate a deterministic synthetic fleet trace bundle
    Generate {
        /// Output directory for trace files and the run manifest
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Generator seed; the same seed reproduces the bundle byte for byte
        #[arg(long)]
        seed: u64,
        /// Generator spec JSON; defaults to the built-in demo fleet
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Override the spec's fleet size
        #[arg(long)]
        fleet_size: Option<usize>,
    },
    /// Classify DRAM error events into component-failure classes
    Classify {
        /// Memory error events, JSONL (`.gz` transparent)
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Error-count threshold for socket/channel/bank rules
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: u64,
        /// Cell chain window in seconds
        #[arg(long, default_value_t = DEFAULT_CELL_WINDOW_S)]
        window: i64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Fit a logistic server-failure model to labeled designs
    Fit {
        /// Labeled server designs, JSONL (`.gz` transparent)
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Name recorded in the fitted model file
        #[arg(long, default_value = "fitted")]
        name: String,
        /// Convergence threshold on the largest coefficient step
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        /// Ridge penalty on non-intercept factors (0 = off)
        #[arg(long, default_value_t = 0.0)]
        ridge: f64,
    },
    /// Predict a design's relative failure rate from a model
    Predict {
        /// Built-in model name (`paper-2015`) or a model JSON path
        #[arg(long, default_value = "paper-2015")]
        model: String,
        /// Server design JSON
        #[arg(long)]
        design: PathBuf,
        /// Second design to compare against (ratio and reduction)
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// SSD fleet report: UBER, factor curve, lifecycle phases, pair risk
    Ssd {
        /// SSD snapshots, JSONL (`.gz` transparent)
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Snapshot factor to bucket the failure-rate curve against
        #[arg(long, default_value = "written", value_parser = parse_factor)]
        factor: SsdFactor,
        /// Bucket width in the factor's own units
        #[arg(long, default_value_t = 25.0)]
        bucket_width: f64,
        /// Drop buckets holding less than this fraction of snapshots
        #[arg(long, default_value_t = DEFAULT_BUCKET_MIN_FRAC)]
        min_frac: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also emit self-contained SVG charts
        #[arg(long)]
        svg: bool,
    },
    /// Network incident and backbone-link reliability report
    Net {
        /// Incident records, JSONL (`.gz` transparent)
        #[arg(long)]
        input: PathBuf,
        /// Fiber repair tickets, JSONL, for per-link MTBF/MTTR analysis
        #[arg(long)]
        tickets: Option<PathBuf>,
        /// Device populations JSON ({"RSW": 8000, ...}) for per-type rates
        #[arg(long)]
        population: Option<PathBuf>,
        #[arg(long, default_value = "root_cause", value_parser = parse_group_by)]
        group_by: GroupBy,
        #[arg(long, default_value = "vendor", value_parser = parse_ticket_group_by)]
        ticket_group_by: TicketGroupBy,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also emit self-contained SVG charts
        #[arg(long)]
        svg: bool,
    },
    /// Simulate page offlining over a classified error trace
    SimOffline {
        /// Memory error events, JSONL (`.gz` transparent)
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Simulation seed for offline-attempt outcomes
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: u64,
        #[arg(long, default_value_t = DEFAULT_CELL_WINDOW_S)]
        window: i64,
        /// Errors observed from a page before an offline attempt
        #[arg(long, default_value_t = OfflinePolicy::default().errors_before_offline)]
        errors_before_offline: u64,
        /// Share of host capacity allowed offline before a repair ticket
        #[arg(long, default_value_t = OfflinePolicy::default().cap_frac)]
        cap_frac: f64,
        /// Probability that one offline attempt fails
        #[arg(long, default_value_t = OfflinePolicy::default().initial_fail_prob)]
        fail_prob: f64,
        /// Retry failed attempts after this many seconds (default: never)
        #[arg(long)]
        retry_delay: Option<i64>,
        /// Per-host memory capacity in bytes
        #[arg(long, default_value_t = DEFAULT_HOST_CAPACITY_BYTES)]
        capacity_bytes: u64,
        /// Offline store JSONL from a previous run, to resume after reboot
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also emit self-contained SVG charts
        #[arg(long)]
        svg: bool,
    },
    /// Estimate page-randomization overhead and simulate wear leveling
    SimRandomize {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Simulation seed for write and migration placement
        #[arg(long)]
        seed: u64,
        /// Host memory capacity in bytes
        #[arg(long)]
        capacity_bytes: u64,
        /// Fraction of capacity that is mapped
        #[arg(long, default_value_t = 1.0)]
        utilization: f64,
        /// Days to cycle through every mapped page once
        #[arg(long, default_value_t = 1.0)]
        period_days: f64,
        /// Simulate this many one-write seconds (omit for estimate only)
        #[arg(long)]
        steps: Option<u64>,
        /// Page count for the simulated workload (uniform writes)
        #[arg(long, default_value_t = 64)]
        pages: usize,
        /// JSON array of per-page write weights, overriding --pages
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also emit self-contained SVG charts
        #[arg(long)]
        svg: bool,
    },
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Generate {
            out,
            seed,
            spec,
            fleet_size,
        } => {
            let run = Run::new("generate", &out, spec.iter().cloned().collect(), Some(seed))?;
            run.execute(|run| commands::generate::execute(run, seed, spec.as_deref(), fleet_size))
        }
        Command::Classify {
            input,
            out,
            threshold,
            window,
            format,
        } => {
            let run = Run::new("classify", &out, vec![input.clone()], None)?;
            run.execute(|run| commands::classify::execute(run, &input, threshold, window, format))
        }
        Command::Fit {
            input,
            out,
            name,
            tol,
            max_iter,
            ridge,
        } => {
            let run = Run::new("fit", &out, vec![input.clone()], None)?;
            run.execute(|run| commands::fit::execute(run, &input, &name, tol, max_iter, ridge))
        }
        Command::Predict {
            model,
            design,
            compare,
            out,
        } => {
            let mut inputs = vec![design.clone()];
            inputs.extend(compare.iter().cloned());
            let run = Run::new("predict", &out, inputs, None)?;
            run.execute(|run| commands::predict::execute(run, &model, &design, compare.as_deref()))
        }
        Command::Ssd {
            input,
            out,
            factor,
            bucket_width,
            min_frac,
            format,
            svg,
        } => {
            let run = Run::new("ssd", &out, vec![input.clone()], None)?;
            run.execute(|run| {
                commands::ssd::execute(run, &input, factor, bucket_width, min_frac, format, svg)
            })
        }
        Command::Net {
            input,
            tickets,
            population,
            group_by,
            ticket_group_by,
            out,
            format,
            svg,
        } => {
            let mut inputs = vec![input.clone()];
            inputs.extend(tickets.iter().cloned());
            inputs.extend(population.iter().cloned());
            let run = Run::new("net", &out, inputs, None)?;
            run.execute(|run| {
                commands::net::execute(
                    run,
                    &input,
                    tickets.as_deref(),
                    population.as_deref(),
                    group_by,
                    ticket_group_by,
                    format,
                    svg,
                )
            })
        }
        Command::SimOffline {
            input,
            out,
            seed,
            threshold,
            window,
            errors_before_offline,
            cap_frac,
            fail_prob,
            retry_delay,
            capacity_bytes,
            resume,
            format,
            svg,
        } => {
            let mut inputs = vec![input.clone()];
            inputs.extend(resume.iter().cloned());
            let run = Run::new("sim-offline", &out, inputs, Some(seed))?;
            run.execute(|run| {
                commands::sim_offline::execute(
                    run,
                    &input,
                    seed,
                    threshold,
                    window,
                    errors_before_offline,
                    cap_frac,
                    fail_prob,
                    retry_delay,
                    capacity_bytes,
                    resume.as_deref(),
                    format,
                    svg,
                )
            })
        }
        Command::SimRandomize {
            out,
            seed,
            capacity_bytes,
            utilization,
            period_days,
            steps,
            pages,
            weights,
            format,
            svg,
        } => {
            let run = Run::new(
                "sim-randomize",
                &out,
                weights.iter().cloned().collect(),
                Some(seed),
            )?;
            run.execute(|run| {
                commands::sim_randomize::execute(
                    run,
                    seed,
                    capacity_bytes,
                    utilization,
                    period_days,
                    steps,
                    pages,
                    weights.as_deref(),
                    format,
                    svg,
                )
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
