//! `fit`: fit the logistic server-failure model to labeled designs and
//! write it as a model file usable by `predict --model`.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::Context;
use fleetfail::logistic::{fit_logistic, FitOptions};
use fleetfail::trace::parse::{RecordBatch, Schema};
use fleetfail::trace::ServerDesign;

use crate::commands::read_records;
use crate::manifest::Run;

pub fn execute(
    run: &mut Run,
    input: &Path,
    name: &str,
    tol: f64,
    max_iter: usize,
    ridge: f64,
) -> anyhow::Result<()> {
    let RecordBatch::Designs(designs) = read_records("--input", input, Schema::LabeledDesign)?
    else {
        unreachable!("labeled_design schema parses to Designs");
    };
    let samples: Vec<(ServerDesign, bool)> = designs
        .into_iter()
        .map(|d| (d.design, d.in_error_group))
        .collect();
    let options = FitOptions {
        tol,
        max_iter,
        ridge,
    };
    let mut model =
        fit_logistic(&samples, &options).with_context(|| format!("--input {}", input.display()))?;
    model.name = name.to_string();

    let path = run.path("model.json");
    let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    model
        .to_json(BufWriter::new(file))
        .with_context(|| format!("writing {}", path.display()))?;

    println!("fitted `{}` on {} samples", model.name, samples.len());
    println!(
        "{:<12} {:>10} {:>10} {:>10} {:>5}",
        "factor", "beta", "std_err", "p_value", "sig"
    );
    for c in &model.coefficients {
        let fmt_opt = |v: Option<f64>| match v {
            Some(v) => format!("{v:.4}"),
            None => "-".to_string(),
        };
        let sig = match c.significant {
            Some(true) => "yes",
            Some(false) => "no",
            None => "-",
        };
        println!(
            "{:<12} {:>10.4} {:>10} {:>10} {:>5}",
            c.name,
            c.beta,
            fmt_opt(c.std_error),
            fmt_opt(c.p_value),
            sig
        );
    }
    Ok(())
}
