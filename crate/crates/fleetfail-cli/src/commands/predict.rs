//! `predict`: score a server design under a failure model — the built-in
//! published model by default, or any model file produced by `fit`. With
//! `--compare` it also reports how the design stacks up against a second
//! one under the same model.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::Context;
use fleetfail::logistic::{DesignComparison, LogisticFailureModel};
use fleetfail::trace::ServerDesign;
use serde::Serialize;

use crate::commands::read_json;
use crate::manifest::{write_json_pretty, Run};

#[derive(Serialize)]
struct Comparison {
    rate: f64,
    /// Design rate ÷ compared rate.
    ratio: f64,
    /// How much lower the compared design's rate is, in percent of the
    /// design's rate; negative when the compared design is worse.
    percent_reduction: f64,
}

#[derive(Serialize)]
struct Prediction {
    model: String,
    rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    compare: Option<Comparison>,
}

/// A built-in model name, or a path to a model file written by `fit`.
fn load_model(name: &str) -> anyhow::Result<LogisticFailureModel> {
    match LogisticFailureModel::builtin(name) {
        Ok(model) => Ok(model),
        Err(builtin_err) => {
            let path = Path::new(name);
            if !path.exists() {
                return Err(builtin_err).with_context(|| {
                    format!("--model {name}: not a built-in model and no such file")
                });
            }
            let file = File::open(path).with_context(|| format!("--model {}", path.display()))?;
            LogisticFailureModel::from_json(BufReader::new(file))
                .with_context(|| format!("--model {}", path.display()))
        }
    }
}

pub fn execute(
    run: &mut Run,
    model_name: &str,
    design_path: &Path,
    compare_path: Option<&Path>,
) -> anyhow::Result<()> {
    let model = load_model(model_name)?;
    let design: ServerDesign = read_json("--design", design_path)?;
    let rate = model
        .predict_relative_rate(&design)
        .with_context(|| format!("--design {}", design_path.display()))?;

    let compare = match compare_path {
        Some(path) => {
            let other: ServerDesign = read_json("--compare", path)?;
            let other_rate = model
                .predict_relative_rate(&other)
                .with_context(|| format!("--compare {}", path.display()))?;
            let cmp = DesignComparison::from_rates(rate, other_rate)
                .with_context(|| format!("--compare {}", path.display()))?;
            Some(Comparison {
                rate: other_rate,
                ratio: cmp.ratio,
                percent_reduction: cmp.percent_reduction * 100.0,
            })
        }
        None => None,
    };

    // The headline number, at the precision failure rates are quoted at.
    println!("{rate:.2}");
    if let Some(c) = &compare {
        println!("compared design: {:.2}", c.rate);
        println!("ratio: {:.2}x", c.ratio);
        println!("reduction: {:.1}%", c.percent_reduction);
    }

    let prediction = Prediction {
        model: model.name.clone(),
        rate,
        compare,
    };
    write_json_pretty(&run.path("prediction.json"), &prediction)
}
