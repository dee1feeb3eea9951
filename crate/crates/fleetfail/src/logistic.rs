//! Logistic server-failure model for DRAM.
//!
//! A [`LogisticFailureModel`] maps a [`ServerDesign`] to a *relative* failure
//! rate F ∈ (0,1) via ln[F/(1−F)] = β·x. The rate is comparative only — use
//! it to rank designs or compute reductions, not as an absolute probability.
//!
//! Ten factors are tracked. Eight form the prediction formula (Intercept,
//! Capacity, Density2Gb, Density4Gb, Chips, CPU%, Age, CPUs); two more
//! (Width8, Memory%) are recorded with their fitted statistics but excluded
//! from prediction because they are not significant. Set
//! [`LogisticFailureModel::include_excluded`] to fold them back in for
//! experimentation.
//!
//! [`fit_logistic`] estimates all ten coefficients from labeled designs by
//! iteratively reweighted least squares, with standard errors from the
//! observed information matrix and two-sided Wald p-values.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::trace::types::{Density, ServerDesign, TransferWidth};

/// Name of the shipped built-in model holding the published coefficients.
pub const BUILTIN_MODEL_NAME: &str = "paper-2015";

/// Wald p-value threshold below which a coefficient is flagged significant.
pub const SIGNIFICANCE_LEVEL: f64 = 0.01;

/// Number of tracked factors, intercept included.
const NF: usize = 10;

/// Factor names, in fixed order. These exact strings appear in serialized
/// models, so they are part of the file format.
const FACTOR_NAMES: [&str; NF] = [
    "Intercept",
    "Capacity",
    "Density2Gb",
    "Density4Gb",
    "Chips",
    "Width8",
    "CPU%",
    "Memory%",
    "Age",
    "CPUs",
];

/// Whether each factor participates in the prediction formula. Width8 and
/// Memory% are recorded-but-excluded annotations.
const IN_FORMULA: [bool; NF] = [true, true, true, true, true, false, true, false, true, true];

fn factor_index(name: &str) -> Option<usize> {
    FACTOR_NAMES.iter().position(|&n| n == name)
}

/// The factor vector x for one design, in [`FACTOR_NAMES`] order.
fn feature_row(design: &ServerDesign) -> [f64; NF] {
    [
        1.0,
        design.capacity_gb,
        (design.density == Density::TwoGb) as u8 as f64,
        (design.density == Density::FourGb) as u8 as f64,
        design.chips as f64,
        (design.transfer_width == TransferWidth::X8) as u8 as f64,
        design.cpu_util_pct,
        design.mem_util_pct,
        design.age_years,
        design.cpus as f64,
    ]
}

/// Numerically stable standard logistic function 1/(1+e^(−z)).
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Inverse of [`logistic`]: ln(p/(1−p)).
pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// One named coefficient with its fit statistics. Statistics are optional
/// because hand-written model files may carry bare coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    /// Two-sided Wald p-value. For the built-in model the sub-epsilon
    /// published values are stored as their upper bound 2e-16.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub significant: Option<bool>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// A fitted or loaded logistic failure model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticFailureModel {
    pub name: String,
    /// All tracked coefficients. The eight formula factors must be present;
    /// Width8 and Memory% are optional annotations.
    pub coefficients: Vec<Coefficient>,
    /// When set, Width8 and Memory% participate in prediction too.
    /// Off by default, matching the published formula.
    #[serde(default, skip_serializing_if = "is_false")]
    pub include_excluded: bool,
}

impl LogisticFailureModel {
    /// Loads a shipped model by name. `"paper-2015"` is the published
    /// ten-factor DRAM failure model.
    pub fn builtin(name: &str) -> Result<Self> {
        if name != BUILTIN_MODEL_NAME {
            return Err(Error::precondition(format!(
                "unknown built-in model `{name}` (available: {BUILTIN_MODEL_NAME})"
            )));
        }
        // (name, beta, std_error, p_value upper bound, significant)
        let rows: [(&str, f64, f64, f64, bool); NF] = [
            ("Intercept", -5.511, 3.011e-1, 2.000e-16, true),
            ("Capacity", 9.012e-2, 2.168e-2, 2.000e-16, true),
            ("Density2Gb", 1.018, 1.039e-1, 2.000e-16, true),
            ("Density4Gb", 2.585, 1.907e-1, 2.000e-16, true),
            ("Chips", -4.035e-2, 1.294e-2, 2.000e-16, true),
            ("Width8", 2.310e-1, 1.277e-1, 0.071, false),
            ("CPU%", 1.731e-2, 1.633e-3, 2.000e-16, true),
            ("Memory%", 5.905e-5, 1.224e-3, 0.962, false),
            ("Age", 2.296e-1, 3.956e-2, 2.000e-16, true),
            ("CPUs", 2.126e-1, 1.449e-2, 2.000e-16, true),
        ];
        let model = LogisticFailureModel {
            name: name.to_string(),
            coefficients: rows
                .into_iter()
                .map(|(name, beta, se, p, sig)| Coefficient {
                    name: name.to_string(),
                    beta,
                    std_error: Some(se),
                    p_value: Some(p),
                    significant: Some(sig),
                })
                .collect(),
            include_excluded: false,
        };
        model.validate()?;
        Ok(model)
    }

    /// Checks the structural invariant: every coefficient name is one of the
    /// ten known factors, none repeats, all betas are finite, and all eight
    /// formula factors are present.
    pub fn validate(&self) -> Result<()> {
        let mut seen = [false; NF];
        for c in &self.coefficients {
            let idx = factor_index(&c.name)
                .ok_or_else(|| Error::invalid(format!("unknown coefficient name `{}`", c.name)))?;
            if seen[idx] {
                return Err(Error::invalid(format!(
                    "duplicate coefficient `{}`",
                    c.name
                )));
            }
            seen[idx] = true;
            if !c.beta.is_finite() {
                return Err(Error::invalid(format!(
                    "coefficient `{}` is not finite: {}",
                    c.name, c.beta
                )));
            }
        }
        for (idx, &name) in FACTOR_NAMES.iter().enumerate() {
            if IN_FORMULA[idx] && !seen[idx] {
                return Err(Error::invalid(format!(
                    "model is missing formula coefficient `{name}`"
                )));
            }
        }
        Ok(())
    }

    /// Reads a model from JSON and validates it.
    pub fn from_json<R: Read>(reader: R) -> Result<Self> {
        let model: LogisticFailureModel = serde_json::from_reader(reader)
            .map_err(|e| Error::invalid(format!("model file: {e}")))?;
        model.validate()?;
        Ok(model)
    }

    /// Writes the model as pretty JSON.
    pub fn to_json<W: Write>(&self, mut writer: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut writer, self)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        writer.write_all(b"\n")?;
        Ok(())
    }

    /// The linear score β·x for a design, using the formula factors (plus
    /// the excluded ones when [`Self::include_excluded`] is set).
    pub fn linear_score(&self, design: &ServerDesign) -> Result<f64> {
        design.validate()?;
        let x = feature_row(design);
        for (i, v) in x.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::precondition(format!(
                    "non-finite factor {}: {v}",
                    FACTOR_NAMES[i]
                )));
            }
        }
        let mut z = 0.0;
        for c in &self.coefficients {
            let idx = factor_index(&c.name).expect("validated name");
            if IN_FORMULA[idx] || self.include_excluded {
                z += c.beta * x[idx];
            }
        }
        if !z.is_finite() {
            return Err(Error::precondition(format!("non-finite score {z}")));
        }
        Ok(z)
    }

    /// Relative failure rate F ∈ (0,1) for a design.
    pub fn predict_relative_rate(&self, design: &ServerDesign) -> Result<f64> {
        Ok(logistic(self.linear_score(design)?))
    }

    /// F for the all-zero factor vector: the rate of the baseline server the
    /// intercept encodes (1 Gb chips, ×4 interface, zero for every factor).
    pub fn baseline_rate(&self) -> f64 {
        let intercept = self
            .coefficients
            .iter()
            .find(|c| c.name == "Intercept")
            .expect("validated model has an intercept");
        logistic(intercept.beta)
    }

    /// Looks up a coefficient by factor name.
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

/// The outcome of pitting two designs against each other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignComparison {
    pub rate_a: f64,
    pub rate_b: f64,
    /// rate_a / rate_b.
    pub ratio: f64,
    /// (rate_a − rate_b) / rate_a, as a fraction. Positive when b is the
    /// better (lower-rate) design; negative when b is worse.
    pub percent_reduction: f64,
}

impl DesignComparison {
    /// Builds a comparison from two already-computed rates — e.g. rates
    /// quoted at reduced precision, where the reduction of the quoted
    /// values is wanted rather than the reduction of fresh predictions.
    pub fn from_rates(rate_a: f64, rate_b: f64) -> Result<Self> {
        for (side, r) in [("a", rate_a), ("b", rate_b)] {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::precondition(format!(
                    "rate_{side} must be in (0,1), got {r}"
                )));
            }
        }
        Ok(DesignComparison {
            rate_a,
            rate_b,
            ratio: rate_a / rate_b,
            percent_reduction: (rate_a - rate_b) / rate_a,
        })
    }
}

/// Predicts both designs under `model` and compares them.
pub fn compare_designs(
    model: &LogisticFailureModel,
    a: &ServerDesign,
    b: &ServerDesign,
) -> Result<DesignComparison> {
    DesignComparison::from_rates(
        model.predict_relative_rate(a)?,
        model.predict_relative_rate(b)?,
    )
}

/// Knobs for [`fit_logistic`]. Defaults: tol 1e-8 on the max coefficient
/// step, 200 iterations, no ridge penalty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Convergence threshold on max |Δβ| between iterations.
    pub tol: f64,
    pub max_iter: usize,
    /// Optional ridge penalty λ added to the diagonal of the information
    /// matrix for every factor except the intercept. Zero (off) by default;
    /// useful to pull a nearly-separated fit back to finite coefficients.
    pub ridge: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: 1e-8,
            max_iter: 200,
            ridge: 0.0,
        }
    }
}

/// Log-likelihood of labeled designs under coefficient vector β (all ten
/// factors, [`FACTOR_NAMES`] order).
pub fn log_likelihood(samples: &[(ServerDesign, bool)], beta: &[f64; 10]) -> f64 {
    let mut ll = 0.0;
    for (design, y) in samples {
        let x = feature_row(design);
        let z: f64 = x.iter().zip(beta).map(|(xi, bi)| xi * bi).sum();
        // ln σ(z) for y=1, ln(1−σ(z)) = ln σ(−z) for y=0, computed stably
        // as −ln(1+e^(∓z)).
        let s = if *y { z } else { -z };
        ll -= if s > 0.0 {
            (-s).exp().ln_1p()
        } else {
            -s + s.exp().ln_1p()
        };
    }
    ll
}

/// Analytic gradient of [`log_likelihood`]: ∇ℓ = Σ xᵢ(yᵢ − μᵢ).
pub fn log_likelihood_gradient(samples: &[(ServerDesign, bool)], beta: &[f64; 10]) -> [f64; 10] {
    let mut grad = [0.0; NF];
    for (design, y) in samples {
        let x = feature_row(design);
        let z: f64 = x.iter().zip(beta).map(|(xi, bi)| xi * bi).sum();
        let resid = (*y as u8 as f64) - logistic(z);
        for (g, xi) in grad.iter_mut().zip(x) {
            *g += xi * resid;
        }
    }
    grad
}

/// In-place Cholesky factorization of a symmetric positive-definite matrix;
/// the lower triangle of `a` is replaced by L with A = LLᵀ. Fails with
/// [`Error::Singular`] when a pivot collapses relative to the matrix scale.
#[allow(clippy::needless_range_loop)] // triangular recurrences read best indexed
fn cholesky(a: &mut [[f64; NF]; NF]) -> Result<()> {
    let scale = (0..NF).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    let floor = scale.max(1.0) * 1e-12;
    for i in 0..NF {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= a[i][k] * a[j][k];
            }
            if i == j {
                if sum <= floor {
                    return Err(Error::Singular);
                }
                a[i][i] = sum.sqrt();
            } else {
                a[i][j] = sum / a[j][j];
            }
        }
    }
    Ok(())
}

/// Solves LLᵀ x = b given the Cholesky factor L in the lower triangle.
fn cholesky_solve(l: &[[f64; NF]; NF], b: &[f64; NF]) -> [f64; NF] {
    let mut x = *b;
    for i in 0..NF {
        for k in 0..i {
            x[i] -= l[i][k] * x[k];
        }
        x[i] /= l[i][i];
    }
    for i in (0..NF).rev() {
        for k in i + 1..NF {
            x[i] -= l[k][i] * x[k];
        }
        x[i] /= l[i][i];
    }
    x
}

/// Maximum-likelihood logistic fit of all ten factors on labeled designs.
///
/// Iteratively reweighted least squares from β = 0: each step solves
/// (XᵀWX)β' = XᵀW z with W = diag(μ(1−μ)) and working response
/// z = Xβ + (y−μ)/W, until the largest coefficient step drops below
/// `opts.tol`. Standard errors come from the observed information matrix
/// (XᵀWX)⁻¹ at the optimum; p-values are two-sided Wald tests.
pub fn fit_logistic(
    samples: &[(ServerDesign, bool)],
    opts: &FitOptions,
) -> Result<LogisticFailureModel> {
    let n_pos = samples.iter().filter(|(_, y)| *y).count();
    if n_pos == 0 || n_pos == samples.len() {
        return Err(Error::precondition(
            "fit needs at least one sample of each label",
        ));
    }
    let mut rows = Vec::with_capacity(samples.len());
    for (design, y) in samples {
        design.validate()?;
        let x = feature_row(design);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::precondition("non-finite factor in fit sample"));
        }
        rows.push((x, *y as u8 as f64));
    }

    let mut beta = [0.0f64; NF];
    let mut step_trace = Vec::new();
    for _ in 0..opts.max_iter {
        // Accumulate XᵀWX and XᵀWz in one pass. W z = wη + (y − μ), which
        // avoids dividing by vanishing weights.
        let mut info = [[0.0f64; NF]; NF];
        let mut rhs = [0.0f64; NF];
        let mut separated = true;
        let mut min_abs_eta = f64::INFINITY;
        for (x, y) in &rows {
            let eta: f64 = x.iter().zip(&beta).map(|(xi, bi)| xi * bi).sum();
            let mu = logistic(eta);
            let w = mu * (1.0 - mu);
            let wz = w * eta + (y - mu);
            for i in 0..NF {
                for j in 0..=i {
                    info[i][j] += w * x[i] * x[j];
                }
                rhs[i] += wz * x[i];
            }
            separated &= (*y == 1.0) == (eta > 0.0);
            min_abs_eta = min_abs_eta.min(eta.abs());
        }
        // Complete separation: every label sits on its own side of the
        // hyperplane with nothing near the boundary, so the likelihood
        // improves forever as ‖β‖ grows and no finite MLE exists.
        if separated && min_abs_eta > 15.0 {
            return Err(Error::Separation);
        }
        #[allow(clippy::needless_range_loop)] // mirroring the lower triangle
        for i in 0..NF {
            for j in 0..i {
                info[j][i] = info[i][j];
            }
        }
        if opts.ridge > 0.0 {
            for (i, row) in info.iter_mut().enumerate().skip(1) {
                row[i] += opts.ridge;
            }
        }
        let mut l = info;
        cholesky(&mut l)?;
        let next = cholesky_solve(&l, &rhs);
        let step = beta
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        beta = next;
        step_trace.push(step);
        if step < opts.tol {
            return finish_fit(&info, &beta);
        }
    }
    Err(Error::NonConvergence {
        what: "logistic fit".to_string(),
        trace: step_trace,
    })
}

/// Builds the fitted model: inverts the information matrix for standard
/// errors and attaches Wald statistics.
fn finish_fit(info: &[[f64; NF]; NF], beta: &[f64; NF]) -> Result<LogisticFailureModel> {
    let mut l = *info;
    cholesky(&mut l)?;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut coefficients = Vec::with_capacity(NF);
    for i in 0..NF {
        let mut unit = [0.0; NF];
        unit[i] = 1.0;
        let col = cholesky_solve(&l, &unit);
        let se = col[i].sqrt();
        let p = 2.0 * (1.0 - normal.cdf((beta[i] / se).abs()));
        coefficients.push(Coefficient {
            name: FACTOR_NAMES[i].to_string(),
            beta: beta[i],
            std_error: Some(se),
            p_value: Some(p),
            significant: Some(p < SIGNIFICANCE_LEVEL),
        });
    }
    let model = LogisticFailureModel {
        name: "fitted".to_string(),
        coefficients,
        include_excluded: false,
    };
    model.validate()?;
    Ok(model)
}
