//! Distribution fitting and descriptive statistics for failure data.
//!
//! This module is deliberately narrow: it implements exactly the estimators
//! the rest of the crate exercises, nothing more. Bucketed failure-rate
//! series with exact binomial confidence intervals, maximum-likelihood fits
//! for Pareto / power-law / Weibull tails, least-squares exponential
//! percentile curves, and skew summaries (mean/median ratio, top-share
//! concentration).
//!
//! Every fit here is deterministic — there is no randomized initialization —
//! so repeated runs on the same data give identical results.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{Error, Result};

/// Confidence level used for all bucketed failure-rate series.
pub const BUCKET_CI_LEVEL: f64 = 0.95;

/// One bucket of a failure-rate series: samples whose x rounded to the same
/// multiple of the bucket width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    /// Bucket center (a multiple of the bucket width).
    pub x: f64,
    /// Number of samples in the bucket.
    pub n: usize,
    /// Number of failed samples in the bucket.
    pub failures: usize,
    /// failures / n.
    pub rate: f64,
    /// Lower bound of the 95% Clopper–Pearson interval for `rate`.
    pub ci_low: f64,
    /// Upper bound of the 95% Clopper–Pearson interval for `rate`.
    pub ci_high: f64,
}

/// A failure-rate-versus-x curve built by [`bucket_series`], sorted by x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketedSeries {
    pub bucket_width: f64,
    pub buckets: Vec<Bucket>,
}

impl BucketedSeries {
    /// Writes the curve as CSV with columns `bucket_x,n,rate,ci_low,ci_high`.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["bucket_x", "n", "rate", "ci_low", "ci_high"])
            .map_err(csv_io)?;
        for b in &self.buckets {
            w.write_record(&[
                b.x.to_string(),
                b.n.to_string(),
                b.rate.to_string(),
                b.ci_low.to_string(),
                b.ci_high.to_string(),
            ])
            .map_err(csv_io)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Groups `(x, failed)` samples into buckets of width `bucket_width` (x is
/// rounded to the nearest multiple), drops buckets holding less than
/// `min_frac` of the population, and attaches a 95% confidence interval to
/// each bucket's failure rate.
///
/// `min_frac` defaults to 0.1% in callers; sparsely populated buckets say
/// more about sampling noise than about the underlying failure law.
pub fn bucket_series(
    samples: &[(f64, bool)],
    bucket_width: f64,
    min_frac: f64,
) -> Result<BucketedSeries> {
    if samples.is_empty() {
        return Err(Error::empty("bucket_series: no samples"));
    }
    if !(bucket_width > 0.0) || !bucket_width.is_finite() {
        return Err(Error::precondition(format!(
            "bucket_series: bucket_width must be positive and finite, got {bucket_width}"
        )));
    }
    if !(0.0..1.0).contains(&min_frac) {
        return Err(Error::precondition(format!(
            "bucket_series: min_frac must be in [0, 1), got {min_frac}"
        )));
    }
    let mut counts: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    for &(x, failed) in samples {
        if !x.is_finite() {
            return Err(Error::precondition(format!(
                "bucket_series: non-finite sample value {x}"
            )));
        }
        let idx = (x / bucket_width).round() as i64;
        let entry = counts.entry(idx).or_insert((0, 0));
        entry.0 += 1;
        if failed {
            entry.1 += 1;
        }
    }
    let total = samples.len() as f64;
    let mut buckets = Vec::with_capacity(counts.len());
    for (idx, (n, failures)) in counts {
        if (n as f64) / total < min_frac {
            continue;
        }
        let (ci_low, ci_high) = binomial_ci(failures as u64, n as u64, BUCKET_CI_LEVEL)?;
        buckets.push(Bucket {
            x: idx as f64 * bucket_width,
            n,
            failures,
            rate: failures as f64 / n as f64,
            ci_low,
            ci_high,
        });
    }
    Ok(BucketedSeries {
        bucket_width,
        buckets,
    })
}

/// Exact (Clopper–Pearson) two-sided confidence interval for a binomial
/// proportion with `k` successes in `n` trials.
///
/// The returned interval always contains k/n. The bounds come from the Beta
/// quantile form: the lower bound is the Beta(k, n−k+1) quantile at α/2 (zero
/// when k = 0) and the upper is the Beta(k+1, n−k) quantile at 1−α/2 (one
/// when k = n).
pub fn binomial_ci(k: u64, n: u64, level: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::precondition("binomial_ci: n must be at least 1"));
    }
    if k > n {
        return Err(Error::precondition(format!(
            "binomial_ci: k ({k}) exceeds n ({n})"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::precondition(format!(
            "binomial_ci: level must be in (0, 1), got {level}"
        )));
    }
    let alpha = 1.0 - level;
    let (kf, nf) = (k as f64, n as f64);
    let low = if k == 0 {
        0.0
    } else {
        Beta::new(kf, nf - kf + 1.0)
            .expect("valid Beta parameters")
            .inverse_cdf(alpha / 2.0)
    };
    let high = if k == n {
        1.0
    } else {
        Beta::new(kf + 1.0, nf - kf)
            .expect("valid Beta parameters")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    Ok((low.min(kf / nf), high.max(kf / nf)))
}

/// Maximum-likelihood Pareto fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedPareto {
    /// Shape parameter α (> 0). Smaller α means a heavier tail.
    pub alpha: f64,
    /// Scale (left edge of the support), > 0.
    pub x_min: f64,
    pub log_likelihood: f64,
}

impl FittedPareto {
    /// Hazard rate h(x) = α / x implied by the fit. Strictly decreasing in x,
    /// which is the defining property of the Pareto family: the longer a
    /// device has survived, the lower its instantaneous failure rate.
    pub fn hazard(&self, x: f64) -> f64 {
        self.alpha / x
    }
}

/// Fits a Pareto distribution by maximum likelihood:
/// α̂ = n / Σ ln(xᵢ/x_min), with `x_min` defaulting to the sample minimum.
///
/// Needs at least two samples with nonzero log-spread; all samples must be
/// positive and at least `x_min`.
pub fn fit_pareto(samples: &[f64], x_min: Option<f64>) -> Result<FittedPareto> {
    if samples.len() < 2 {
        return Err(Error::precondition(format!(
            "fit_pareto: need at least 2 samples, got {}",
            samples.len()
        )));
    }
    for &x in samples {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::precondition(format!(
                "fit_pareto: samples must be positive and finite, got {x}"
            )));
        }
    }
    let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let xm = x_min.unwrap_or(min);
    if !(xm > 0.0) || !xm.is_finite() {
        return Err(Error::precondition(format!(
            "fit_pareto: x_min must be positive and finite, got {xm}"
        )));
    }
    if min < xm {
        return Err(Error::precondition(format!(
            "fit_pareto: sample {min} lies below x_min {xm}"
        )));
    }
    let n = samples.len() as f64;
    let log_sum: f64 = samples.iter().map(|&x| (x / xm).ln()).sum();
    if log_sum <= 0.0 {
        return Err(Error::degenerate(
            "zero log-spread (all samples equal x_min)",
        ));
    }
    let alpha = n / log_sum;
    let sum_ln_x: f64 = samples.iter().map(|&x| x.ln()).sum();
    let log_likelihood = n * alpha.ln() + alpha * n * xm.ln() - (alpha + 1.0) * sum_ln_x;
    Ok(FittedPareto {
        alpha,
        x_min: xm,
        log_likelihood,
    })
}

/// Continuous maximum-likelihood power-law exponent for a sample of counts,
/// reported with the conventional negative sign: a density ∝ x^(−γ) yields
/// −γ̂ = −(1 + n / Σ ln(xᵢ/x_min)), with x_min the sample minimum.
///
/// For the same data this is exactly −(α̂ + 1) where α̂ is [`fit_pareto`]'s
/// shape: the two estimators describe the same tail in survival-function vs
/// density form.
pub fn fit_power_law_exponent(counts: &[f64]) -> Result<f64> {
    if counts.len() < 10 {
        return Err(Error::precondition(format!(
            "fit_power_law_exponent: need at least 10 samples, got {}",
            counts.len()
        )));
    }
    let pareto = fit_pareto(counts, None)?;
    Ok(-(pareto.alpha + 1.0))
}

/// Maximum-likelihood Weibull fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedWeibull {
    /// Shape k (> 0). k < 1 means decreasing hazard (infant mortality).
    pub shape: f64,
    /// Scale λ (> 0).
    pub scale: f64,
}

/// Solver tolerance for the Weibull profile-likelihood equation.
pub const WEIBULL_TOL: f64 = 1e-9;
/// Iteration cap for the Weibull solver.
pub const WEIBULL_MAX_ITER: usize = 100;

/// Fits a Weibull distribution by maximum likelihood.
///
/// The shape solves the profile-likelihood equation
/// Σxᵢᵏ·ln xᵢ / Σxᵢᵏ − 1/k − mean(ln xᵢ) = 0 via damped Newton iteration
/// (the equation's left side is strictly increasing in k, so the root is
/// unique); the scale then follows in closed form. Sums are evaluated with
/// the largest log factored out, so very large samples do not overflow.
pub fn fit_weibull(samples: &[f64]) -> Result<FittedWeibull> {
    if samples.len() < 10 {
        return Err(Error::precondition(format!(
            "fit_weibull: need at least 10 samples, got {}",
            samples.len()
        )));
    }
    for &x in samples {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::precondition(format!(
                "fit_weibull: samples must be positive and finite, got {x}"
            )));
        }
    }
    let logs: Vec<f64> = samples.iter().map(|&x| x.ln()).collect();
    let n = logs.len() as f64;
    let mean_log = logs.iter().sum::<f64>() / n;
    let max_log = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_log = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    if max_log == min_log {
        return Err(Error::degenerate("constant samples"));
    }

    // g(k) and g'(k) of the profile equation, computed with logs shifted by
    // max_log so exp() stays in range for any k the solver visits.
    let profile = |k: f64| -> (f64, f64) {
        let mut s0 = 0.0;
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for &l in &logs {
            let w = (k * (l - max_log)).exp();
            s0 += w;
            s1 += w * l;
            s2 += w * l * l;
        }
        let g = s1 / s0 - 1.0 / k - mean_log;
        let gp = (s2 * s0 - s1 * s1) / (s0 * s0) + 1.0 / (k * k);
        (g, gp)
    };

    let mut k = 1.0;
    let mut trace = vec![k];
    let mut converged = false;
    for _ in 0..WEIBULL_MAX_ITER {
        let (g, gp) = profile(k);
        if g.abs() <= WEIBULL_TOL {
            converged = true;
            break;
        }
        let mut step = g / gp;
        // Damping: never let the shape go non-positive.
        while k - step <= 0.0 {
            step *= 0.5;
        }
        let next = k - step;
        trace.push(next);
        let done = (next - k).abs() <= WEIBULL_TOL;
        k = next;
        if done {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "fit_weibull".into(),
            trace,
        });
    }

    let s0: f64 = logs.iter().map(|&l| (k * (l - max_log)).exp()).sum();
    let scale = (max_log + ((s0 / n).ln()) / k).exp();
    Ok(FittedWeibull { shape: k, scale })
}

/// An exponential percentile curve y(p) = a·e^(b·p) with its log-space R².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialCurve {
    /// Scale a (> 0): the curve value at p = 0.
    pub a: f64,
    /// Rate b: growth per unit of percentile.
    pub b: f64,
    /// Coefficient of determination of the underlying log-linear regression.
    pub r2: f64,
}

impl ExponentialCurve {
    pub fn value(&self, p: f64) -> f64 {
        self.a * (self.b * p).exp()
    }
}

/// Fits y = a·e^(b·p) to `(p, y)` points with p ∈ [0, 1] and y > 0 by linear
/// least squares on (p, ln y).
///
/// R² is reported for the log-linear regression (the fit's own space); a
/// constant-y input is a perfect flat fit and reports b = 0, R² = 1.
pub fn fit_exponential_percentile(points: &[(f64, f64)]) -> Result<ExponentialCurve> {
    if points.len() < 3 {
        return Err(Error::precondition(format!(
            "fit_exponential_percentile: need at least 3 points, got {}",
            points.len()
        )));
    }
    for &(p, y) in points {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::precondition(format!(
                "fit_exponential_percentile: percentile {p} outside [0, 1]"
            )));
        }
        if !(y > 0.0) || !y.is_finite() {
            return Err(Error::precondition(format!(
                "fit_exponential_percentile: y must be positive and finite, got {y}"
            )));
        }
    }
    let n = points.len() as f64;
    let mean_p = points.iter().map(|&(p, _)| p).sum::<f64>() / n;
    let logs: Vec<f64> = points.iter().map(|&(_, y)| y.ln()).collect();
    if logs.iter().all(|&l| l == logs[0]) {
        // Constant y is a perfect flat fit; computing it through the
        // regression would leave rounding dust in b.
        return Ok(ExponentialCurve {
            a: points[0].1,
            b: 0.0,
            r2: 1.0,
        });
    }
    let mean_l = logs.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&(p, _), &l) in points.iter().zip(&logs) {
        sxx += (p - mean_p) * (p - mean_p);
        sxy += (p - mean_p) * (l - mean_l);
    }
    if sxx == 0.0 {
        return Err(Error::degenerate(
            "all points share one percentile position",
        ));
    }
    let b = sxy / sxx;
    let ln_a = mean_l - b * mean_p;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (&(p, _), &l) in points.iter().zip(&logs) {
        let fitted = ln_a + b * p;
        ss_res += (l - fitted) * (l - fitted);
        ss_tot += (l - mean_l) * (l - mean_l);
    }
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(ExponentialCurve {
        a: ln_a.exp(),
        b,
        r2,
    })
}

/// Mean/median skew and concentration summary of a count distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkewSummary {
    pub mean: f64,
    /// Nearest-rank median.
    pub median: f64,
    /// mean / median. Infinite (or NaN for an all-zero sample) when the
    /// median is zero — heavy-tailed count data makes that a real case, so
    /// it is reported rather than rejected.
    pub ratio: f64,
    #[serde(skip)]
    sorted_desc: Vec<f64>,
    #[serde(skip)]
    total: f64,
}

impl SkewSummary {
    /// Fraction of the total count held by the top `f` fraction of entries
    /// (at least one entry whenever f > 0). `top_share(0.01)` answers "how
    /// much of the damage do the worst 1% of servers account for?".
    pub fn top_share(&self, f: f64) -> f64 {
        if !(0.0..=1.0).contains(&f) || self.total <= 0.0 {
            return 0.0;
        }
        let n = self.sorted_desc.len();
        let k = ((f * n as f64).ceil() as usize).min(n);
        let top: f64 = self.sorted_desc[..k].iter().sum();
        top / self.total
    }
}

/// Summarizes the skew of per-entity counts: mean, nearest-rank median,
/// their ratio, and a top-share accessor.
pub fn skew_summary(counts: &[f64]) -> Result<SkewSummary> {
    if counts.is_empty() {
        return Err(Error::empty("skew_summary: no counts"));
    }
    for &c in counts {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::precondition(format!(
                "skew_summary: counts must be finite and non-negative, got {c}"
            )));
        }
    }
    let n = counts.len() as f64;
    let total: f64 = counts.iter().sum();
    let mean = total / n;
    let mut sorted = counts.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite counts"));
    let median = nearest_rank(&sorted, 0.5);
    let ratio = mean / median;
    sorted.reverse();
    Ok(SkewSummary {
        mean,
        median,
        ratio,
        sorted_desc: sorted,
        total,
    })
}

/// Nearest-rank percentile: the smallest element with at least a `p` fraction
/// of the sample at or below it. `sorted` must be ascending and non-empty;
/// p = 0 returns the minimum, p = 1 the maximum.
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&p));
    let n = sorted.len();
    let rank = ((p * n as f64).ceil() as usize).max(1).min(n);
    sorted[rank - 1]
}
