//! Physical page randomization: wear-leveling simulation and its overhead.
//!
//! A [`RandomizationPlan`] says how fast pages must migrate so the whole
//! working set has moved once per period; [`overhead_estimate`] turns that
//! rate into a worst-case time-overhead fraction. [`run_randomizer_sim`]
//! then drives a [`SimMemory`] with a weighted write workload — once with
//! migrations at the plan's rate and once without — and compares how
//! evenly wear spreads across frames via the Gini coefficient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::memory::SimMemory;
use crate::sim::PAGE_SIZE_BYTES;
use crate::trace::gen::substream;
use rand::Rng;

/// Time to migrate one page (copy plus remap), in seconds.
pub const DEFAULT_PAGE_MIGRATE_LATENCY_S: f64 = 374.9e-6;

/// How aggressively to shuffle pages: every mapped page should move once
/// per `period_days`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomizationPlan {
    pub capacity_bytes: u64,
    /// Fraction of capacity holding mapped pages, in [0, 1].
    pub utilization: f64,
    /// Days for one full shuffle of the working set; must be positive.
    pub period_days: f64,
    /// Seconds to migrate one page.
    pub per_page_latency_s: f64,
}

impl RandomizationPlan {
    pub fn new(capacity_bytes: u64, utilization: f64, period_days: f64) -> Self {
        RandomizationPlan {
            capacity_bytes,
            utilization,
            period_days,
            per_page_latency_s: DEFAULT_PAGE_MIGRATE_LATENCY_S,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.capacity_bytes == 0 {
            return Err(Error::precondition("capacity must be positive"));
        }
        if !(0.0..=1.0).contains(&self.utilization) {
            return Err(Error::precondition(format!(
                "utilization must be in [0, 1], got {}",
                self.utilization
            )));
        }
        if !(self.period_days > 0.0) || !self.period_days.is_finite() {
            return Err(Error::precondition(format!(
                "period must be positive, got {} days",
                self.period_days
            )));
        }
        if self.per_page_latency_s < 0.0 || !self.per_page_latency_s.is_finite() {
            return Err(Error::precondition(format!(
                "per-page latency must be non-negative, got {}",
                self.per_page_latency_s
            )));
        }
        Ok(())
    }
}

/// Migration rate and the fraction of time it costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverheadReport {
    pub pages_per_second: f64,
    pub overhead_fraction: f64,
}

/// Evaluates the plan: mapped pages (capacity × U / page size) divided by
/// the period in seconds, then times the per-page latency for the
/// worst-case overhead fraction.
pub fn overhead_estimate(plan: &RandomizationPlan) -> Result<OverheadReport> {
    plan.validate()?;
    let pages = plan.capacity_bytes as f64 * plan.utilization / PAGE_SIZE_BYTES as f64;
    let pages_per_second = pages / (plan.period_days * 86_400.0);
    Ok(OverheadReport {
        pages_per_second,
        overhead_fraction: pages_per_second * plan.per_page_latency_s,
    })
}

/// Gini coefficient of a wear distribution: 0 when every frame wore
/// equally, approaching 1 when one frame took everything. All-zero wear
/// counts as perfectly equal.
pub fn gini(values: &[u64]) -> f64 {
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    let total: u64 = values.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, &v)| (i + 1) as f64 * v as f64)
        .sum();
    2.0 * weighted / (n as f64 * total as f64) - (n + 1) as f64 / n as f64
}

/// Wear outcomes of the same workload with and without randomization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizerReport {
    pub frames: usize,
    pub steps: u64,
    pub pages_migrated: u64,
    pub gini_randomized: f64,
    pub gini_baseline: f64,
    pub wear_randomized: Vec<u64>,
    pub wear_baseline: Vec<u64>,
    pub overhead: OverheadReport,
}

/// Simulates `steps` seconds of a write workload, one write per second,
/// with pages chosen in proportion to `write_weights`. Frames number
/// ⌈pages / utilization⌉ so the free pool matches the plan's utilization.
/// Migrations fire at the plan's rate, cycling round-robin through the
/// logical pages and landing each on a uniformly drawn free frame. The
/// baseline run sees the exact same write sequence with no migrations.
pub fn run_randomizer_sim(
    write_weights: &[f64],
    plan: &RandomizationPlan,
    steps: u64,
    seed: u64,
) -> Result<RandomizerReport> {
    if steps == 0 {
        return Err(Error::precondition("simulation needs at least one step"));
    }
    if write_weights.is_empty() {
        return Err(Error::empty("no pages in the write profile"));
    }
    for &w in write_weights {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::precondition(format!(
                "write weights must be non-negative and finite, got {w}"
            )));
        }
    }
    let total_weight: f64 = write_weights.iter().sum();
    if total_weight <= 0.0 {
        return Err(Error::precondition("write weights must not all be zero"));
    }
    let overhead = overhead_estimate(plan)?;

    let pages = write_weights.len();
    let frames = if plan.utilization == 0.0 {
        pages
    } else {
        (pages as f64 / plan.utilization).ceil() as usize
    };
    if overhead.pages_per_second > 0.0 && frames == pages {
        return Err(Error::precondition(
            "utilization leaves no free frame to randomize into",
        ));
    }

    let mut randomized = SimMemory::new(frames)?;
    let mut baseline = SimMemory::new(frames)?;
    for page in 0..pages as u64 {
        randomized.map_page(page)?;
        baseline.map_page(page)?;
    }

    let cumulative: Vec<f64> = write_weights
        .iter()
        .scan(0.0, |acc, &w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let mut write_rng = substream(seed, "randomize/writes");
    let mut frame_rng = substream(seed, "randomize/frames");

    let mut migration_budget = 0.0;
    let mut cursor = 0u64;
    let mut migrations = 0u64;
    for _ in 0..steps {
        let u = write_rng.random_range(0.0..total_weight);
        let page = cumulative.partition_point(|&c| c <= u) as u64;
        randomized.write(page)?;
        baseline.write(page)?;

        migration_budget += overhead.pages_per_second;
        while migration_budget >= 1.0 {
            randomized.randomize_page(cursor, &mut frame_rng)?;
            cursor = (cursor + 1) % pages as u64;
            migrations += 1;
            migration_budget -= 1.0;
        }
    }
    randomized.check_invariants()?;

    Ok(RandomizerReport {
        frames,
        steps,
        pages_migrated: migrations,
        gini_randomized: gini(randomized.wear()),
        gini_baseline: gini(baseline.wear()),
        wear_randomized: randomized.wear().to_vec(),
        wear_baseline: baseline.wear().to_vec(),
        overhead,
    })
}
