//! SSD reliability analytics.
//!
//! Works from point-in-time [`SsdSnapshot`]s: bit error rates, failure-rate
//! curves against any recorded factor, lifecycle phase labeling of the
//! written-data curve, the correlated-failure probability of two-SSD
//! servers, and the flash-vs-OS write-amplification ratio.
//!
//! An SSD counts as *failed* when it has logged at least one uncorrectable
//! error over its snapshot lifetime. "Bits accessed" is defined as
//! 8 × (bytes written + bytes read) at the flash level, with TB taken as
//! 10^12 bytes; every rate in this module uses that one convention.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{bucket_series, BucketedSeries};
use crate::trace::types::SsdSnapshot;

/// Default minimum fraction of the cohort a bucket must hold to be kept.
pub const DEFAULT_BUCKET_MIN_FRAC: f64 = 0.001;

/// Rate of uncorrectable bit errors: uncorrectable / bits accessed.
pub fn uber(uncorrectable_errors: u64, bits_accessed: u64) -> Result<f64> {
    if bits_accessed == 0 {
        return Err(Error::precondition(
            "uber needs a positive bits_accessed denominator",
        ));
    }
    Ok(uncorrectable_errors as f64 / bits_accessed as f64)
}

/// Rate of all bit errors: (correctable + uncorrectable) / bits accessed.
pub fn ber(correctable: u64, uncorrectable: u64, bits_accessed: u64) -> Result<f64> {
    if bits_accessed == 0 {
        return Err(Error::precondition(
            "ber needs a positive bits_accessed denominator",
        ));
    }
    Ok((correctable + uncorrectable) as f64 / bits_accessed as f64)
}

/// Bits accessed over a snapshot's lifetime:
/// 8 × (flash_written_tb + flash_read_tb) × 10^12.
pub fn bits_accessed(snapshot: &SsdSnapshot) -> u64 {
    ((snapshot.flash_written_tb + snapshot.flash_read_tb) * 8e12).round() as u64
}

/// UBER of one snapshot under the crate's bits-accessed convention.
pub fn snapshot_uber(snapshot: &SsdSnapshot) -> Result<f64> {
    uber(snapshot.uncorrectable_errors, bits_accessed(snapshot))
}

/// Whether a snapshot counts as a failed SSD.
pub fn is_failed(snapshot: &SsdSnapshot) -> bool {
    snapshot.uncorrectable_errors > 0
}

/// A numeric snapshot field a failure-rate curve can be plotted against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SsdFactor {
    /// TB written to flash cells.
    WrittenTb,
    /// TB read from flash cells.
    ReadTb,
    /// Blocks discarded by the controller.
    DiscardedBlocks,
    /// DRAM buffer utilization (%).
    DramBufferPct,
    /// Average board temperature (°C).
    TemperatureC,
    /// Bus power draw (W).
    BusPowerW,
    /// TB written by the OS (sectors × 512 bytes).
    OsWrittenTb,
    /// Erase operations per garbage-collection pass.
    ErasesPerGc,
    /// Pages copied by garbage collection.
    PagesCopied,
}

impl SsdFactor {
    pub const ALL: [SsdFactor; 9] = [
        SsdFactor::WrittenTb,
        SsdFactor::ReadTb,
        SsdFactor::DiscardedBlocks,
        SsdFactor::DramBufferPct,
        SsdFactor::TemperatureC,
        SsdFactor::BusPowerW,
        SsdFactor::OsWrittenTb,
        SsdFactor::ErasesPerGc,
        SsdFactor::PagesCopied,
    ];

    /// Extracts this factor's value from a snapshot.
    pub fn value(self, s: &SsdSnapshot) -> f64 {
        match self {
            SsdFactor::WrittenTb => s.flash_written_tb,
            SsdFactor::ReadTb => s.flash_read_tb,
            SsdFactor::DiscardedBlocks => s.discarded_blocks as f64,
            SsdFactor::DramBufferPct => s.dram_buffer_util_pct,
            SsdFactor::TemperatureC => s.avg_temp_c,
            SsdFactor::BusPowerW => s.bus_power_w,
            SsdFactor::OsWrittenTb => s.os_sectors_written as f64 * 512.0 / 1e12,
            SsdFactor::ErasesPerGc => s.erases_per_gc,
            SsdFactor::PagesCopied => s.pages_copied as f64,
        }
    }

    fn name(self) -> &'static str {
        match self {
            SsdFactor::WrittenTb => "written",
            SsdFactor::ReadTb => "read",
            SsdFactor::DiscardedBlocks => "discarded",
            SsdFactor::DramBufferPct => "dram_buffer",
            SsdFactor::TemperatureC => "temperature",
            SsdFactor::BusPowerW => "bus_power",
            SsdFactor::OsWrittenTb => "os_written",
            SsdFactor::ErasesPerGc => "erases_per_gc",
            SsdFactor::PagesCopied => "pages_copied",
        }
    }
}

impl std::fmt::Display for SsdFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SsdFactor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SsdFactor::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = SsdFactor::ALL.iter().map(|f| f.name()).collect();
                Error::precondition(format!(
                    "unknown factor `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Failure rate bucketed by `factor`, with exact binomial CIs per bucket.
pub fn factor_curve(
    snapshots: &[SsdSnapshot],
    factor: SsdFactor,
    bucket_width: f64,
    min_frac: f64,
) -> Result<BucketedSeries> {
    if snapshots.is_empty() {
        return Err(Error::empty(format!("no snapshots for {factor} curve")));
    }
    let samples: Vec<(f64, bool)> = snapshots
        .iter()
        .map(|s| (factor.value(s), is_failed(s)))
        .collect();
    bucket_series(&samples, bucket_width, min_frac)
}

/// The three boundaries (TB written) splitting an SSD's life into
/// early-detection, early-failure, usable-life, and wearout phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifecyclePhases {
    /// End of the rising early-detection phase.
    pub early_detection_end_tb: f64,
    /// End of the declining early-failure phase.
    pub early_failure_end_tb: f64,
    /// Onset of the sustained wearout rise.
    pub wearout_onset_tb: f64,
}

impl LifecyclePhases {
    pub fn boundaries(&self) -> [f64; 3] {
        [
            self.early_detection_end_tb,
            self.early_failure_end_tb,
            self.wearout_onset_tb,
        ]
    }
}

/// Labels lifecycle phases on a failure-rate-vs-written curve.
///
/// The curve is smoothed with a centered 5-bucket moving average (window
/// truncated at the edges), then scanned for slope sign changes: the first
/// rise-then-fall peak ends early detection, the first non-negative slope
/// after it ends the early-failure decline, and the earliest point from
/// which every remaining slope is positive marks wearout onset. Slopes
/// within 1e-9 of the largest magnitude count as flat.
pub fn label_phases(curve: &BucketedSeries) -> Result<LifecyclePhases> {
    let buckets = &curve.buckets;
    let n = buckets.len();
    if n < 8 {
        return Err(Error::precondition(format!(
            "phase labeling needs at least 8 buckets, got {n}"
        )));
    }
    let smoothed: Vec<f64> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(2);
            let hi = (i + 2).min(n - 1);
            let sum: f64 = buckets[lo..=hi].iter().map(|b| b.rate).sum();
            sum / (hi - lo + 1) as f64
        })
        .collect();
    let slopes: Vec<f64> = smoothed.windows(2).map(|w| w[1] - w[0]).collect();
    let tol = 1e-9 * slopes.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sign = |v: f64| -> i8 {
        if v > tol {
            1
        } else if v < -tol {
            -1
        } else {
            0
        }
    };

    let peak = (1..slopes.len())
        .find(|&i| sign(slopes[i - 1]) > 0 && sign(slopes[i]) < 0)
        .ok_or_else(|| {
            Error::PhasesNotIdentifiable("curve has no rise-then-fall peak".to_string())
        })?;
    let decline_end = (peak + 1..slopes.len())
        .find(|&i| sign(slopes[i]) >= 0)
        .ok_or_else(|| Error::PhasesNotIdentifiable("decline never levels off".to_string()))?;
    let wearout = (decline_end + 1..slopes.len())
        .find(|&i| (i..slopes.len()).all(|j| sign(slopes[j]) > 0))
        .ok_or_else(|| Error::PhasesNotIdentifiable("no sustained rise at the end".to_string()))?;

    Ok(LifecyclePhases {
        early_detection_end_tb: buckets[peak].x,
        early_failure_end_tb: buckets[decline_end].x,
        wearout_onset_tb: buckets[wearout].x,
    })
}

/// Which two-SSD servers had their lower-slot / higher-slot SSD fail.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FleetPairIndex {
    /// Servers whose lower-slot SSD failed.
    pub lower_failed: BTreeSet<String>,
    /// Servers whose higher-slot SSD failed.
    pub higher_failed: BTreeSet<String>,
}

impl FleetPairIndex {
    /// Builds the index from a mixed fleet. Only servers with exactly two
    /// snapshots in distinct slots participate; everything else is outside
    /// the two-SSD population this statistic is defined on.
    pub fn from_snapshots(snapshots: &[SsdSnapshot]) -> Self {
        let mut per_server: BTreeMap<&str, Vec<&SsdSnapshot>> = BTreeMap::new();
        for s in snapshots {
            per_server.entry(&s.server_id).or_default().push(s);
        }
        let mut index = FleetPairIndex::default();
        for (server, mut pair) in per_server {
            if pair.len() != 2 {
                continue;
            }
            pair.sort_by_key(|s| s.slot_index);
            if pair[0].slot_index == pair[1].slot_index {
                continue;
            }
            if is_failed(pair[0]) {
                index.lower_failed.insert(server.to_string());
            }
            if is_failed(pair[1]) {
                index.higher_failed.insert(server.to_string());
            }
        }
        index
    }
}

/// P(both SSDs of a server failed | at least one failed):
/// |lower ∩ higher| / |lower ∪ higher|.
pub fn conditional_both_fail(index: &FleetPairIndex) -> Result<f64> {
    let both = index
        .lower_failed
        .intersection(&index.higher_failed)
        .count();
    let either = index.lower_failed.union(&index.higher_failed).count();
    if either == 0 {
        return Err(Error::empty(
            "no failed SSDs among two-SSD servers".to_string(),
        ));
    }
    Ok(both as f64 / either as f64)
}

/// Flash bytes written ÷ OS bytes written (sectors × 512). Below 1 means
/// the controller coalesced buffered writes; above 1 means amplification.
pub fn write_amplification_ratio(snapshot: &SsdSnapshot) -> Result<f64> {
    if snapshot.os_sectors_written == 0 {
        return Err(Error::precondition(
            "write amplification needs os_sectors_written > 0",
        ));
    }
    Ok(snapshot.flash_written_tb * 1e12 / (snapshot.os_sectors_written as f64 * 512.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Bucket;
    use crate::trace::gen::{generate_traces, substream, GeneratorSpec};
    use crate::trace::types::Platform;
    use rand::Rng;

    fn snapshot(server: &str, slot: u32, written_tb: f64, uncorrectable: u64) -> SsdSnapshot {
        SsdSnapshot {
            ssd_id: format!("{server}-d{slot}"),
            platform: Platform::B,
            slot_index: slot,
            server_id: server.to_string(),
            flash_written_tb: written_tb,
            flash_read_tb: 0.5,
            uncorrectable_errors: uncorrectable,
            discarded_blocks: 0,
            dram_buffer_util_pct: 50.0,
            avg_temp_c: 40.0,
            bus_power_w: 10.0,
            throttled: false,
            os_sectors_written: 1,
            erases_per_gc: 1.0,
            pages_copied: 0,
        }
    }

    #[test]
    fn uber_matches_hand_arithmetic() {
        assert_eq!(uber(52, 100_000_000_000).unwrap(), 5.2e-10);
        assert_eq!(uber(0, 1_000_000).unwrap(), 0.0);
        assert!(uber(5, 0).is_err());
    }

    #[test]
    fn ber_counts_both_error_kinds() {
        assert_eq!(ber(10, 0, 10_000_000_000).unwrap(), 1e-9);
        assert_eq!(ber(0, 0, 123).unwrap(), 0.0);
        assert!(ber(1, 1, 0).is_err());
    }

    #[test]
    fn ber_is_never_below_uber() {
        for (c, u, bits) in [(0u64, 0u64, 10u64), (5, 3, 1000), (0, 7, 64), (1000, 1, 8)] {
            assert!(ber(c, u, bits).unwrap() >= uber(u, bits).unwrap());
        }
    }

    #[test]
    fn rates_are_scale_invariant() {
        let base = uber(13, 1_000_000).unwrap();
        for k in [2u64, 10, 1000] {
            let scaled = uber(13 * k, 1_000_000 * k).unwrap();
            assert!((scaled - base).abs() < 1e-18);
        }
    }

    #[test]
    fn bits_accessed_follows_the_documented_convention() {
        let mut s = snapshot("srv", 0, 1.5, 0);
        s.flash_read_tb = 0.5;
        // (1.5 + 0.5) TB × 10^12 × 8.
        assert_eq!(bits_accessed(&s), 16_000_000_000_000);
        assert_eq!(snapshot_uber(&s).unwrap(), 0.0);
    }

    #[test]
    fn identical_snapshots_collapse_to_one_bucket() {
        let mut cohort = Vec::new();
        for i in 0..100 {
            cohort.push(snapshot(&format!("srv{i}"), 0, 10.0, (i % 2) as u64));
        }
        let curve = factor_curve(&cohort, SsdFactor::WrittenTb, 1.0, 0.0).unwrap();
        assert_eq!(curve.buckets.len(), 1);
        assert_eq!(curve.buckets[0].x, 10.0);
        assert_eq!(curve.buckets[0].rate, 0.5);
    }

    #[test]
    fn linear_temperature_law_is_recovered_within_ci() {
        let mut rng = substream(31, "ssd/temperature");
        let mut cohort = Vec::new();
        // Failure probability rises linearly from 0 at 30°C to 0.5 at 70°C.
        for i in 0..40_000 {
            let temp = rng.random_range(30.0..70.0);
            let p = (temp - 30.0) / 80.0;
            let mut s = snapshot(&format!("srv{i}"), 0, 10.0, 0);
            s.avg_temp_c = temp;
            s.uncorrectable_errors = rng.random_bool(p) as u64;
            cohort.push(s);
        }
        let curve = factor_curve(&cohort, SsdFactor::TemperatureC, 5.0, 0.001).unwrap();
        assert!(curve.buckets.len() >= 8);
        for b in &curve.buckets {
            // Average of the law over the bucket's actual coverage; edge
            // buckets only reach to the cohort's temperature range.
            let lo = (b.x - 2.5).max(30.0);
            let hi = (b.x + 2.5).min(70.0);
            let truth = ((lo + hi) / 2.0 - 30.0) / 80.0;
            assert!(
                b.ci_low <= truth && truth <= b.ci_high,
                "bucket {}: truth {truth} outside [{}, {}]",
                b.x,
                b.ci_low,
                b.ci_high
            );
        }
    }

    #[test]
    fn factor_curve_ignores_snapshot_order() {
        let mut rng = substream(32, "ssd/order");
        let cohort: Vec<SsdSnapshot> = (0..500)
            .map(|i| {
                snapshot(
                    &format!("srv{i}"),
                    0,
                    rng.random_range(0.0..20.0),
                    rng.random_bool(0.1) as u64,
                )
            })
            .collect();
        let forward = factor_curve(&cohort, SsdFactor::WrittenTb, 2.0, 0.0).unwrap();
        let mut reversed = cohort.clone();
        reversed.reverse();
        let backward = factor_curve(&reversed, SsdFactor::WrittenTb, 2.0, 0.0).unwrap();
        assert_eq!(forward, backward);
    }

    #[test]
    fn empty_cohort_is_an_error() {
        assert!(factor_curve(&[], SsdFactor::WrittenTb, 1.0, 0.0).is_err());
    }

    #[test]
    fn factor_names_parse_back() {
        for f in SsdFactor::ALL {
            assert_eq!(f.to_string().parse::<SsdFactor>().unwrap(), f);
        }
        assert!("writen".parse::<SsdFactor>().is_err());
    }

    /// Builds a curve with the four-phase template directly from raw rates:
    /// rising by `a` per bucket to bucket 3, falling by `a` to bucket 6,
    /// flat to bucket 17, rising by `c` after. After 5-bucket smoothing the
    /// slope sign changes land at buckets 3, 8, and 15.
    fn four_phase_curve(n: usize, base: f64, a: f64, c: f64) -> BucketedSeries {
        let mut rate = base;
        let mut buckets = Vec::new();
        for i in 0..n {
            buckets.push(Bucket {
                x: i as f64,
                n: 1000,
                failures: (rate * 1000.0).round() as usize,
                rate,
                ci_low: 0.0,
                ci_high: 1.0,
            });
            rate += match i {
                0..=2 => a,
                3..=5 => -a,
                6..=16 => 0.0,
                _ => c,
            };
        }
        BucketedSeries {
            bucket_width: 1.0,
            buckets,
        }
    }

    #[test]
    fn template_curve_yields_the_expected_boundaries() {
        let curve = four_phase_curve(20, 0.01, 0.004, 0.006);
        let phases = label_phases(&curve).unwrap();
        assert_eq!(phases.boundaries(), [3.0, 8.0, 15.0]);
        let b = phases.boundaries();
        assert!(b[0] < b[1] && b[1] < b[2]);
    }

    #[test]
    fn strictly_increasing_curve_has_no_phases() {
        let buckets: Vec<Bucket> = (0..12)
            .map(|i| Bucket {
                x: i as f64,
                n: 100,
                failures: i as usize,
                rate: 0.01 * i as f64,
                ci_low: 0.0,
                ci_high: 1.0,
            })
            .collect();
        let curve = BucketedSeries {
            bucket_width: 1.0,
            buckets,
        };
        match label_phases(&curve) {
            Err(Error::PhasesNotIdentifiable(_)) => {}
            other => panic!("expected unidentifiable phases, got {other:?}"),
        }
    }

    #[test]
    fn too_few_buckets_is_a_precondition_error() {
        let curve = BucketedSeries {
            bucket_width: 1.0,
            buckets: (0..7)
                .map(|i| Bucket {
                    x: i as f64,
                    n: 10,
                    failures: 0,
                    rate: 0.0,
                    ci_low: 0.0,
                    ci_high: 1.0,
                })
                .collect(),
        };
        let err = label_phases(&curve).unwrap_err();
        assert!(err.to_string().contains("8 buckets"), "{err}");
    }

    #[test]
    fn decline_to_the_end_is_not_identifiable() {
        // Rise to bucket 3, then fall forever: no level-off, no wearout.
        let mut rate = 0.02;
        let buckets: Vec<Bucket> = (0..15)
            .map(|i| {
                let b = Bucket {
                    x: i as f64,
                    n: 100,
                    failures: 0,
                    rate,
                    ci_low: 0.0,
                    ci_high: 1.0,
                };
                rate += if i < 3 { 0.004 } else { -0.004 };
                b
            })
            .collect();
        let curve = BucketedSeries {
            bucket_width: 1.0,
            buckets,
        };
        match label_phases(&curve) {
            Err(Error::PhasesNotIdentifiable(msg)) => {
                assert!(msg.contains("levels off"), "{msg}");
            }
            other => panic!("expected unidentifiable phases, got {other:?}"),
        }
    }

    #[test]
    fn flat_tail_without_wearout_is_not_identifiable() {
        let curve = four_phase_curve(20, 0.01, 0.004, 0.0);
        match label_phases(&curve) {
            Err(Error::PhasesNotIdentifiable(msg)) => {
                assert!(msg.contains("sustained rise"), "{msg}");
            }
            other => panic!("expected unidentifiable phases, got {other:?}"),
        }
    }

    #[test]
    fn sampled_lifecycle_cohort_puts_early_detection_near_3_tb() {
        // Cohort whose true failure law follows the template: rising to a
        // peak at 3 TB written, declining back by 6 TB, flat, rising past
        // 17 TB.
        let mut rng = substream(33, "ssd/lifecycle");
        let law = |tb: f64| -> f64 {
            if tb < 3.0 {
                0.010 + 0.008 * tb
            } else if tb < 6.0 {
                0.034 - 0.008 * (tb - 3.0)
            } else if tb < 17.0 {
                0.010
            } else {
                0.010 + 0.006 * (tb - 17.0)
            }
        };
        let mut cohort = Vec::new();
        for i in 0..60_000 {
            let tb = rng.random_range(0.0..20.0);
            let mut s = snapshot(&format!("srv{i}"), 0, tb, 0);
            s.uncorrectable_errors = rng.random_bool(law(tb)) as u64;
            cohort.push(s);
        }
        let curve = factor_curve(&cohort, SsdFactor::WrittenTb, 1.0, 0.001).unwrap();
        let phases = label_phases(&curve).unwrap();
        let [b1, b2, b3] = phases.boundaries();
        assert!((b1 - 3.0).abs() <= 1.0, "early detection ends at {b1}");
        assert!(b1 < b2 && b2 < b3);
    }

    #[test]
    fn pair_conditional_set_arithmetic() {
        let index = FleetPairIndex {
            lower_failed: ["a", "b", "c"].iter().map(|s| s.to_string()).collect(),
            higher_failed: ["b", "c", "d"].iter().map(|s| s.to_string()).collect(),
        };
        assert_eq!(conditional_both_fail(&index).unwrap(), 0.5);

        let swapped = FleetPairIndex {
            lower_failed: index.higher_failed.clone(),
            higher_failed: index.lower_failed.clone(),
        };
        assert_eq!(conditional_both_fail(&swapped).unwrap(), 0.5);
    }

    #[test]
    fn disjoint_and_identical_sets_hit_the_bounds() {
        let disjoint = FleetPairIndex {
            lower_failed: ["a"].iter().map(|s| s.to_string()).collect(),
            higher_failed: ["b"].iter().map(|s| s.to_string()).collect(),
        };
        assert_eq!(conditional_both_fail(&disjoint).unwrap(), 0.0);
        let identical = FleetPairIndex {
            lower_failed: ["a", "b"].iter().map(|s| s.to_string()).collect(),
            higher_failed: ["a", "b"].iter().map(|s| s.to_string()).collect(),
        };
        assert_eq!(conditional_both_fail(&identical).unwrap(), 1.0);
    }

    #[test]
    fn empty_union_is_an_error() {
        assert!(conditional_both_fail(&FleetPairIndex::default()).is_err());
    }

    #[test]
    fn index_keeps_only_two_ssd_servers() {
        let snapshots = vec![
            snapshot("one", 0, 1.0, 5), // single-SSD server: excluded
            snapshot("two", 0, 1.0, 3), // two-SSD: lower failed
            snapshot("two", 1, 1.0, 0),
            snapshot("three", 1, 1.0, 0), // two-SSD, slots unordered in input
            snapshot("three", 0, 1.0, 0),
        ];
        let index = FleetPairIndex::from_snapshots(&snapshots);
        assert_eq!(index.lower_failed.len(), 1);
        assert!(index.lower_failed.contains("two"));
        assert!(index.higher_failed.is_empty());
    }

    #[test]
    fn generated_platform_b_fleet_recovers_the_tuned_conditional() {
        let mut spec = GeneratorSpec {
            seed: 41,
            fleet_size: 12_000,
            ..GeneratorSpec::default()
        };
        spec.dram = None;
        spec.net = None;
        let ssd = spec.ssd.as_mut().unwrap();
        ssd.platform_mix = [(Platform::B, 1.0)].into_iter().collect();
        ssd.fail_frac = 0.2;
        ssd.pair_conditional = 0.422;
        let bundle = generate_traces(&spec).unwrap();
        let index = FleetPairIndex::from_snapshots(&bundle.snapshots);
        let conditional = conditional_both_fail(&index).unwrap();
        assert!(
            (conditional - 0.422).abs() < 0.03,
            "conditional {conditional}"
        );
    }

    #[test]
    fn write_amplification_examples() {
        let mut s = snapshot("srv", 0, 1.0, 0);
        s.os_sectors_written = (2e12 / 512.0) as u64; // 2 TB via the OS
        assert!((write_amplification_ratio(&s).unwrap() - 0.5).abs() < 1e-12);
        s.os_sectors_written = (1e12 / 512.0) as u64;
        assert!((write_amplification_ratio(&s).unwrap() - 1.0).abs() < 1e-12);
        s.os_sectors_written = 0;
        assert!(write_amplification_ratio(&s).is_err());
    }
}
