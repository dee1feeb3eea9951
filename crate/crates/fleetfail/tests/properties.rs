//! Property suites: randomized invariants over the classifier, the page
//! mapping, bucketed confidence bounds, the fit gradient, serialization,
//! and the determinism contract of every stochastic entry point.

mod common;

use std::io::Cursor;

use fleetfail::classify::{classify_fleet, classify_month, ComponentClass};
use fleetfail::logistic::{log_likelihood, log_likelihood_gradient};
use fleetfail::sim::{
    run_offline_sim, run_randomizer_sim, OfflinePolicy, RandomizationPlan, RetryPolicy, SimMemory,
    DEFAULT_HOST_CAPACITY_BYTES, DEFAULT_PAGE_MIGRATE_LATENCY_S,
};
use fleetfail::stats::bucket_series;
use fleetfail::trace::parse::{parse_jsonl, write_csv, write_jsonl};
use fleetfail::trace::{
    generate_traces, parse_events, AccessType, Density, GeneratorSpec, MemErrorEvent, RecordBatch,
    Schema, ServerDesign, Severity, TransferWidth,
};
use proptest::prelude::*;

/// One event in a cramped address space on a 30-second clock, so that short
/// traces still produce address collisions and cell chains.
fn arb_event() -> impl Strategy<Value = MemErrorEvent> {
    (
        0i64..120,
        0u8..2,
        0u8..2,
        0u8..3,
        0u32..4,
        0u32..3,
        0u32..2,
        0u8..3,
        proptest::bool::weighted(0.05),
    )
        .prop_map(
            |(slot, socket, channel, bank, row, column, byte_offset, access, uncorrectable)| {
                MemErrorEvent {
                    timestamp: common::MONTH_START + slot * 30,
                    server_id: "srv-0".into(),
                    socket,
                    channel,
                    bank,
                    row,
                    column,
                    byte_offset,
                    access_type: match access {
                        0 => AccessType::Read,
                        1 => AccessType::Write,
                        _ => AccessType::Scrub,
                    },
                    severity: if uncorrectable {
                        Severity::Uncorrectable
                    } else {
                        Severity::Correctable
                    },
                }
            },
        )
}

fn arb_design() -> impl Strategy<Value = ServerDesign> {
    (
        0usize..3,
        0usize..5,
        0usize..4,
        any::<bool>(),
        0.0f64..100.0,
        0.0f64..100.0,
        0.0f64..4.0,
        0usize..4,
    )
        .prop_map(|(d, c, f, wide, cpu, mem, age, n)| {
            const DENSITIES: [Density; 3] = [Density::OneGb, Density::TwoGb, Density::FourGb];
            const CHIPS: [u32; 5] = [8, 16, 32, 48, 64];
            const FILL: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
            const CPUS: [u32; 4] = [2, 4, 8, 16];
            ServerDesign {
                capacity_gb: CHIPS[c] as f64 * DENSITIES[d].gigabits() / 8.0 * FILL[f],
                density: DENSITIES[d],
                chips: CHIPS[c],
                transfer_width: if wide {
                    TransferWidth::X8
                } else {
                    TransferWidth::X4
                },
                cpu_util_pct: cpu,
                mem_util_pct: mem,
                age_years: age,
                cpus: CPUS[n],
                workload: None,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// The classifier and the brute-force reference agree label-for-label
    /// under every threshold/window combination.
    #[test]
    fn classifier_agrees_with_brute_force(
        events in prop::collection::vec(arb_event(), 1..80),
        threshold in prop_oneof![Just(1u64), Just(3), Just(10)],
        window in prop_oneof![Just(0i64), Just(60), Just(86400)],
    ) {
        let got = classify_month(&events, threshold, window).unwrap();
        let want = common::oracle_classify(&events, threshold, window);
        prop_assert_eq!(got, want);
    }

    /// Every event gets exactly one label, and the fleet-level grouping
    /// neither drops nor duplicates an event.
    #[test]
    fn classification_partitions_the_trace(
        events in prop::collection::vec(arb_event(), 1..80),
        threshold in prop_oneof![Just(1u64), Just(3), Just(10)],
    ) {
        let classes = classify_month(&events, threshold, 60).unwrap();
        prop_assert_eq!(classes.len(), events.len());
        let by_class: usize = ComponentClass::ALL
            .iter()
            .map(|&c| classes.iter().filter(|&&x| x == c).count())
            .sum();
        prop_assert_eq!(by_class, events.len());

        let (groups, per_event) = classify_fleet(&events, threshold, 60).unwrap();
        prop_assert_eq!(per_event.len(), events.len());
        let mut seen = vec![false; events.len()];
        for group in &groups {
            prop_assert_eq!(group.event_indices.len(), group.classes.len());
            for &i in &group.event_indices {
                prop_assert!(!seen[i], "event {} grouped twice", i);
                seen[i] = true;
            }
        }
        prop_assert!(seen.into_iter().all(|s| s), "event dropped from grouping");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The page↔frame mapping stays a bijection under arbitrary interleaved
    /// map / randomize / offline traffic.
    #[test]
    fn page_mapping_stays_bijective(
        frames in 8usize..40,
        seed in any::<u64>(),
        ops in prop::collection::vec((0u8..4, any::<u16>()), 1..200),
    ) {
        let mut rng = common::rng(seed);
        let mut mem = SimMemory::new(frames).unwrap();
        let mut next_page = 0u64;
        let mut mapped: Vec<u64> = Vec::new();
        for (op, pick) in ops {
            match op {
                0 | 1 => {
                    if mem.free_frames() > 0 {
                        mem.map_page(next_page).unwrap();
                        mapped.push(next_page);
                        next_page += 1;
                    }
                }
                2 => {
                    if !mapped.is_empty() && mem.free_frames() > 0 {
                        let page = mapped[pick as usize % mapped.len()];
                        mem.randomize_page(page, &mut rng).unwrap();
                    }
                }
                _ => {
                    if !mapped.is_empty() {
                        let page = mapped.swap_remove(pick as usize % mapped.len());
                        mem.take_offline(page).unwrap();
                    }
                }
            }
            mem.check_invariants().unwrap();
            prop_assert_eq!(mem.mapped_pages(), mapped.len());
        }
    }

    /// Bucket confidence intervals bracket their own rate and agree with a
    /// bisection of the binomial CDF; bucketing conserves the sample count.
    #[test]
    fn bucket_cis_bracket_their_rates(
        samples in prop::collection::vec((0.0f64..10.0, any::<bool>()), 30..200),
        width in prop_oneof![Just(0.5f64), Just(1.0), Just(2.5)],
    ) {
        let series = bucket_series(&samples, width, 0.0).unwrap();
        let total: usize = series.buckets.iter().map(|b| b.n).sum();
        prop_assert_eq!(total, samples.len());
        for bucket in &series.buckets {
            prop_assert!(bucket.ci_low <= bucket.rate && bucket.rate <= bucket.ci_high);
            let (lo, hi) =
                common::clopper_pearson_oracle(bucket.failures as u64, bucket.n as u64, 0.95);
            prop_assert!((bucket.ci_low - lo).abs() < 1e-6);
            prop_assert!((bucket.ci_high - hi).abs() < 1e-6);
        }
    }

    /// The analytic log-likelihood gradient agrees with central differences.
    /// β stays small so the difference quotient itself is trustworthy at
    /// this tolerance — factors reach magnitude ~100.
    #[test]
    fn gradient_matches_finite_differences(
        cohort in prop::collection::vec((arb_design(), any::<bool>()), 5..40),
        beta in proptest::array::uniform10(-0.05f64..0.05),
    ) {
        prop_assume!(cohort.iter().any(|(_, y)| *y) && cohort.iter().any(|(_, y)| !*y));
        let grad = log_likelihood_gradient(&cohort, &beta);
        for i in 0..10 {
            let h = 1e-6 * beta[i].abs().max(1.0);
            let mut up = beta;
            up[i] += h;
            let mut dn = beta;
            dn[i] -= h;
            let fd = (log_likelihood(&cohort, &up) - log_likelihood(&cohort, &dn)) / (2.0 * h);
            let rel = (grad[i] - fd).abs() / grad[i].abs().max(1.0);
            prop_assert!(rel <= 1e-6, "factor {}: analytic {} vs fd {}", i, grad[i], fd);
        }
    }

    /// JSONL round-trips through the crate's own parser; the CSV export is
    /// lossless under a generic CSV deserializer.
    #[test]
    fn serialization_round_trips(events in prop::collection::vec(arb_event(), 1..50)) {
        let mut jsonl = Vec::new();
        write_jsonl(&events, &mut jsonl).unwrap();
        match parse_events(Cursor::new(jsonl.clone()), Schema::MemError).unwrap() {
            RecordBatch::MemErrors(parsed) => prop_assert_eq!(&parsed, &events),
            other => prop_assert!(false, "wrong batch kind: {:?}", other),
        }
        let parsed: Vec<MemErrorEvent> = parse_jsonl(Cursor::new(jsonl), |_| Ok(())).unwrap();
        prop_assert_eq!(&parsed, &events);

        let mut csv = Vec::new();
        write_csv(&events, &mut csv).unwrap();
        let parsed: Vec<MemErrorEvent> = csv::Reader::from_reader(Cursor::new(csv))
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .unwrap();
        prop_assert_eq!(&parsed, &events);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Same spec, same bundle — bit for bit.
    #[test]
    fn generator_is_deterministic(
        seed in any::<u64>(),
        fleet_size in 1usize..40,
        keep_dram in any::<bool>(),
        keep_ssd in any::<bool>(),
        keep_net in any::<bool>(),
    ) {
        let mut spec = GeneratorSpec { seed, fleet_size, ..GeneratorSpec::default() };
        if !keep_dram {
            spec.dram = None;
        }
        if !keep_ssd {
            spec.ssd = None;
        }
        if !keep_net {
            spec.net = None;
        }
        prop_assert_eq!(generate_traces(&spec).unwrap(), generate_traces(&spec).unwrap());
    }

    /// Same trace, policy, and seed — same offline-simulation report.
    #[test]
    fn offline_sim_is_deterministic(
        mut events in prop::collection::vec(arb_event(), 1..60),
        errors_before_offline in 1u64..3,
        fail_prob in 0.0f64..1.0,
        retry_delay in prop_oneof![Just(None), (0i64..600).prop_map(Some)],
        seed in any::<u64>(),
    ) {
        events.sort_by_key(|e| e.timestamp);
        let (_, classes) = classify_fleet(&events, 3, 60).unwrap();
        let policy = OfflinePolicy {
            errors_before_offline,
            cap_frac: 0.05,
            initial_fail_prob: fail_prob,
            retry: match retry_delay {
                None => RetryPolicy::None,
                Some(seconds) => RetryPolicy::FixedDelay { seconds },
            },
        };
        let run = || {
            run_offline_sim(&events, &classes, &policy, DEFAULT_HOST_CAPACITY_BYTES, seed, None)
                .unwrap()
        };
        prop_assert_eq!(run(), run());
    }

    /// Same weights, plan, and seed — same randomizer report.
    #[test]
    fn randomizer_sim_is_deterministic(
        weights in prop::collection::vec(0.0f64..1.0, 2..40),
        utilization in 0.1f64..0.9,
        capacity_bytes in (1u64 << 22)..(1u64 << 30),
        steps in 1u64..1500,
        seed in any::<u64>(),
    ) {
        prop_assume!(weights.iter().sum::<f64>() > 0.01);
        let plan = RandomizationPlan {
            capacity_bytes,
            utilization,
            period_days: 1.0,
            per_page_latency_s: DEFAULT_PAGE_MIGRATE_LATENCY_S,
        };
        let run = || run_randomizer_sim(&weights, &plan, steps, seed).unwrap();
        prop_assert_eq!(run(), run());
    }
}
