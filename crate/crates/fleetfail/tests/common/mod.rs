//! Helpers shared by the integration suites: seeded RNG construction,
//! a brute-force reference classifier, random trace/design samplers, and
//! a bisection oracle for binomial confidence bounds.
//!
//! The reference implementations here are deliberately naive — repeated
//! full scans, direct CDF summation — so that agreement with the library
//! checks the rules themselves rather than one implementation against a
//! refactoring of itself.

#![allow(dead_code)]

use fleetfail::classify::ComponentClass;
use fleetfail::trace::{AccessType, Density, MemErrorEvent, ServerDesign, Severity, TransferWidth};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Fixed-seed RNG for test inputs.
pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// 2014-01-01T00:00:00Z — a convenient month origin for single-month traces.
pub const MONTH_START: i64 = 16071 * 86400;

fn sorted_distinct<T: Ord + Copy>(mut values: Vec<T>) -> Vec<T> {
    values.sort();
    values.dedup();
    values
}

/// Reference classifier: the per-month rules applied by brute force.
///
/// Each rule scans the still-unlabeled events from scratch, enumerates the
/// candidate component addresses it can see, and labels every event behind
/// an address that meets the rule's condition. Quadratic and allocation-
/// happy on purpose; correctness over speed.
pub fn oracle_classify(
    events: &[MemErrorEvent],
    threshold_k: u64,
    cell_window_s: i64,
) -> Vec<ComponentClass> {
    let n = events.len();
    let mut label: Vec<Option<ComponentClass>> = vec![None; n];
    let live = |label: &[Option<ComponentClass>], i: usize| label[i].is_none();

    // Socket: more errors than the threshold on one socket, spread over
    // more than one channel.
    for s in sorted_distinct(events.iter().map(|e| e.socket).collect()) {
        let idxs: Vec<usize> = (0..n)
            .filter(|&i| live(&label, i) && events[i].socket == s)
            .collect();
        let channels = sorted_distinct(idxs.iter().map(|&i| events[i].channel).collect());
        if idxs.len() as u64 > threshold_k && channels.len() > 1 {
            for i in idxs {
                label[i] = Some(ComponentClass::Socket);
            }
        }
    }

    // Channel: more errors than the threshold on one channel, spread over
    // more than one bank.
    for key in sorted_distinct(events.iter().map(|e| (e.socket, e.channel)).collect()) {
        let idxs: Vec<usize> = (0..n)
            .filter(|&i| live(&label, i) && (events[i].socket, events[i].channel) == key)
            .collect();
        let banks = sorted_distinct(idxs.iter().map(|&i| events[i].bank).collect());
        if idxs.len() as u64 > threshold_k && banks.len() > 1 {
            for i in idxs {
                label[i] = Some(ComponentClass::Channel);
            }
        }
    }

    // Bank: more errors than the threshold in one bank, spread over more
    // than one row.
    for key in sorted_distinct(
        events
            .iter()
            .map(|e| (e.socket, e.channel, e.bank))
            .collect(),
    ) {
        let idxs: Vec<usize> = (0..n)
            .filter(|&i| {
                live(&label, i) && (events[i].socket, events[i].channel, events[i].bank) == key
            })
            .collect();
        let rows = sorted_distinct(idxs.iter().map(|&i| events[i].row).collect());
        if idxs.len() as u64 > threshold_k && rows.len() > 1 {
            for i in idxs {
                label[i] = Some(ComponentClass::Bank);
            }
        }
    }

    // Row: remaining errors in one row touching more than one column.
    for key in sorted_distinct(
        events
            .iter()
            .map(|e| (e.socket, e.channel, e.bank, e.row))
            .collect(),
    ) {
        let idxs: Vec<usize> = (0..n)
            .filter(|&i| {
                let e = &events[i];
                live(&label, i) && (e.socket, e.channel, e.bank, e.row) == key
            })
            .collect();
        let columns = sorted_distinct(idxs.iter().map(|&i| events[i].column).collect());
        if columns.len() > 1 {
            for i in idxs {
                label[i] = Some(ComponentClass::Row);
            }
        }
    }

    // Column: more than one remaining error in one column, touching more
    // than one row.
    for key in sorted_distinct(
        events
            .iter()
            .map(|e| (e.socket, e.channel, e.bank, e.column))
            .collect(),
    ) {
        let idxs: Vec<usize> = (0..n)
            .filter(|&i| {
                let e = &events[i];
                live(&label, i) && (e.socket, e.channel, e.bank, e.column) == key
            })
            .collect();
        let rows = sorted_distinct(idxs.iter().map(|&i| events[i].row).collect());
        if idxs.len() > 1 && rows.len() > 1 {
            for i in idxs {
                label[i] = Some(ComponentClass::Column);
            }
        }
    }

    // Cell: repeats at one physical byte, chained while consecutive
    // occurrences stay within the window; a chain of two or more counts.
    for key in sorted_distinct(
        events
            .iter()
            .map(|e| (e.socket, e.channel, e.bank, e.row, e.column, e.byte_offset))
            .collect(),
    ) {
        let mut idxs: Vec<usize> = (0..n)
            .filter(|&i| {
                let e = &events[i];
                live(&label, i)
                    && (e.socket, e.channel, e.bank, e.row, e.column, e.byte_offset) == key
            })
            .collect();
        idxs.sort_by_key(|&i| (events[i].timestamp, i));
        let mut chain: Vec<usize> = Vec::new();
        for pos in 0..=idxs.len() {
            let breaks = match (chain.last(), idxs.get(pos)) {
                (Some(&prev), Some(&next)) => {
                    events[next].timestamp - events[prev].timestamp > cell_window_s
                }
                (_, None) => true,
                (None, Some(_)) => false,
            };
            if breaks {
                if chain.len() > 1 {
                    for &i in &chain {
                        label[i] = Some(ComponentClass::Cell);
                    }
                }
                chain.clear();
            }
            if let Some(&next) = idxs.get(pos) {
                chain.push(next);
            }
        }
    }

    label
        .into_iter()
        .map(|l| l.unwrap_or(ComponentClass::Spurious))
        .collect()
}

/// One random event in a deliberately cramped address space, so that
/// socket/channel/bank rules actually trigger on short traces.
pub fn random_event(rng: &mut ChaCha12Rng, server_id: &str) -> MemErrorEvent {
    MemErrorEvent {
        timestamp: MONTH_START + rng.random_range(0..28 * 86400),
        server_id: server_id.to_string(),
        socket: rng.random_range(0..2),
        channel: rng.random_range(0..2),
        bank: rng.random_range(0..3),
        row: rng.random_range(0..20),
        column: rng.random_range(0..10),
        byte_offset: rng.random_range(0..4),
        access_type: match rng.random_range(0..3) {
            0 => AccessType::Read,
            1 => AccessType::Write,
            _ => AccessType::Scrub,
        },
        severity: if rng.random_bool(0.05) {
            Severity::Uncorrectable
        } else {
            Severity::Correctable
        },
    }
}

/// A single-server, single-month trace of up to `max_events` events.
/// Roughly half the traces get a duplicate-heavy tail so that cell chains
/// and repeat-address rules see real collisions.
pub fn random_trace(rng: &mut ChaCha12Rng, max_events: usize) -> Vec<MemErrorEvent> {
    let n = rng.random_range(1..=max_events);
    let mut events: Vec<MemErrorEvent> = (0..n).map(|_| random_event(rng, "srv-0")).collect();
    if rng.random_bool(0.5) {
        // Echo random earlier events at a nearby time to force repeats at
        // identical addresses.
        for _ in 0..rng.random_range(1..=n) {
            let mut copy = events[rng.random_range(0..events.len())].clone();
            copy.timestamp += rng.random_range(-120..=120);
            copy.timestamp = copy
                .timestamp
                .clamp(MONTH_START, MONTH_START + 28 * 86400 - 1);
            events.push(copy);
        }
    }
    events
}

/// Random valid design with independent spread on every factor, for
/// fit round-trips.
pub fn random_design(rng: &mut ChaCha12Rng) -> ServerDesign {
    const DENSITIES: [Density; 3] = [Density::OneGb, Density::TwoGb, Density::FourGb];
    const CHIPS: [u32; 5] = [8, 16, 32, 48, 64];
    const CPUS: [u32; 4] = [2, 4, 8, 16];
    const FILL: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
    let density = DENSITIES[rng.random_range(0..DENSITIES.len())];
    let chips = CHIPS[rng.random_range(0..CHIPS.len())];
    let fill = FILL[rng.random_range(0..FILL.len())];
    ServerDesign {
        capacity_gb: chips as f64 * density.gigabits() / 8.0 * fill,
        density,
        chips,
        transfer_width: if rng.random_bool(0.5) {
            TransferWidth::X4
        } else {
            TransferWidth::X8
        },
        cpu_util_pct: rng.random_range(0.0..100.0),
        mem_util_pct: rng.random_range(0.0..100.0),
        age_years: rng.random_range(0.0..4.0),
        cpus: CPUS[rng.random_range(0..CPUS.len())],
        workload: None,
    }
}

/// P(X ≤ k) for X ~ Binomial(n, p), summed directly in log space.
pub fn binom_cdf(k: u64, n: u64, p: f64) -> f64 {
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return if k >= n { 1.0 } else { 0.0 };
    }
    let mut total = 0.0;
    let mut log_choose = 0.0f64;
    for i in 0..=k.min(n) {
        if i > 0 {
            log_choose += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        total += (log_choose + i as f64 * p.ln() + (n - i) as f64 * (1.0 - p).ln()).exp();
    }
    total.min(1.0)
}

/// Clopper–Pearson bounds found by bisection on the binomial CDF itself:
/// the lower bound solves P(X ≥ k | p) = α/2, the upper solves
/// P(X ≤ k | p) = α/2, with the conventional 0 and 1 at the data edges.
pub fn clopper_pearson_oracle(k: u64, n: u64, level: f64) -> (f64, f64) {
    let alpha2 = (1.0 - level) / 2.0;
    let bisect = |f: &dyn Fn(f64) -> f64| {
        // f must be increasing in p; find its root in (0, 1).
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let low = if k == 0 {
        0.0
    } else {
        // P(X ≥ k | p) grows with p.
        bisect(&|p| (1.0 - binom_cdf(k - 1, n, p)) - alpha2)
    };
    let high = if k == n {
        1.0
    } else {
        // P(X ≤ k | p) falls with p, so flip the sign to make it increasing.
        bisect(&|p| alpha2 - binom_cdf(k, n, p))
    };
    (low, high)
}
