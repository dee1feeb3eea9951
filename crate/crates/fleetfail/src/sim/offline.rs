//! Page-offlining simulation over a classified memory-error trace.
//!
//! The simulator walks a time-sorted error trace in which every event
//! carries its fault class. Cell, row, and column faults are bound to the
//! page holding the affected row: once that page is offline, their errors
//! stop surfacing. Socket and channel faults (and bank-level or spurious
//! ones) live outside any single page, so offlining never suppresses them
//! — that asymmetry is the point the simulation measures.
//!
//! An offline attempt can fail (the OS cannot always evict a page); failed
//! pages are retried per [`RetryPolicy`]. Offlining stops on a host once
//! the offlined bytes exceed the configured share of its capacity, at
//! which point a repair ticket is emitted instead.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classify::ComponentClass;
use crate::error::{Error, Result};
use crate::sim::PAGE_SIZE_BYTES;
use crate::stats::csv_io;
use crate::trace::gen::substream;
use crate::trace::types::MemErrorEvent;

/// Host memory size used when none is given: 4 GiB.
pub const DEFAULT_HOST_CAPACITY_BYTES: u64 = 4 << 30;

/// Window for the before/after error-rate comparison, in days.
pub const REDUCTION_WINDOW_DAYS: i64 = 30;

const SECONDS_PER_DAY: i64 = 86_400;

/// What happens after an offline attempt fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetryPolicy {
    /// Give the page up for good.
    None,
    /// Try again at the next error arriving at least this many seconds
    /// after the failed attempt.
    FixedDelay { seconds: i64 },
}

/// When and how aggressively pages go offline. Offlining is immediate at
/// the error threshold and permanent once it succeeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OfflinePolicy {
    /// Errors observed from a page before an offline is attempted.
    pub errors_before_offline: u64,
    /// Share of host capacity that may go offline before a repair ticket
    /// is filed instead.
    pub cap_frac: f64,
    /// Probability that any one offline attempt fails.
    pub initial_fail_prob: f64,
    pub retry: RetryPolicy,
}

impl Default for OfflinePolicy {
    fn default() -> Self {
        OfflinePolicy {
            errors_before_offline: 1,
            cap_frac: 0.05,
            initial_fail_prob: 0.06,
            retry: RetryPolicy::None,
        }
    }
}

impl OfflinePolicy {
    pub fn validate(&self) -> Result<()> {
        if self.errors_before_offline < 1 {
            return Err(Error::precondition(
                "errors_before_offline must be at least 1",
            ));
        }
        if !(0.0..=1.0).contains(&self.cap_frac) {
            return Err(Error::precondition(format!(
                "cap_frac must be in [0, 1], got {}",
                self.cap_frac
            )));
        }
        if !(0.0..=1.0).contains(&self.initial_fail_prob) {
            return Err(Error::precondition(format!(
                "initial_fail_prob must be in [0, 1], got {}",
                self.initial_fail_prob
            )));
        }
        if let RetryPolicy::FixedDelay { seconds } = self.retry {
            if seconds < 0 {
                return Err(Error::precondition(format!(
                    "retry delay must be non-negative, got {seconds}"
                )));
            }
        }
        Ok(())
    }
}

/// The page a DRAM error lands on: one row of one bank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PageId {
    pub socket: u8,
    pub channel: u8,
    pub bank: u8,
    pub row: u32,
}

impl PageId {
    pub fn of(event: &MemErrorEvent) -> Self {
        PageId {
            socket: event.socket,
            channel: event.channel,
            bank: event.bank,
            row: event.row,
        }
    }
}

impl std::fmt::Display for PageId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "s{}c{}b{}r{}",
            self.socket, self.channel, self.bank, self.row
        )
    }
}

/// One line of the persistent offline store.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct OfflineRecord {
    host: String,
    socket: u8,
    channel: u8,
    bank: u8,
    row: u32,
}

/// The set of permanently offlined pages, keyed by host. Survives a
/// simulated reboot by round-tripping through JSONL.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OfflineStore {
    pages: BTreeSet<(String, PageId)>,
}

impl OfflineStore {
    pub fn len(&self) -> usize {
        self.pages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pages.is_empty()
    }

    pub fn contains(&self, host: &str, page: PageId) -> bool {
        self.pages.contains(&(host.to_string(), page))
    }

    pub fn insert(&mut self, host: &str, page: PageId) -> bool {
        self.pages.insert((host.to_string(), page))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, PageId)> {
        self.pages.iter().map(|(h, p)| (h.as_str(), *p))
    }

    /// One JSON object per offlined page, sorted by (host, page).
    pub fn write_jsonl<W: Write>(&self, mut writer: W) -> Result<()> {
        for (host, page) in &self.pages {
            let record = OfflineRecord {
                host: host.clone(),
                socket: page.socket,
                channel: page.channel,
                bank: page.bank,
                row: page.row,
            };
            serde_json::to_writer(&mut writer, &record)
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            writer.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Self> {
        let mut store = OfflineStore::default();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: OfflineRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
                line: lineno + 1,
                message: e.to_string(),
            })?;
            store.pages.insert((
                record.host,
                PageId {
                    socket: record.socket,
                    channel: record.channel,
                    bank: record.bank,
                    row: record.row,
                },
            ));
        }
        Ok(store)
    }
}

/// One day of the simulation timeline. `errors` is that day's observed
/// count; `pages_offline` and `tickets` are cumulative totals at day end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayStats {
    pub day: u64,
    pub errors: u64,
    pub pages_offline: u64,
    pub tickets: u64,
}

/// Everything a simulation run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineSimReport {
    pub timeline: Vec<DayStats>,
    pub total_errors: u64,
    pub observed_errors: u64,
    pub suppressed_errors: u64,
    /// Pages newly offlined by this run (the store may also hold pages
    /// carried over from a previous run).
    pub pages_offlined: u64,
    pub failed_attempts: u64,
    /// Hosts that hit the capacity cap, in the order they hit it.
    pub tickets: Vec<String>,
    /// 1 − observed/total over the trailing 30-day window, as a fraction.
    pub error_rate_reduction: f64,
    pub store: OfflineStore,
}

/// Writes the timeline as `day,errors,pages_offline,tickets` CSV.
pub fn write_timeline_csv<W: Write>(timeline: &[DayStats], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["day", "errors", "pages_offline", "tickets"])
        .map_err(csv_io)?;
    for d in timeline {
        w.write_record([
            d.day.to_string(),
            d.errors.to_string(),
            d.pages_offline.to_string(),
            d.tickets.to_string(),
        ])
        .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Whether offlining the page can silence this fault class.
fn page_bound(class: ComponentClass) -> bool {
    matches!(
        class,
        ComponentClass::Cell | ComponentClass::Row | ComponentClass::Column
    )
}

/// Replays a classified error trace under an offlining policy.
///
/// `classes` must parallel `events` (one class per event, as produced by
/// the fleet classifier) and the trace must be sorted by timestamp.
/// `resume_from` carries the offline store across a simulated reboot;
/// pages in it stay suppressed and count against the host's capacity cap.
///
/// Each offline attempt draws from its own seeded substream keyed by
/// (host, page, attempt number), so an attempt's outcome never depends on
/// unrelated traffic in the trace.
pub fn run_offline_sim(
    events: &[MemErrorEvent],
    classes: &[ComponentClass],
    policy: &OfflinePolicy,
    host_capacity_bytes: u64,
    seed: u64,
    resume_from: Option<&OfflineStore>,
) -> Result<OfflineSimReport> {
    policy.validate()?;
    if classes.len() != events.len() {
        return Err(Error::precondition(format!(
            "{} events but {} classes",
            events.len(),
            classes.len()
        )));
    }
    if host_capacity_bytes == 0 {
        return Err(Error::precondition("host capacity must be positive"));
    }
    for w in events.windows(2) {
        if w[1].timestamp < w[0].timestamp {
            return Err(Error::precondition(format!(
                "trace must be sorted by time: {} follows {}",
                w[1].timestamp, w[0].timestamp
            )));
        }
    }

    let mut store = resume_from.cloned().unwrap_or_default();
    let cap_bytes = policy.cap_frac * host_capacity_bytes as f64;
    let mut offline_bytes: BTreeMap<String, u64> = BTreeMap::new();
    for (host, _) in store.iter() {
        *offline_bytes.entry(host.to_string()).or_insert(0) += PAGE_SIZE_BYTES;
    }

    let mut error_counts: BTreeMap<(String, PageId), u64> = BTreeMap::new();
    let mut attempts: BTreeMap<(String, PageId), u64> = BTreeMap::new();
    let mut given_up: BTreeSet<(String, PageId)> = BTreeSet::new();
    let mut retry_at: BTreeMap<(String, PageId), i64> = BTreeMap::new();
    let mut capped: BTreeSet<String> = BTreeSet::new();

    let mut observed = 0u64;
    let mut suppressed = 0u64;
    let mut pages_offlined = 0u64;
    let mut failed_attempts = 0u64;
    let mut tickets: Vec<String> = Vec::new();

    let t0 = events.first().map(|e| e.timestamp).unwrap_or(0);
    let day_of = |ts: i64| ((ts - t0) / SECONDS_PER_DAY) as u64;
    let mut errors_per_day: BTreeMap<u64, u64> = BTreeMap::new();
    let mut offlined_per_day: BTreeMap<u64, u64> = BTreeMap::new();
    let mut tickets_per_day: BTreeMap<u64, u64> = BTreeMap::new();

    // Trailing comparison window.
    let window_start = events
        .last()
        .map(|e| e.timestamp - REDUCTION_WINDOW_DAYS * SECONDS_PER_DAY)
        .unwrap_or(0);
    let mut window_observed = 0u64;
    let mut window_total = 0u64;

    for (event, &class) in events.iter().zip(classes) {
        let host = &event.server_id;
        let in_window = event.timestamp > window_start;
        if in_window {
            window_total += 1;
        }

        if page_bound(class) {
            let page = PageId::of(event);
            if store.contains(host, page) {
                suppressed += 1;
                continue;
            }
            observed += 1;
            if in_window {
                window_observed += 1;
            }
            *errors_per_day.entry(day_of(event.timestamp)).or_insert(0) += 1;

            let key = (host.clone(), page);
            let count = error_counts.entry(key.clone()).or_insert(0);
            *count += 1;
            let due = *count >= policy.errors_before_offline
                && !capped.contains(host)
                && !given_up.contains(&key)
                && retry_at.get(&key).is_none_or(|&t| event.timestamp >= t);
            if !due {
                continue;
            }
            retry_at.remove(&key);
            let attempt = attempts.entry(key.clone()).or_insert(0);
            *attempt += 1;
            let mut rng = substream(seed, &format!("offline/{host}/{page}/{attempt}"));
            if rng.random_bool(policy.initial_fail_prob) {
                failed_attempts += 1;
                match policy.retry {
                    RetryPolicy::None => {
                        given_up.insert(key);
                    }
                    RetryPolicy::FixedDelay { seconds } => {
                        retry_at.insert(key, event.timestamp + seconds);
                    }
                }
                continue;
            }
            store.insert(host, page);
            pages_offlined += 1;
            *offlined_per_day.entry(day_of(event.timestamp)).or_insert(0) += 1;
            let bytes = offline_bytes.entry(host.clone()).or_insert(0);
            *bytes += PAGE_SIZE_BYTES;
            if *bytes as f64 > cap_bytes {
                tickets.push(host.clone());
                capped.insert(host.clone());
                *tickets_per_day.entry(day_of(event.timestamp)).or_insert(0) += 1;
            }
        } else {
            // Socket/channel/bank/spurious faults are not page-bound:
            // offlining can never silence them.
            observed += 1;
            if in_window {
                window_observed += 1;
            }
            *errors_per_day.entry(day_of(event.timestamp)).or_insert(0) += 1;
        }
    }

    let mut timeline = Vec::new();
    if let Some(last) = events.last() {
        let resumed = resume_from.map(|s| s.len() as u64).unwrap_or(0);
        let mut cum_offline = resumed;
        let mut cum_tickets = 0u64;
        for day in 0..=day_of(last.timestamp) {
            cum_offline += offlined_per_day.get(&day).copied().unwrap_or(0);
            cum_tickets += tickets_per_day.get(&day).copied().unwrap_or(0);
            timeline.push(DayStats {
                day,
                errors: errors_per_day.get(&day).copied().unwrap_or(0),
                pages_offline: cum_offline,
                tickets: cum_tickets,
            });
        }
    }

    let error_rate_reduction = if window_total > 0 {
        1.0 - window_observed as f64 / window_total as f64
    } else {
        0.0
    };

    Ok(OfflineSimReport {
        timeline,
        total_errors: events.len() as u64,
        observed_errors: observed,
        suppressed_errors: suppressed,
        pages_offlined,
        failed_attempts,
        tickets,
        error_rate_reduction,
        store,
    })
}
