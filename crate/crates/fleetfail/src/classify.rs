//! Hierarchical attribution of DRAM errors to the hardware component that
//! failed.
//!
//! Errors from one server-month are swept through seven rules in a fixed
//! order — socket, channel, bank, row, column, cell, spurious — with
//! exclusion: errors claimed by a rule are invisible to every later rule.
//! The large-scale rules (socket/channel/bank) require an error count above
//! a threshold *and* spread across more than one child component; the
//! small-scale rules (row/column/cell) look for repetition patterns; what
//! nothing claims is spurious.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::types::{utc_year_month, MemErrorEvent};

/// Error-count threshold for the socket/channel/bank rules ("more than a
/// thousand errors"). Configurable because 1K could also be read as 1024.
pub const DEFAULT_THRESHOLD: u64 = 1000;

/// Two errors at the same byte belong to one cell failure when they occur
/// within this many seconds of each other.
pub const DEFAULT_CELL_WINDOW_S: i64 = 60;

/// Full physical byte address: (socket, channel, bank, row, column,
/// byte offset), the granularity of the cell rule.
type ByteAddress = (u8, u8, u8, u32, u32, u32);

/// The component a group of errors is attributed to. Variant order is the
/// evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentClass {
    Socket,
    Channel,
    Bank,
    Row,
    Column,
    Cell,
    Spurious,
}

impl ComponentClass {
    pub const ALL: [ComponentClass; 7] = [
        ComponentClass::Socket,
        ComponentClass::Channel,
        ComponentClass::Bank,
        ComponentClass::Row,
        ComponentClass::Column,
        ComponentClass::Cell,
        ComponentClass::Spurious,
    ];
}

impl fmt::Display for ComponentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ComponentClass::Socket => "socket",
            ComponentClass::Channel => "channel",
            ComponentClass::Bank => "bank",
            ComponentClass::Row => "row",
            ComponentClass::Column => "column",
            ComponentClass::Cell => "cell",
            ComponentClass::Spurious => "spurious",
        };
        f.write_str(name)
    }
}

/// Classifies every error from one server and one UTC calendar month.
/// Returns one class per event, in input order.
///
/// Rules, applied with exclusion (each removes its errors from later rules):
/// 1. socket — more than `threshold_k` errors on one socket spanning more
///    than one channel;
/// 2. channel — more than `threshold_k` remaining errors on one channel
///    spanning more than one bank;
/// 3. bank — more than `threshold_k` remaining errors in one bank spanning
///    more than one row;
/// 4. row — remaining errors in more than one column of one row;
/// 5. column — more than one remaining error in one column, from more than
///    one row (repeats confined to a single row and byte are a cell's
///    signature, not a column's);
/// 6. cell — more than one remaining error at the identical physical byte,
///    chained while consecutive errors are within `cell_window_s` seconds;
/// 7. spurious — everything left.
pub fn classify_month(
    events: &[MemErrorEvent],
    threshold_k: u64,
    cell_window_s: i64,
) -> Result<Vec<ComponentClass>> {
    if threshold_k < 1 {
        return Err(Error::precondition(
            "classify_month: threshold_k must be at least 1",
        ));
    }
    if cell_window_s < 0 {
        return Err(Error::precondition(
            "classify_month: cell_window_s must be non-negative",
        ));
    }
    if events.is_empty() {
        return Ok(Vec::new());
    }
    let server = &events[0].server_id;
    let month = utc_year_month(events[0].timestamp);
    for e in events {
        if &e.server_id != server {
            return Err(Error::precondition(format!(
                "classify_month: mixed server_ids (`{server}` and `{}`)",
                e.server_id
            )));
        }
        if utc_year_month(e.timestamp) != month {
            return Err(Error::precondition(format!(
                "classify_month: events span more than one UTC month ({month:?} and {:?})",
                utc_year_month(e.timestamp)
            )));
        }
    }

    let mut assigned: Vec<Option<ComponentClass>> = vec![None; events.len()];
    let unassigned = |assigned: &[Option<ComponentClass>]| -> Vec<usize> {
        (0..events.len())
            .filter(|&i| assigned[i].is_none())
            .collect()
    };

    // Rule 1: socket.
    let mut by_socket: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
    for i in unassigned(&assigned) {
        by_socket.entry(events[i].socket).or_default().push(i);
    }
    for idxs in by_socket.values() {
        let channels: BTreeSet<u8> = idxs.iter().map(|&i| events[i].channel).collect();
        if idxs.len() as u64 > threshold_k && channels.len() > 1 {
            for &i in idxs {
                assigned[i] = Some(ComponentClass::Socket);
            }
        }
    }

    // Rule 2: channel.
    let mut by_channel: BTreeMap<(u8, u8), Vec<usize>> = BTreeMap::new();
    for i in unassigned(&assigned) {
        let e = &events[i];
        by_channel.entry((e.socket, e.channel)).or_default().push(i);
    }
    for idxs in by_channel.values() {
        let banks: BTreeSet<u8> = idxs.iter().map(|&i| events[i].bank).collect();
        if idxs.len() as u64 > threshold_k && banks.len() > 1 {
            for &i in idxs {
                assigned[i] = Some(ComponentClass::Channel);
            }
        }
    }

    // Rule 3: bank.
    let mut by_bank: BTreeMap<(u8, u8, u8), Vec<usize>> = BTreeMap::new();
    for i in unassigned(&assigned) {
        let e = &events[i];
        by_bank
            .entry((e.socket, e.channel, e.bank))
            .or_default()
            .push(i);
    }
    for idxs in by_bank.values() {
        let rows: BTreeSet<u32> = idxs.iter().map(|&i| events[i].row).collect();
        if idxs.len() as u64 > threshold_k && rows.len() > 1 {
            for &i in idxs {
                assigned[i] = Some(ComponentClass::Bank);
            }
        }
    }

    // Rule 4: row.
    let mut by_row: BTreeMap<(u8, u8, u8, u32), Vec<usize>> = BTreeMap::new();
    for i in unassigned(&assigned) {
        let e = &events[i];
        by_row
            .entry((e.socket, e.channel, e.bank, e.row))
            .or_default()
            .push(i);
    }
    for idxs in by_row.values() {
        let columns: BTreeSet<u32> = idxs.iter().map(|&i| events[i].column).collect();
        if columns.len() > 1 {
            for &i in idxs {
                assigned[i] = Some(ComponentClass::Row);
            }
        }
    }

    // Rule 5: column.
    let mut by_column: BTreeMap<(u8, u8, u8, u32), Vec<usize>> = BTreeMap::new();
    for i in unassigned(&assigned) {
        let e = &events[i];
        by_column
            .entry((e.socket, e.channel, e.bank, e.column))
            .or_default()
            .push(i);
    }
    for idxs in by_column.values() {
        let rows: BTreeSet<u32> = idxs.iter().map(|&i| events[i].row).collect();
        if idxs.len() > 1 && rows.len() > 1 {
            for &i in idxs {
                assigned[i] = Some(ComponentClass::Column);
            }
        }
    }

    // Rule 6: cell. Group by the full physical byte address, then chain
    // errors whose consecutive gaps stay within the window.
    let mut by_byte: BTreeMap<ByteAddress, Vec<usize>> = BTreeMap::new();
    for i in unassigned(&assigned) {
        let e = &events[i];
        by_byte
            .entry((e.socket, e.channel, e.bank, e.row, e.column, e.byte_offset))
            .or_default()
            .push(i);
    }
    for idxs in by_byte.values() {
        let mut ordered: Vec<usize> = idxs.clone();
        ordered.sort_by_key(|&i| (events[i].timestamp, i));
        let mut run: Vec<usize> = Vec::new();
        let flush = |run: &mut Vec<usize>, assigned: &mut Vec<Option<ComponentClass>>| {
            if run.len() > 1 {
                for &i in run.iter() {
                    assigned[i] = Some(ComponentClass::Cell);
                }
            }
            run.clear();
        };
        for &i in &ordered {
            if let Some(&last) = run.last() {
                if events[i].timestamp - events[last].timestamp > cell_window_s {
                    flush(&mut run, &mut assigned);
                }
            }
            run.push(i);
        }
        flush(&mut run, &mut assigned);
    }

    // Rule 7: spurious.
    Ok(assigned
        .into_iter()
        .map(|a| a.unwrap_or(ComponentClass::Spurious))
        .collect())
}

/// [`classify_month`] with the default threshold (1000) and cell window
/// (60 s).
pub fn classify_month_default(events: &[MemErrorEvent]) -> Result<Vec<ComponentClass>> {
    classify_month(events, DEFAULT_THRESHOLD, DEFAULT_CELL_WINDOW_S)
}

/// One server-month's classified errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifiedGroup {
    pub server_id: String,
    pub year: i32,
    pub month: u32,
    /// Indices into the original event slice, in input order.
    pub event_indices: Vec<usize>,
    /// One class per event, parallel to `event_indices`.
    pub classes: Vec<ComponentClass>,
}

/// Splits a fleet trace into (server, UTC month) groups, classifies each,
/// and returns the groups plus a per-event class vector parallel to the
/// input.
pub fn classify_fleet(
    events: &[MemErrorEvent],
    threshold_k: u64,
    cell_window_s: i64,
) -> Result<(Vec<ClassifiedGroup>, Vec<ComponentClass>)> {
    let mut groups: BTreeMap<(String, i32, u32), Vec<usize>> = BTreeMap::new();
    for (i, e) in events.iter().enumerate() {
        let (y, m) = utc_year_month(e.timestamp);
        groups
            .entry((e.server_id.clone(), y, m))
            .or_default()
            .push(i);
    }
    let mut out_groups = Vec::with_capacity(groups.len());
    let mut per_event = vec![ComponentClass::Spurious; events.len()];
    for ((server_id, year, month), idxs) in groups {
        let subset: Vec<MemErrorEvent> = idxs.iter().map(|&i| events[i].clone()).collect();
        let classes = classify_month(&subset, threshold_k, cell_window_s)?;
        for (&i, &class) in idxs.iter().zip(&classes) {
            per_event[i] = class;
        }
        out_groups.push(ClassifiedGroup {
            server_id,
            year,
            month,
            event_indices: idxs,
            classes,
        });
    }
    Ok((out_groups, per_event))
}

/// Fleet-level summary: how errors and error-affected server-months are
/// distributed over component classes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    /// Share of all errors attributed to each class; sums to 1.
    pub error_fraction: BTreeMap<ComponentClass, f64>,
    /// Share of error-affected server-months exhibiting each class. One
    /// server-month can exhibit several classes, so these may sum past 1.
    pub server_fraction: BTreeMap<ComponentClass, f64>,
    pub total_errors: u64,
    pub server_months_with_errors: u64,
}

impl ClassificationReport {
    /// Writes the report as CSV: one row per class, columns
    /// `class,error_fraction,server_fraction`.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["class", "error_fraction", "server_fraction"])
            .map_err(crate::stats::csv_io)?;
        for class in ComponentClass::ALL {
            w.write_record(&[
                class.to_string(),
                self.error_fraction
                    .get(&class)
                    .copied()
                    .unwrap_or(0.0)
                    .to_string(),
                self.server_fraction
                    .get(&class)
                    .copied()
                    .unwrap_or(0.0)
                    .to_string(),
            ])
            .map_err(crate::stats::csv_io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Aggregates classified server-months into per-class error and server
/// fractions.
pub fn summarize(groups: &[ClassifiedGroup]) -> Result<ClassificationReport> {
    let affected: Vec<&ClassifiedGroup> = groups.iter().filter(|g| !g.classes.is_empty()).collect();
    if affected.is_empty() {
        return Err(Error::empty("summarize: no classified errors"));
    }
    let mut error_counts: BTreeMap<ComponentClass, u64> = BTreeMap::new();
    let mut server_counts: BTreeMap<ComponentClass, u64> = BTreeMap::new();
    let mut total_errors = 0u64;
    for g in &affected {
        let mut seen: BTreeSet<ComponentClass> = BTreeSet::new();
        for &class in &g.classes {
            *error_counts.entry(class).or_insert(0) += 1;
            total_errors += 1;
            seen.insert(class);
        }
        for class in seen {
            *server_counts.entry(class).or_insert(0) += 1;
        }
    }
    let n_servers = affected.len() as f64;
    Ok(ClassificationReport {
        error_fraction: error_counts
            .into_iter()
            .map(|(c, n)| (c, n as f64 / total_errors as f64))
            .collect(),
        server_fraction: server_counts
            .into_iter()
            .map(|(c, n)| (c, n as f64 / n_servers))
            .collect(),
        total_errors,
        server_months_with_errors: affected.len() as u64,
    })
}
