//! Network reliability metrics and models.
//!
//! Covers incident rates per device population, mean time between failures
//! and to repair, resolution-time percentiles, per-entity percentile curves
//! with exponential fits, severity/root-cause/device breakdowns, and a
//! steady-state conditional-risk check.
//!
//! Times come in as epoch seconds (matching the incident and ticket
//! records); every metric is reported in hours.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{fit_exponential_percentile, nearest_rank, ExponentialCurve};
use crate::trace::types::{DeviceType, FiberRepairTicket, IncidentRecord, RootCause, SevLevel};

/// Default acceptability threshold for [`conditional_risk`].
pub const RISK_THRESHOLD: f64 = 1e-4;

/// Default percentile for incident-resolution time reporting.
pub const RESOLUTION_PERCENTILE: f64 = 0.75;

const SECONDS_PER_HOUR: f64 = 3600.0;

/// Incident count, device population, and their ratio. The rate counts
/// incidents, not devices, so it legitimately exceeds 1 when a typical
/// device fails more than once in the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncidentStats {
    pub i: u64,
    pub n: u64,
    pub r: f64,
}

/// Incidents per device over the observation window.
pub fn incident_rate(i: u64, n: u64) -> Result<IncidentStats> {
    if n == 0 {
        return Err(Error::precondition(
            "incident rate needs a device population of at least 1",
        ));
    }
    Ok(IncidentStats {
        i,
        n,
        r: i as f64 / n as f64,
    })
}

/// Mean time between failures in hours: the average gap between
/// consecutive event starts (start-to-start, epoch seconds, sorted).
pub fn mtbf(event_starts: &[i64]) -> Result<f64> {
    if event_starts.len() < 2 {
        return Err(Error::precondition(format!(
            "mtbf needs at least 2 event starts, got {}",
            event_starts.len()
        )));
    }
    for w in event_starts.windows(2) {
        if w[1] < w[0] {
            return Err(Error::precondition(format!(
                "event starts must be sorted: {} follows {}",
                w[1], w[0]
            )));
        }
    }
    let span = (event_starts[event_starts.len() - 1] - event_starts[0]) as f64;
    Ok(span / (event_starts.len() - 1) as f64 / SECONDS_PER_HOUR)
}

/// Mean time to repair in hours over (start, end) intervals in epoch
/// seconds.
pub fn mttr(intervals: &[(i64, i64)]) -> Result<f64> {
    if intervals.is_empty() {
        return Err(Error::empty("mttr needs at least one repair interval"));
    }
    let mut total = 0.0;
    for &(start, end) in intervals {
        if end < start {
            return Err(Error::precondition(format!(
                "repair interval ends before it starts ({end} < {start})"
            )));
        }
        total += (end - start) as f64;
    }
    Ok(total / intervals.len() as f64 / SECONDS_PER_HOUR)
}

/// Nearest-rank percentile of incident resolution times, in hours.
pub fn resolution_percentile(incidents: &[IncidentRecord], p: f64) -> Result<f64> {
    if incidents.is_empty() {
        return Err(Error::empty("no incidents to take a percentile over"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::precondition(format!(
            "percentile must be in (0, 1], got {p}"
        )));
    }
    let mut durations: Vec<f64> = incidents.iter().map(|r| r.duration_h()).collect();
    durations.sort_by(|a, b| a.total_cmp(b));
    Ok(nearest_rank(&durations, p))
}

/// Per-entity reliability values with nearest-rank percentile access and a
/// fitted exponential percentile model y(p) = a·e^(b·p).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityCurve {
    /// Per-entity values (hours), sorted ascending.
    pub values: Vec<f64>,
    pub fit: ExponentialCurve,
}

impl ReliabilityCurve {
    /// Nearest-rank percentile, p in (0, 1].
    pub fn percentile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::precondition(format!(
                "percentile must be in (0, 1], got {p}"
            )));
        }
        Ok(nearest_rank(&self.values, p))
    }
}

/// Builds a [`ReliabilityCurve`] from one value per entity (e.g. per-link
/// MTBF). The i-th sorted value is assigned percentile (i+1)/n for the
/// exponential fit.
pub fn percentile_curve(per_entity_values: &[f64]) -> Result<ReliabilityCurve> {
    if per_entity_values.len() < 3 {
        return Err(Error::precondition(format!(
            "percentile curve needs at least 3 entities, got {}",
            per_entity_values.len()
        )));
    }
    for &v in per_entity_values {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::precondition(format!(
                "per-entity values must be positive and finite, got {v}"
            )));
        }
    }
    let mut values = per_entity_values.to_vec();
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len() as f64;
    let points: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| ((i + 1) as f64 / n, v))
        .collect();
    let fit = fit_exponential_percentile(&points)?;
    Ok(ReliabilityCurve { values, fit })
}

/// Which incident field a breakdown groups on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    RootCause,
    DeviceType,
    SevLevel,
}

impl FromStr for GroupBy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "root_cause" => Ok(GroupBy::RootCause),
            "device_type" => Ok(GroupBy::DeviceType),
            "sev_level" => Ok(GroupBy::SevLevel),
            other => Err(Error::precondition(format!(
                "unknown grouping `{other}` (expected root_cause, device_type, or sev_level)"
            ))),
        }
    }
}

pub fn device_label(d: DeviceType) -> &'static str {
    match d {
        DeviceType::Core => "core",
        DeviceType::Csa => "CSA",
        DeviceType::Csw => "CSW",
        DeviceType::Esw => "ESW",
        DeviceType::Ssw => "SSW",
        DeviceType::Fsw => "FSW",
        DeviceType::Rsw => "RSW",
    }
}

pub fn root_cause_label(c: RootCause) -> &'static str {
    match c {
        RootCause::Maintenance => "maintenance",
        RootCause::Hardware => "hardware",
        RootCause::Misconfiguration => "misconfiguration",
        RootCause::Bug => "bug",
        RootCause::Accident => "accident",
        RootCause::CapacityPlanning => "capacity_planning",
        RootCause::Undetermined => "undetermined",
    }
}

pub fn sev_label(s: SevLevel) -> &'static str {
    match s {
        SevLevel::Sev1 => "sev1",
        SevLevel::Sev2 => "sev2",
        SevLevel::Sev3 => "sev3",
    }
}

/// Fraction of incidents per category of the grouped field. Each record
/// carries exactly one value of the field, so the fractions sum to 1.
pub fn breakdown(incidents: &[IncidentRecord], group_by: GroupBy) -> Result<BTreeMap<String, f64>> {
    if incidents.is_empty() {
        return Err(Error::empty("no incidents to break down"));
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for r in incidents {
        let label = match group_by {
            GroupBy::RootCause => root_cause_label(r.root_cause),
            GroupBy::DeviceType => device_label(r.device_type),
            GroupBy::SevLevel => sev_label(r.sev_level),
        };
        *counts.entry(label.to_string()).or_insert(0) += 1;
    }
    let total = incidents.len() as f64;
    Ok(counts
        .into_iter()
        .map(|(label, count)| (label, count as f64 / total))
        .collect())
}

/// Breakdown for reviews that assign several root causes to one incident:
/// an incident counts toward every cause it lists, while the denominator
/// stays the number of incidents. Each fraction is in [0, 1], but their
/// sum exceeds 1 whenever any record lists more than one cause.
pub fn breakdown_multi(cause_sets: &[Vec<RootCause>]) -> Result<BTreeMap<String, f64>> {
    if cause_sets.is_empty() {
        return Err(Error::empty("no incidents to break down"));
    }
    let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    for causes in cause_sets {
        let mut distinct: Vec<RootCause> = causes.clone();
        distinct.sort();
        distinct.dedup();
        for c in distinct {
            *counts.entry(root_cause_label(c)).or_insert(0) += 1;
        }
    }
    let total = cause_sets.len() as f64;
    Ok(counts
        .into_iter()
        .map(|(label, count)| (label.to_string(), count as f64 / total))
        .collect())
}

/// Steady-state unavailability: the long-run fraction of time a device with
/// the given mean time between failures and mean repair time spends under
/// repair, mttr / (mtbf + mttr). Zero repair time means zero risk.
pub fn conditional_risk(mtbf_h: f64, mttr_h: f64) -> Result<f64> {
    if !(mtbf_h > 0.0) || !mtbf_h.is_finite() {
        return Err(Error::precondition(format!(
            "conditional risk needs a positive finite MTBF, got {mtbf_h}"
        )));
    }
    if mttr_h < 0.0 || !mttr_h.is_finite() {
        return Err(Error::precondition(format!(
            "conditional risk needs a non-negative finite MTTR, got {mttr_h}"
        )));
    }
    Ok(mttr_h / (mtbf_h + mttr_h))
}

/// Whether a risk value clears the acceptability threshold.
pub fn risk_within_threshold(risk: f64, threshold: f64) -> bool {
    risk < threshold
}

/// Per-device-type reliability summary for report output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceReliability {
    pub device_type: DeviceType,
    pub i: u64,
    pub n: u64,
    pub r: f64,
    /// Mean time between incidents; needs at least two incidents.
    pub mtbi_h: Option<f64>,
    /// 75th-percentile incident resolution time; needs at least one.
    pub p75irt_h: Option<f64>,
}

/// Summarizes incidents per device type against the given populations.
/// Every device type seen in the incidents must have a population entry.
pub fn device_report(
    incidents: &[IncidentRecord],
    populations: &BTreeMap<DeviceType, u64>,
) -> Result<Vec<DeviceReliability>> {
    let mut grouped: BTreeMap<DeviceType, Vec<&IncidentRecord>> = BTreeMap::new();
    for r in incidents {
        grouped.entry(r.device_type).or_default().push(r);
    }
    for device in grouped.keys() {
        if !populations.contains_key(device) {
            return Err(Error::precondition(format!(
                "no population given for device type {}",
                device_label(*device)
            )));
        }
    }
    let mut report = Vec::with_capacity(populations.len());
    for (&device, &n) in populations {
        let records = grouped.remove(&device).unwrap_or_default();
        let stats = incident_rate(records.len() as u64, n)?;
        let mut starts: Vec<i64> = records.iter().map(|r| r.start).collect();
        starts.sort_unstable();
        let mtbi_h = if starts.len() >= 2 {
            Some(mtbf(&starts)?)
        } else {
            None
        };
        let owned: Vec<IncidentRecord> = records.iter().map(|&r| r.clone()).collect();
        let p75irt_h = if owned.is_empty() {
            None
        } else {
            Some(resolution_percentile(&owned, RESOLUTION_PERCENTILE)?)
        };
        report.push(DeviceReliability {
            device_type: device,
            i: stats.i,
            n: stats.n,
            r: stats.r,
            mtbi_h,
            p75irt_h,
        });
    }
    Ok(report)
}

/// Which ticket field a backbone-link grouping uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TicketGroupBy {
    Vendor,
    Continent,
}

impl FromStr for TicketGroupBy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vendor" => Ok(TicketGroupBy::Vendor),
            "continent" => Ok(TicketGroupBy::Continent),
            other => Err(Error::precondition(format!(
                "unknown grouping `{other}` (expected vendor or continent)"
            ))),
        }
    }
}

/// Reliability of one vendor/continent group of backbone links: median of
/// the per-link MTBF and MTTR values inside the group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReliability {
    pub links: usize,
    pub tickets: usize,
    pub median_mtbf_h: Option<f64>,
    pub median_mttr_h: Option<f64>,
}

/// Per-link MTBF (hours) from repair-ticket start gaps, for links with at
/// least two tickets.
pub fn link_mtbf_values(tickets: &[FiberRepairTicket]) -> Result<BTreeMap<String, f64>> {
    let mut per_link: BTreeMap<&str, Vec<i64>> = BTreeMap::new();
    for t in tickets {
        per_link.entry(&t.link_id).or_default().push(t.start);
    }
    let mut values = BTreeMap::new();
    for (link, mut starts) in per_link {
        if starts.len() < 2 {
            continue;
        }
        starts.sort_unstable();
        values.insert(link.to_string(), mtbf(&starts)?);
    }
    Ok(values)
}

/// Per-link MTTR (hours) over closed tickets (those with an end time), for
/// links with at least one closed ticket.
pub fn link_mttr_values(tickets: &[FiberRepairTicket]) -> Result<BTreeMap<String, f64>> {
    let mut per_link: BTreeMap<&str, Vec<(i64, i64)>> = BTreeMap::new();
    for t in tickets {
        if let Some(end) = t.end {
            per_link.entry(&t.link_id).or_default().push((t.start, end));
        }
    }
    let mut values = BTreeMap::new();
    for (link, intervals) in per_link {
        values.insert(link.to_string(), mttr(&intervals)?);
    }
    Ok(values)
}

/// Groups backbone links by vendor or continent and reports the median
/// per-link MTBF/MTTR inside each group.
pub fn ticket_group_report(
    tickets: &[FiberRepairTicket],
    group_by: TicketGroupBy,
) -> Result<BTreeMap<String, GroupReliability>> {
    let label = |t: &FiberRepairTicket| -> String {
        match group_by {
            TicketGroupBy::Vendor => t.vendor.clone(),
            TicketGroupBy::Continent => format!("{:?}", t.continent),
        }
    };
    let mut grouped: BTreeMap<String, Vec<FiberRepairTicket>> = BTreeMap::new();
    for t in tickets {
        grouped.entry(label(t)).or_default().push(t.clone());
    }
    let median = |map: BTreeMap<String, f64>| -> Option<f64> {
        if map.is_empty() {
            return None;
        }
        let mut v: Vec<f64> = map.into_values().collect();
        v.sort_by(|a, b| a.total_cmp(b));
        Some(nearest_rank(&v, 0.5))
    };
    let mut report = BTreeMap::new();
    for (group, group_tickets) in grouped {
        let links: std::collections::BTreeSet<&str> =
            group_tickets.iter().map(|t| t.link_id.as_str()).collect();
        report.insert(
            group,
            GroupReliability {
                links: links.len(),
                tickets: group_tickets.len(),
                median_mtbf_h: median(link_mtbf_values(&group_tickets)?),
                median_mttr_h: median(link_mttr_values(&group_tickets)?),
            },
        );
    }
    Ok(report)
}
