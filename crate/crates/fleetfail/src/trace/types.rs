//! Record types shared by every analysis in the crate, plus the UTC
//! calendar arithmetic used to group events into months.
//!
//! Each type carries a `validate` method enforcing its invariants; parsers
//! call it after deserialization so malformed files are rejected with a
//! line-level error rather than poisoning downstream analytics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether a memory access that surfaced an error was a read, a write, or a
/// background scrub pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessType {
    Read,
    Write,
    Scrub,
}

/// ECC outcome of a memory error: repaired in-line or detected only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Correctable,
    Uncorrectable,
}

/// One logged DRAM error with the full physical address of the access.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemErrorEvent {
    /// Epoch seconds UTC; must be positive.
    pub timestamp: i64,
    pub server_id: String,
    pub socket: u8,
    pub channel: u8,
    pub bank: u8,
    pub row: u32,
    pub column: u32,
    /// Byte within the accessed word; together with the indices above it
    /// identifies one physical byte of DRAM.
    pub byte_offset: u32,
    pub access_type: AccessType,
    pub severity: Severity,
}

impl MemErrorEvent {
    pub fn validate(&self) -> Result<()> {
        if self.timestamp <= 0 {
            return Err(Error::invalid(format!(
                "timestamp must be positive, got {}",
                self.timestamp
            )));
        }
        if self.server_id.is_empty() {
            return Err(Error::invalid("server_id must be non-empty"));
        }
        Ok(())
    }
}

/// Per-chip DRAM die density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Density {
    #[serde(rename = "1Gb")]
    OneGb,
    #[serde(rename = "2Gb")]
    TwoGb,
    #[serde(rename = "4Gb")]
    FourGb,
}

impl Density {
    /// Die capacity in gigabits.
    pub fn gigabits(self) -> f64 {
        match self {
            Density::OneGb => 1.0,
            Density::TwoGb => 2.0,
            Density::FourGb => 4.0,
        }
    }
}

/// DRAM chip data-transfer width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransferWidth {
    #[serde(rename = "x4")]
    X4,
    #[serde(rename = "x8")]
    X8,
}

/// The hardware/workload profile of one server, carrying every factor the
/// server-failure model can consume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServerDesign {
    pub capacity_gb: f64,
    pub density: Density,
    pub chips: u32,
    pub transfer_width: TransferWidth,
    pub cpu_util_pct: f64,
    pub mem_util_pct: f64,
    pub age_years: f64,
    pub cpus: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workload: Option<String>,
}

/// Chip counts that real DIMM configurations use.
pub const VALID_CHIP_COUNTS: [u32; 5] = [8, 16, 32, 48, 64];

impl ServerDesign {
    pub fn validate(&self) -> Result<()> {
        if !(self.capacity_gb > 0.0) || !self.capacity_gb.is_finite() {
            return Err(Error::invalid(format!(
                "capacity_gb must be positive, got {}",
                self.capacity_gb
            )));
        }
        if !VALID_CHIP_COUNTS.contains(&self.chips) {
            return Err(Error::invalid(format!(
                "chips must be one of {VALID_CHIP_COUNTS:?}, got {}",
                self.chips
            )));
        }
        // The chips on board must physically hold the claimed capacity:
        // chips × per-chip gigabits / 8 ≥ capacity in GB.
        let chip_capacity_gb = self.chips as f64 * self.density.gigabits() / 8.0;
        if chip_capacity_gb + 1e-9 < self.capacity_gb {
            return Err(Error::invalid(format!(
                "{} chips of {:?} hold {chip_capacity_gb} GB, less than capacity_gb {}",
                self.chips, self.density, self.capacity_gb
            )));
        }
        for (name, v) in [
            ("cpu_util_pct", self.cpu_util_pct),
            ("mem_util_pct", self.mem_util_pct),
        ] {
            if !(0.0..=100.0).contains(&v) {
                return Err(Error::invalid(format!(
                    "{name} must be in [0, 100], got {v}"
                )));
            }
        }
        if !(self.age_years >= 0.0) || !self.age_years.is_finite() {
            return Err(Error::invalid(format!(
                "age_years must be non-negative, got {}",
                self.age_years
            )));
        }
        Ok(())
    }
}

/// A [`ServerDesign`] labeled with whether the server belongs to the error
/// group — the sample format consumed by model fitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDesign {
    #[serde(flatten)]
    pub design: ServerDesign,
    pub in_error_group: bool,
}

/// SSD host platform. Capacity, bus generation, and SSDs-per-server are
/// fixed per platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Platform {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Platform {
    pub const ALL: [Platform; 6] = [
        Platform::A,
        Platform::B,
        Platform::C,
        Platform::D,
        Platform::E,
        Platform::F,
    ];

    pub fn capacity_gb(self) -> f64 {
        match self {
            Platform::A | Platform::B => 720.0,
            Platform::C | Platform::D => 1200.0,
            Platform::E | Platform::F => 3200.0,
        }
    }

    pub fn pcie_version(self) -> u8 {
        match self {
            Platform::A | Platform::B => 1,
            _ => 2,
        }
    }

    pub fn ssds_per_server(self) -> u32 {
        match self {
            Platform::A | Platform::C | Platform::E => 1,
            Platform::B | Platform::D | Platform::F => 2,
        }
    }
}

/// Lifetime counters and environment readings for one SSD, captured in a
/// single fleet snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsdSnapshot {
    pub ssd_id: String,
    pub platform: Platform,
    /// PCIe slot rank within the server; pairs are compared as lower vs
    /// higher slot index.
    pub slot_index: u32,
    pub server_id: String,
    pub flash_written_tb: f64,
    pub flash_read_tb: f64,
    pub uncorrectable_errors: u64,
    pub discarded_blocks: u64,
    pub dram_buffer_util_pct: f64,
    pub avg_temp_c: f64,
    pub bus_power_w: f64,
    pub throttled: bool,
    pub os_sectors_written: u64,
    pub erases_per_gc: f64,
    pub pages_copied: u64,
}

impl SsdSnapshot {
    pub fn validate(&self) -> Result<()> {
        if self.ssd_id.is_empty() || self.server_id.is_empty() {
            return Err(Error::invalid("ssd_id and server_id must be non-empty"));
        }
        for (name, v) in [
            ("flash_written_tb", self.flash_written_tb),
            ("flash_read_tb", self.flash_read_tb),
            ("dram_buffer_util_pct", self.dram_buffer_util_pct),
            ("bus_power_w", self.bus_power_w),
            ("erases_per_gc", self.erases_per_gc),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if !self.avg_temp_c.is_finite() {
            return Err(Error::invalid(format!(
                "avg_temp_c must be finite, got {}",
                self.avg_temp_c
            )));
        }
        Ok(())
    }
}

/// Network device classes tracked by incident records: backbone core
/// devices and the five aggregation/rack switch types, plus cluster switch
/// aggregators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DeviceType {
    #[serde(rename = "core")]
    Core,
    #[serde(rename = "CSA")]
    Csa,
    #[serde(rename = "CSW")]
    Csw,
    #[serde(rename = "ESW")]
    Esw,
    #[serde(rename = "SSW")]
    Ssw,
    #[serde(rename = "FSW")]
    Fsw,
    #[serde(rename = "RSW")]
    Rsw,
}

impl DeviceType {
    pub const ALL: [DeviceType; 7] = [
        DeviceType::Core,
        DeviceType::Csa,
        DeviceType::Csw,
        DeviceType::Esw,
        DeviceType::Ssw,
        DeviceType::Fsw,
        DeviceType::Rsw,
    ];
}

/// Incident severity: 1 is worst, 3 least severe. A record carries the
/// single severity assigned at filing; levels are never downgraded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum SevLevel {
    Sev1,
    Sev2,
    Sev3,
}

impl TryFrom<u8> for SevLevel {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(SevLevel::Sev1),
            2 => Ok(SevLevel::Sev2),
            3 => Ok(SevLevel::Sev3),
            other => Err(format!("sev_level must be 1, 2, or 3, got {other}")),
        }
    }
}

impl From<SevLevel> for u8 {
    fn from(v: SevLevel) -> u8 {
        match v {
            SevLevel::Sev1 => 1,
            SevLevel::Sev2 => 2,
            SevLevel::Sev3 => 3,
        }
    }
}

/// Root cause assigned to a network incident after review.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootCause {
    Maintenance,
    Hardware,
    Misconfiguration,
    Bug,
    Accident,
    CapacityPlanning,
    Undetermined,
}

impl RootCause {
    pub const ALL: [RootCause; 7] = [
        RootCause::Maintenance,
        RootCause::Hardware,
        RootCause::Misconfiguration,
        RootCause::Bug,
        RootCause::Accident,
        RootCause::CapacityPlanning,
        RootCause::Undetermined,
    ];
}

/// One intra-data-center network incident from filing to resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncidentRecord {
    pub device_type: DeviceType,
    pub sev_level: SevLevel,
    pub root_cause: RootCause,
    /// Epoch seconds UTC.
    pub start: i64,
    /// Epoch seconds UTC; never before `start`.
    pub resolved: i64,
}

impl IncidentRecord {
    pub fn validate(&self) -> Result<()> {
        if self.resolved < self.start {
            return Err(Error::invalid(format!(
                "resolved ({}) before start ({})",
                self.resolved, self.start
            )));
        }
        Ok(())
    }

    /// Resolution time in hours.
    pub fn duration_h(&self) -> f64 {
        (self.resolved - self.start) as f64 / 3600.0
    }
}

/// Continent a fiber link lands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Continent {
    NA,
    EU,
    #[serde(rename = "AS")]
    Asia,
    SA,
    AF,
    AU,
}

/// Whether a fiber ticket reports unplanned repair work or scheduled
/// maintenance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TicketKind {
    Repair,
    Maintenance,
}

/// A vendor notification about work on an inter-data-center fiber link. A
/// ticket without `end` is still open.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberRepairTicket {
    pub link_id: String,
    pub vendor: String,
    pub continent: Continent,
    pub kind: TicketKind,
    pub start: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub est_duration_s: Option<i64>,
}

impl FiberRepairTicket {
    pub fn validate(&self) -> Result<()> {
        if let Some(end) = self.end {
            if end < self.start {
                return Err(Error::invalid(format!(
                    "end before start ({end} < {})",
                    self.start
                )));
            }
        }
        Ok(())
    }

    /// Repair duration in seconds, when the ticket is closed.
    pub fn duration_s(&self) -> Option<i64> {
        self.end.map(|e| e - self.start)
    }
}

/// UTC (year, month) of an epoch-seconds timestamp; month is 1-based.
pub fn utc_year_month(ts: i64) -> (i32, u32) {
    let (y, m, _) = civil_from_days(ts.div_euclid(86400));
    (y, m)
}

/// Proleptic-Gregorian date of a day count since 1970-01-01.
///
/// Era-based conversion: days are grouped into 400-year eras of exactly
/// 146097 days, within which year/month fall out of integer arithmetic on a
/// March-based calendar (so the leap day lands at the end of the shifted
/// year).
pub fn civil_from_days(z: i64) -> (i32, u32, u32) {
    let z = z + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = if m <= 2 { y + 1 } else { y };
    (y as i32, m as u32, d as u32)
}

/// Day count since 1970-01-01 of a proleptic-Gregorian date (inverse of
/// [`civil_from_days`]).
pub fn days_from_civil(y: i32, m: u32, d: u32) -> i64 {
    let y = y as i64 - if m <= 2 { 1 } else { 0 };
    let era = y.div_euclid(400);
    let yoe = y.rem_euclid(400);
    let mp = (m as i64 + 9) % 12;
    let doy = (153 * mp + 2) / 5 + d as i64 - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

/// Epoch-seconds window `[start, end)` of the UTC month `offset` months
/// after the month containing `ts`.
pub fn month_window(ts: i64, offset: u32) -> (i64, i64) {
    let (y0, m0) = utc_year_month(ts);
    let total = (y0 as i64) * 12 + (m0 as i64 - 1) + offset as i64;
    let (y, m) = (
        total.div_euclid(12) as i32,
        (total.rem_euclid(12) + 1) as u32,
    );
    let start = days_from_civil(y, m, 1) * 86400;
    let total_next = total + 1;
    let (yn, mn) = (
        total_next.div_euclid(12) as i32,
        (total_next.rem_euclid(12) + 1) as u32,
    );
    let end = days_from_civil(yn, mn, 1) * 86400;
    (start, end)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_design() -> ServerDesign {
        ServerDesign {
            capacity_gb: 4.0,
            density: Density::TwoGb,
            chips: 16,
            transfer_width: TransferWidth::X4,
            cpu_util_pct: 50.0,
            mem_util_pct: 40.0,
            age_years: 1.0,
            cpus: 8,
            workload: None,
        }
    }

    #[test]
    fn epoch_zero_is_january_1970() {
        assert_eq!(civil_from_days(0), (1970, 1, 1));
        assert_eq!(days_from_civil(1970, 1, 1), 0);
    }

    #[test]
    fn civil_conversion_round_trips_across_leap_years() {
        // Covers century and 400-year leap rules on both sides of the epoch.
        for &z in &[-719468, -1, 0, 59, 60, 11016, 16495, 18321, 20500, 150000] {
            let (y, m, d) = civil_from_days(z);
            assert_eq!(days_from_civil(y, m, d), z, "day {z} → {y}-{m}-{d}");
        }
    }

    #[test]
    fn known_dates_convert_correctly() {
        // 2000-02-29 (leap), 2015-02-01, 2100-03-01 (2100 is not leap).
        assert_eq!(civil_from_days(days_from_civil(2000, 2, 29)), (2000, 2, 29));
        assert_eq!(utc_year_month(1422748800), (2015, 2));
        assert_eq!(civil_from_days(days_from_civil(2100, 3, 1)), (2100, 3, 1));
        assert_eq!(
            days_from_civil(2100, 3, 1) - days_from_civil(2100, 2, 28),
            1
        );
    }

    #[test]
    fn month_windows_tile_the_year() {
        let jan_2014 = days_from_civil(2014, 1, 15) * 86400;
        let mut prev_end = None;
        for k in 0..13 {
            let (start, end) = month_window(jan_2014, k);
            assert!(start < end);
            if let Some(pe) = prev_end {
                assert_eq!(start, pe, "months must tile without gaps");
            }
            prev_end = Some(end);
        }
        let (dec_start, _) = month_window(jan_2014, 11);
        assert_eq!(utc_year_month(dec_start), (2014, 12));
        let (jan_start, _) = month_window(jan_2014, 12);
        assert_eq!(utc_year_month(jan_start), (2015, 1));
    }

    #[test]
    fn design_validation_enforces_chip_capacity() {
        let mut d = sample_design();
        assert!(d.validate().is_ok());
        d.capacity_gb = 64.0; // 16 chips × 2 Gb = 4 GB, far below 64
        assert!(d.validate().is_err());
        d.capacity_gb = 4.0;
        d.chips = 12; // not a real configuration
        assert!(d.validate().is_err());
    }

    #[test]
    fn density_and_width_serialize_as_published_names() {
        let d = sample_design();
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains("\"2Gb\""), "{json}");
        assert!(json.contains("\"x4\""), "{json}");
        let back: ServerDesign = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn labeled_design_flattens_fields() {
        let l = LabeledDesign {
            design: sample_design(),
            in_error_group: true,
        };
        let json = serde_json::to_string(&l).unwrap();
        assert!(json.contains("\"capacity_gb\":4.0"), "{json}");
        assert!(json.contains("\"in_error_group\":true"), "{json}");
        let back: LabeledDesign = serde_json::from_str(&json).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn sev_level_round_trips_as_integer() {
        let r = IncidentRecord {
            device_type: DeviceType::Rsw,
            sev_level: SevLevel::Sev2,
            root_cause: RootCause::Maintenance,
            start: 100,
            resolved: 3700,
        };
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"sev_level\":2"), "{json}");
        assert!(json.contains("\"RSW\""), "{json}");
        assert!(json.contains("\"maintenance\""), "{json}");
        let back: IncidentRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert!((r.duration_h() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sev_level_rejects_out_of_range() {
        let err = serde_json::from_str::<SevLevel>("4").unwrap_err();
        assert!(err.to_string().contains("sev_level"));
    }

    #[test]
    fn incident_rejects_resolution_before_start() {
        let r = IncidentRecord {
            device_type: DeviceType::Core,
            sev_level: SevLevel::Sev1,
            root_cause: RootCause::Bug,
            start: 100,
            resolved: 99,
        };
        assert!(r.validate().is_err());
    }

    #[test]
    fn platform_metadata_is_consistent() {
        assert_eq!(Platform::A.capacity_gb(), 720.0);
        assert_eq!(Platform::F.capacity_gb(), 3200.0);
        assert_eq!(Platform::A.pcie_version(), 1);
        assert_eq!(Platform::C.pcie_version(), 2);
        for p in Platform::ALL {
            assert!(matches!(p.ssds_per_server(), 1 | 2));
        }
        assert_eq!(Platform::B.ssds_per_server(), 2);
        assert_eq!(Platform::E.ssds_per_server(), 1);
    }

    #[test]
    fn open_ticket_has_no_duration() {
        let t = FiberRepairTicket {
            link_id: "L1".into(),
            vendor: "northlight".into(),
            continent: Continent::EU,
            kind: TicketKind::Repair,
            start: 1000,
            end: None,
            est_duration_s: Some(7200),
        };
        assert!(t.validate().is_ok());
        assert_eq!(t.duration_s(), None);
        let closed = FiberRepairTicket {
            end: Some(4600),
            ..t.clone()
        };
        assert_eq!(closed.duration_s(), Some(3600));
        let bad = FiberRepairTicket {
            end: Some(500),
            ..t
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn continent_asia_serializes_as_as() {
        assert_eq!(serde_json::to_string(&Continent::Asia).unwrap(), "\"AS\"");
        assert_eq!(
            serde_json::from_str::<Continent>("\"AS\"").unwrap(),
            Continent::Asia
        );
    }

    #[test]
    fn mem_event_validation() {
        let e = MemErrorEvent {
            timestamp: 1,
            server_id: "srv000001".into(),
            socket: 0,
            channel: 1,
            bank: 2,
            row: 3,
            column: 4,
            byte_offset: 5,
            access_type: AccessType::Read,
            severity: Severity::Correctable,
        };
        assert!(e.validate().is_ok());
        let mut bad = e.clone();
        bad.timestamp = 0;
        assert!(bad.validate().is_err());
        let mut bad = e;
        bad.server_id.clear();
        assert!(bad.validate().is_err());
    }
}
