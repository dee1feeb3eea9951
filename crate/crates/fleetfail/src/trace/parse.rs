//! Line-delimited record ingestion, the fiber repair-ticket text parser,
//! and JSONL/CSV writers.
//!
//! Every reader is gzip-transparent (detected by magic bytes, not file
//! name). Parse errors always carry the 1-based line number and, for field
//! errors, the field name the deserializer reported.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::trace::types::{
    Continent, FiberRepairTicket, IncidentRecord, LabeledDesign, MemErrorEvent, SsdSnapshot,
    TicketKind,
};

/// Which record type a JSONL stream holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    MemError,
    LabeledDesign,
    SsdSnapshot,
    Incident,
    FiberTicket,
}

impl std::str::FromStr for Schema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "mem_error" => Ok(Schema::MemError),
            "labeled_design" | "design" => Ok(Schema::LabeledDesign),
            "ssd_snapshot" | "ssd" => Ok(Schema::SsdSnapshot),
            "incident" => Ok(Schema::Incident),
            "fiber_ticket" | "ticket" => Ok(Schema::FiberTicket),
            other => Err(Error::Precondition(format!(
                "unknown schema `{other}` (expected mem_error, labeled_design, ssd_snapshot, incident, or fiber_ticket)"
            ))),
        }
    }
}

/// Parsed records of one schema, in file order.
#[derive(Debug, Clone, PartialEq)]
pub enum RecordBatch {
    MemErrors(Vec<MemErrorEvent>),
    Designs(Vec<LabeledDesign>),
    Snapshots(Vec<SsdSnapshot>),
    Incidents(Vec<IncidentRecord>),
    Tickets(Vec<FiberRepairTicket>),
}

impl RecordBatch {
    pub fn len(&self) -> usize {
        match self {
            RecordBatch::MemErrors(v) => v.len(),
            RecordBatch::Designs(v) => v.len(),
            RecordBatch::Snapshots(v) => v.len(),
            RecordBatch::Incidents(v) => v.len(),
            RecordBatch::Tickets(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Parses a JSONL stream of records of the given schema. Blank lines are
/// skipped; any malformed line aborts with its line number and the
/// deserializer's complaint (which names the offending field).
pub fn parse_events<R: BufRead>(reader: R, schema: Schema) -> Result<RecordBatch> {
    match schema {
        Schema::MemError => Ok(RecordBatch::MemErrors(parse_jsonl(
            reader,
            |r: &MemErrorEvent| r.validate(),
        )?)),
        Schema::LabeledDesign => Ok(RecordBatch::Designs(parse_jsonl(
            reader,
            |r: &LabeledDesign| r.design.validate(),
        )?)),
        Schema::SsdSnapshot => Ok(RecordBatch::Snapshots(parse_jsonl(
            reader,
            |r: &SsdSnapshot| r.validate(),
        )?)),
        Schema::Incident => Ok(RecordBatch::Incidents(parse_jsonl(
            reader,
            |r: &IncidentRecord| r.validate(),
        )?)),
        Schema::FiberTicket => Ok(RecordBatch::Tickets(parse_jsonl(
            reader,
            |r: &FiberRepairTicket| r.validate(),
        )?)),
    }
}

/// Parses one record type from JSONL, validating each record.
pub fn parse_jsonl<R: BufRead, T: DeserializeOwned>(
    reader: R,
    validate: impl Fn(&T) -> Result<()>,
) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let record: T = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        validate(&record).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

/// Opens a file for buffered reading, decompressing transparently when the
/// content starts with the gzip magic bytes.
pub fn open_reader(path: &Path) -> Result<Box<dyn BufRead>> {
    let file = File::open(path)?;
    let mut buffered = BufReader::new(file);
    let head = buffered.fill_buf()?;
    if head.starts_with(&[0x1f, 0x8b]) {
        Ok(Box::new(BufReader::new(flate2::read::GzDecoder::new(
            buffered,
        ))))
    } else {
        Ok(Box::new(buffered))
    }
}

/// Parses one fiber repair ticket from its line-oriented `key: value` text
/// form. Mandatory keys: `link`, `vendor`, `continent`, `kind`, `start`;
/// `end` and `est_duration_s` are optional (a ticket without `end` is still
/// open). Lines that are not `key: value`, and unknown keys, are ignored —
/// real notifications carry prose around the structured fields.
pub fn parse_fiber_ticket(text: &str) -> Result<FiberRepairTicket> {
    let mut link = None;
    let mut vendor = None;
    let mut continent = None;
    let mut kind = None;
    let mut start = None;
    let mut end = None;
    let mut est_duration_s = None;

    for line in text.lines() {
        let Some((key, value)) = line.split_once(':') else {
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "link" => link = Some(value.to_string()),
            "vendor" => vendor = Some(value.to_string()),
            "continent" => {
                continent = Some(match value {
                    "NA" => Continent::NA,
                    "EU" => Continent::EU,
                    "AS" => Continent::Asia,
                    "SA" => Continent::SA,
                    "AF" => Continent::AF,
                    "AU" => Continent::AU,
                    other => {
                        return Err(Error::invalid(format!(
                            "continent must be NA/EU/AS/SA/AF/AU, got `{other}`"
                        )))
                    }
                })
            }
            "kind" => {
                kind = Some(match value {
                    "repair" => TicketKind::Repair,
                    "maintenance" => TicketKind::Maintenance,
                    other => {
                        return Err(Error::invalid(format!(
                            "kind must be repair or maintenance, got `{other}`"
                        )))
                    }
                })
            }
            "start" => start = Some(parse_epoch(key, value)?),
            "end" => end = Some(parse_epoch(key, value)?),
            "est_duration_s" => est_duration_s = Some(parse_epoch(key, value)?),
            _ => {}
        }
    }

    let ticket = FiberRepairTicket {
        link_id: link.ok_or(Error::MissingKey { key: "link" })?,
        vendor: vendor.ok_or(Error::MissingKey { key: "vendor" })?,
        continent: continent.ok_or(Error::MissingKey { key: "continent" })?,
        kind: kind.ok_or(Error::MissingKey { key: "kind" })?,
        start: start.ok_or(Error::MissingKey { key: "start" })?,
        end,
        est_duration_s,
    };
    ticket.validate()?;
    Ok(ticket)
}

fn parse_epoch(key: &str, value: &str) -> Result<i64> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("`{key}` must be an integer, got `{value}`")))
}

/// Writes records as JSONL, one object per line.
pub fn write_jsonl<T: Serialize, W: Write>(records: &[T], mut writer: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut writer, r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Writes records as CSV with a header row mirroring JSON field order. Only
/// flat record types are supported (nested/flattened structures are a JSONL
/// concern).
pub fn write_csv<T: Serialize, W: Write>(records: &[T], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r).map_err(crate::stats::csv_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a whole stream to a string (helper for ticket files).
pub fn read_to_string<R: Read>(mut reader: R) -> Result<String> {
    let mut s = String::new();
    reader.read_to_string(&mut s)?;
    Ok(s)
}
