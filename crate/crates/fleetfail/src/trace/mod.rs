//! Domain event types, file formats, parsers, and the seeded synthetic
//! trace generator.
//!
//! Records flow through the toolkit as JSONL (one JSON object per line,
//! UTF-8, lower_snake_case field names); readers are gzip-transparent and
//! CSV export mirrors JSON field order. All timestamps are integer epoch
//! seconds UTC, and calendar-month grouping uses UTC months.

pub mod gen;
pub mod parse;
pub mod types;

pub use gen::{generate_traces, GeneratorSpec, TraceBundle};
pub use parse::{open_reader, parse_events, parse_fiber_ticket, RecordBatch, Schema};
pub use types::{
    AccessType, Continent, Density, DeviceType, FiberRepairTicket, IncidentRecord, LabeledDesign,
    MemErrorEvent, Platform, RootCause, ServerDesign, SevLevel, Severity, SsdSnapshot, TicketKind,
    TransferWidth,
};
