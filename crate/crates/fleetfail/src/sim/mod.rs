//! Trace-driven simulation of the two DRAM mitigation techniques: page
//! offlining and physical page randomization, with overhead accounting.
//!
//! Every run is a pure function of its inputs and seed: per-decision
//! randomness comes from labeled substreams, so outcomes never depend on
//! unrelated traffic in the same trace.

pub mod memory;
pub mod offline;
pub mod randomize;

pub use memory::SimMemory;
pub use offline::{
    run_offline_sim, write_timeline_csv, DayStats, OfflinePolicy, OfflineSimReport, OfflineStore,
    PageId, RetryPolicy, DEFAULT_HOST_CAPACITY_BYTES,
};
pub use randomize::{
    gini, overhead_estimate, run_randomizer_sim, OverheadReport, RandomizationPlan,
    RandomizerReport, DEFAULT_PAGE_MIGRATE_LATENCY_S,
};

/// Bytes per memory page; the randomization overhead formula divides by
/// this, and offlined pages charge it against the host capacity cap.
pub const PAGE_SIZE_BYTES: u64 = 4096;
