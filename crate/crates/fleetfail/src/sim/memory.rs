//! Logical-to-physical page mapping with per-frame wear tracking.
//!
//! [`SimMemory`] is the state the randomization simulator drives: a
//! bijection from mapped logical pages onto physical frames, a free-frame
//! pool, an offline-frame set, and a write counter per frame. Every frame
//! is in exactly one of the three states (mapped, free, offline) at all
//! times; [`SimMemory::check_invariants`] verifies that from scratch.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::error::{Error, Result};

/// A simulated physical memory of `total_frames` page frames.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimMemory {
    /// Logical page → frame.
    map: BTreeMap<u64, usize>,
    /// Frame → logical page, inverse of `map`.
    frame_owner: Vec<Option<u64>>,
    free: BTreeSet<usize>,
    offline: BTreeSet<usize>,
    wear: Vec<u64>,
}

impl SimMemory {
    pub fn new(total_frames: usize) -> Result<Self> {
        if total_frames == 0 {
            return Err(Error::precondition("memory needs at least one frame"));
        }
        Ok(SimMemory {
            map: BTreeMap::new(),
            frame_owner: vec![None; total_frames],
            free: (0..total_frames).collect(),
            offline: BTreeSet::new(),
            wear: vec![0; total_frames],
        })
    }

    pub fn total_frames(&self) -> usize {
        self.frame_owner.len()
    }

    pub fn free_frames(&self) -> usize {
        self.free.len()
    }

    pub fn mapped_pages(&self) -> usize {
        self.map.len()
    }

    pub fn offline_frames(&self) -> usize {
        self.offline.len()
    }

    /// Writes per frame, indexed by frame number.
    pub fn wear(&self) -> &[u64] {
        &self.wear
    }

    pub fn frame_of(&self, logical: u64) -> Option<usize> {
        self.map.get(&logical).copied()
    }

    /// Maps a new logical page into the lowest free frame.
    pub fn map_page(&mut self, logical: u64) -> Result<usize> {
        if self.map.contains_key(&logical) {
            return Err(Error::precondition(format!(
                "logical page {logical} is already mapped"
            )));
        }
        let frame = *self
            .free
            .first()
            .ok_or_else(|| Error::precondition("no free frame to map into"))?;
        self.free.remove(&frame);
        self.frame_owner[frame] = Some(logical);
        self.map.insert(logical, frame);
        Ok(frame)
    }

    /// Records one write to a mapped page.
    pub fn write(&mut self, logical: u64) -> Result<()> {
        let frame = self.map.get(&logical).ok_or_else(|| {
            Error::precondition(format!("write to unmapped logical page {logical}"))
        })?;
        self.wear[*frame] += 1;
        Ok(())
    }

    /// Migrates a mapped page to a frame drawn uniformly from the free
    /// pool. The old frame returns to the pool and the migration itself
    /// costs one write to the destination frame. Offline frames are never
    /// candidates because they are not in the pool.
    pub fn randomize_page<R: Rng>(&mut self, logical: u64, rng: &mut R) -> Result<usize> {
        let old = *self.map.get(&logical).ok_or_else(|| {
            Error::precondition(format!("cannot randomize unmapped logical page {logical}"))
        })?;
        if self.free.is_empty() {
            return Err(Error::precondition(
                "free pool is empty, nowhere to migrate",
            ));
        }
        let pick = rng.random_range(0..self.free.len());
        let dest = *self.free.iter().nth(pick).expect("pick < len");
        self.free.remove(&dest);
        self.free.insert(old);
        self.frame_owner[old] = None;
        self.frame_owner[dest] = Some(logical);
        self.map.insert(logical, dest);
        self.wear[dest] += 1;
        Ok(dest)
    }

    /// Unmaps a page and retires its frame permanently: the frame joins
    /// the offline set instead of the free pool.
    pub fn take_offline(&mut self, logical: u64) -> Result<usize> {
        let frame = self.map.remove(&logical).ok_or_else(|| {
            Error::precondition(format!("cannot offline unmapped logical page {logical}"))
        })?;
        self.frame_owner[frame] = None;
        self.offline.insert(frame);
        Ok(frame)
    }

    /// Full structural check: the map is a bijection onto frames that are
    /// neither free nor offline, and every frame is in exactly one state.
    pub fn check_invariants(&self) -> Result<()> {
        let total = self.frame_owner.len();
        if self.wear.len() != total {
            return Err(Error::invalid(format!(
                "wear table has {} entries for {total} frames",
                self.wear.len()
            )));
        }
        if self.map.len() + self.free.len() + self.offline.len() != total {
            return Err(Error::invalid(format!(
                "states overlap or leak: {} mapped + {} free + {} offline != {total}",
                self.map.len(),
                self.free.len(),
                self.offline.len()
            )));
        }
        for (&logical, &frame) in &self.map {
            if frame >= total {
                return Err(Error::invalid(format!("frame {frame} out of range")));
            }
            if self.frame_owner[frame] != Some(logical) {
                return Err(Error::invalid(format!(
                    "map says page {logical} → frame {frame}, owner table disagrees"
                )));
            }
            if self.free.contains(&frame) || self.offline.contains(&frame) {
                return Err(Error::invalid(format!(
                    "mapped frame {frame} is also free or offline"
                )));
            }
        }
        for (frame, owner) in self.frame_owner.iter().enumerate() {
            match owner {
                Some(logical) if self.map.get(logical) != Some(&frame) => {
                    return Err(Error::invalid(format!(
                        "owner table says frame {frame} holds page {logical}, map disagrees"
                    )));
                }
                None if !self.free.contains(&frame) && !self.offline.contains(&frame) => {
                    return Err(Error::invalid(format!(
                        "frame {frame} is unowned but neither free nor offline"
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }
}
