//! Registry of reference traces and the feeling-of-knowing signal.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::memory::{CellId, MemoryCell, Trace};
use crate::recall::{LoopOutcome, LoopStatus};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StimulusId(pub String);

impl std::fmt::Display for StimulusId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for StimulusId {
    fn from(s: &str) -> Self {
        StimulusId(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetamemoryEntry {
    pub stimulus_id: StimulusId,
    pub cell_id: CellId,
    pub reference_trace: Trace,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Identification<'a> {
    Hit {
        cell_id: &'a CellId,
        reference_trace: &'a Trace,
    },
    NoEntry,
}

impl Identification<'_> {
    pub fn is_hit(&self) -> bool {
        matches!(self, Identification::Hit { .. })
    }
}

/// Stimulus to cell map. Append-only; each stimulus and each cell appears at
/// most once.
#[derive(Debug, Clone, Default)]
pub struct Metamemory {
    entries: BTreeMap<StimulusId, MetamemoryEntry>,
    cells: BTreeSet<CellId>,
}

impl Metamemory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(
        &mut self,
        stimulus_id: impl Into<StimulusId>,
        cell: &MemoryCell,
        reference_trace: Trace,
    ) -> Result<&MetamemoryEntry> {
        let stimulus_id = stimulus_id.into();
        if self.entries.contains_key(&stimulus_id) {
            return Err(Error::Conflict(stimulus_id.0));
        }
        if &reference_trace != cell.trace() {
            return Err(Error::Integrity(format!(
                "reference trace for `{stimulus_id}` differs from the trace stored in cell `{}`",
                cell.id()
            )));
        }
        if self.cells.contains(cell.id()) {
            return Err(Error::Integrity(format!(
                "cell `{}` is already referenced by another stimulus",
                cell.id()
            )));
        }
        self.cells.insert(cell.id().clone());
        let entry = MetamemoryEntry {
            stimulus_id: stimulus_id.clone(),
            cell_id: cell.id().clone(),
            reference_trace,
        };
        Ok(self.entries.entry(stimulus_id).or_insert(entry))
    }

    pub fn identify(&self, stimulus_id: &StimulusId) -> Identification<'_> {
        match self.entries.get(stimulus_id) {
            Some(e) => Identification::Hit {
                cell_id: &e.cell_id,
                reference_trace: &e.reference_trace,
            },
            None => Identification::NoEntry,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &MetamemoryEntry> {
        self.entries.values()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FokSignal {
    pub present: bool,
    pub strength: f64,
    pub assessed_at: f64,
}

/// A feeling of knowing arises when metamemory holds a reference trace but the
/// implicit loop failed to retrieve it; it is felt at the current background.
pub fn fok_assess(
    ident: Identification<'_>,
    implicit_outcome: &LoopOutcome,
    background: f64,
    t: f64,
) -> FokSignal {
    let present = ident.is_hit() && implicit_outcome.status == LoopStatus::Timeout;
    FokSignal {
        present,
        strength: if present { background } else { 0.0 },
        assessed_at: t,
    }
}
