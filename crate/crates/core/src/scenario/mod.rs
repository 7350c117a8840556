//! Scenario configs, the episode runner, event logs, summaries and sweeps.

pub mod builtin;
pub mod checks;
mod config;
mod engine;
mod event;
mod summary;
mod sweep;

pub use config::{
    CategorySpec, CellSpec, EpisodeSpec, HintSpec, MetamemorySpec, ScenarioConfig, StimulusSpec,
};
pub use engine::{reachable_kinds, run_scenario, KEEP_SEARCHING};
pub use event::{Event, EventKind, EventLog, SimTime};
pub use summary::{summarize, summarize_jsonl, EpisodeSummary, Summary, SummaryReport};
pub use sweep::{sweep, Grid, SeedScheme, SweepParam, SweepRow, SweepTable};
