//! Discrete-time stochastic model of emotions and feelings built on a
//! probabilistic single-trace associative memory.
//!
//! * [`memory`]: traces, damaged cues, the memory cell and its exact recall
//!   probability with an enumeration oracle.
//! * [`metamemory`]: reference-trace registry and the feeling of knowing.
//! * [`recall`]: the implicit and explicit retrieval loops.
//! * [`affect`]: stimulus recognition, emotional background and the fast and
//!   slow behavioral pathways.
//! * [`scenario`]: config-driven runs, JSON Lines event logs, summaries and
//!   parameter sweeps.

pub mod affect;
pub mod error;
pub mod memory;
pub mod metamemory;
pub mod recall;
pub mod rng;
pub mod scenario;

pub use affect::{
    classify_stimulus, consolidate, fast_behavior, modulate_cue, slow_behavior,
    trigger_hormonal_response, Action, CategoryId, ConsciousTrigger, EmotionalCategory,
    EmotionalState, HormonalParams, Pathway, Recognition,
};
pub use error::{Error, Result};
pub use memory::{
    make_cue, recall_probability, recall_probability_enum, retrieve, store_trace, CellId, Cue,
    CueSpec, MemoryCell, NoiseModel, RetrievalOutcome, RetrievalStatus, Trace,
};
pub use metamemory::{fok_assess, FokSignal, Identification, Metamemory, StimulusId};
pub use recall::{
    loop_success_probability, run_explicit_loop, run_implicit_loop, ExplicitContext, Hint,
    LoopConfig, LoopOutcome, LoopStatus,
};
pub use scenario::{
    reachable_kinds, run_scenario, summarize, summarize_jsonl, sweep, Event, EventKind, EventLog,
    Grid, ScenarioConfig, SeedScheme, SimTime, Summary, SweepParam, SweepTable,
};
