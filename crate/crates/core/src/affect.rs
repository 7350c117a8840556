//! Emotional stimulus recognition, the hormonal background and the two
//! behavioral pathways.
//!
//! Recognition runs the perceived cue against a bank of emotional memory
//! cells. A recognized stimulus immediately starts an [`EmotionalState`] whose
//! background `b(t)` decays exponentially, and triggers a stereotyped fast
//! action. The slow planned action only follows a conscious event (a feeling
//! of knowing or an explicit recall). The background never gates either
//! pathway; it only scales cue quality, FOK strength and consolidation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, check_unit, Error, Result};
use crate::memory::{retrieve, CellId, Cue, MemoryCell};
use crate::metamemory::FokSignal;
use crate::recall::{LoopOutcome, LoopStatus};

/// Default latency of the fast stereotyped pathway, in seconds.
pub const DEFAULT_T_FAST: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CategoryId(pub String);

impl fmt::Display for CategoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmotionalCategory {
    pub category_id: CategoryId,
    pub stereotyped_action: String,
    pub innate: bool,
}

/// Parameters of the hormonal response for one category.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HormonalParams {
    pub b0: f64,
    pub tau_b: f64,
}

impl HormonalParams {
    pub fn new(b0: f64, tau_b: f64) -> Result<Self> {
        check_unit("b0", b0)?;
        check_positive("tau_b", tau_b)?;
        Ok(Self { b0, tau_b })
    }
}

/// Emotional background started by a hormonal response.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionalState {
    pub b0: f64,
    pub tau_b: f64,
    pub onset: f64,
    pub category: EmotionalCategory,
}

impl EmotionalState {
    /// `b0 * exp(-(t - onset) / tau_b)`; zero before onset.
    pub fn background(&self, t: f64) -> f64 {
        if t < self.onset {
            0.0
        } else {
            self.b0 * (-(t - self.onset) / self.tau_b).exp()
        }
    }
}

/// Background of an optional state, zero when no emotion is active.
pub fn background_at(state: Option<&EmotionalState>, t: f64) -> f64 {
    state.map_or(0.0, |s| s.background(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pathway {
    /// Chain 1-2-3-4: implicit memory, hormonal response, stereotyped action.
    FastStereotyped,
    /// Chain 1-2-3-5-6-7: cognitive response, declarative memory, planned action.
    SlowPlanned,
}

impl Pathway {
    pub fn chain(&self) -> &'static str {
        match self {
            Pathway::FastStereotyped => "1-2-3-4",
            Pathway::SlowPlanned => "1-2-3-5-6-7",
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Pathway::FastStereotyped => "fast_stereotyped",
            Pathway::SlowPlanned => "slow_planned",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub label: String,
    pub pathway: Pathway,
    pub t_emitted: f64,
    /// Seconds from stimulus onset.
    pub latency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Recognition {
    Recognized {
        category: EmotionalCategory,
        cell_id: CellId,
        overlap: i64,
    },
    Unrecognized,
}

impl Recognition {
    pub fn category(&self) -> Option<&EmotionalCategory> {
        match self {
            Recognition::Recognized { category, .. } => Some(category),
            Recognition::Unrecognized => None,
        }
    }
}

/// Picks the category whose cell recalls with the largest overlap; ties go to
/// the lowest cell id.
pub fn classify_stimulus(
    cell_bank: &[(MemoryCell, EmotionalCategory)],
    stimulus_cue: &Cue,
) -> Result<Recognition> {
    let mut best: Option<(&MemoryCell, &EmotionalCategory, i64)> = None;
    for (cell, category) in cell_bank {
        let out = retrieve(cell, stimulus_cue)?;
        if !out.is_recalled() {
            continue;
        }
        let better = match best {
            None => true,
            Some((b_cell, _, b_overlap)) => {
                out.overlap > b_overlap || (out.overlap == b_overlap && cell.id() < b_cell.id())
            }
        };
        if better {
            best = Some((cell, category, out.overlap));
        }
    }
    Ok(match best {
        Some((cell, category, overlap)) => Recognition::Recognized {
            category: category.clone(),
            cell_id: cell.id().clone(),
            overlap,
        },
        None => Recognition::Unrecognized,
    })
}

/// Starts the emotional background at `t` with no latency.
pub fn trigger_hormonal_response(
    recognition: &Recognition,
    t: f64,
    params: HormonalParams,
) -> Result<EmotionalState> {
    let category = recognition.category().ok_or_else(|| {
        Error::Contract("hormonal response requires a recognized emotional stimulus".into())
    })?;
    let params = HormonalParams::new(params.b0, params.tau_b)?;
    Ok(EmotionalState {
        b0: params.b0,
        tau_b: params.tau_b,
        onset: t,
        category: category.clone(),
    })
}

/// The stereotyped action of the recognized category, emitted `t_fast` after
/// the stimulus. Unrecognized stimuli produce nothing.
pub fn fast_behavior(recognition: &Recognition, t_stimulus: f64, t_fast: f64) -> Option<Action> {
    recognition.category().map(|category| Action {
        label: category.stereotyped_action.clone(),
        pathway: Pathway::FastStereotyped,
        t_emitted: t_stimulus + t_fast,
        latency: t_fast,
    })
}

/// Attention boost of cue quality: `p + g * b * (1 - p)`.
pub fn modulate_cue(p_base: f64, b: f64, g: f64) -> Result<f64> {
    check_unit("p_base", p_base)?;
    check_unit("b", b)?;
    check_unit("g", g)?;
    Ok((p_base + g * b * (1.0 - p_base)).clamp(p_base, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Consolidation {
    pub cell_id: CellId,
    pub p_before: f64,
    pub p_after: f64,
}

/// Raises the baseline cue quality of future episodes by `delta_c * b`. The
/// stored trace is left untouched.
pub fn consolidate(
    cell: &MemoryCell,
    _recall: &LoopOutcome,
    p_base: f64,
    b: f64,
    delta_c: f64,
) -> Result<Consolidation> {
    check_unit("p_base", p_base)?;
    check_unit("b", b)?;
    if !(delta_c >= 0.0 && delta_c.is_finite()) {
        return Err(Error::Range {
            name: "delta_c",
            value: delta_c,
            expected: "delta_c >= 0",
        });
    }
    Ok(Consolidation {
        cell_id: cell.id().clone(),
        p_before: p_base,
        p_after: (p_base + delta_c * b).min(1.0),
    })
}

/// What made the slow pathway conscious for a stimulus.
#[derive(Debug, Clone, Copy)]
pub enum ConsciousTrigger<'a> {
    Fok(&'a FokSignal),
    Recall(&'a LoopOutcome),
}

/// A planned action. Requires a felt FOK or an explicit recall, and happens
/// strictly after the implicit deadline of the stimulus.
pub fn slow_behavior(
    trigger: ConsciousTrigger<'_>,
    plan: &str,
    t: f64,
    onset: f64,
    implicit_deadline: f64,
) -> Result<Action> {
    let triggered_at = match trigger {
        ConsciousTrigger::Fok(fok) if fok.present => fok.assessed_at,
        ConsciousTrigger::Recall(outcome) if outcome.status == LoopStatus::RecalledExplicit => {
            outcome.t_end
        }
        _ => {
            return Err(Error::Contract(
                "slow behavior needs a felt FOK or an explicit recall".into(),
            ))
        }
    };
    if t <= implicit_deadline || t < triggered_at {
        return Err(Error::Contract(format!(
            "slow action at t={t} must follow the implicit deadline {implicit_deadline} \
             and its trigger at {triggered_at}"
        )));
    }
    Ok(Action {
        label: plan.to_owned(),
        pathway: Pathway::SlowPlanned,
        t_emitted: t,
        latency: t - onset,
    })
}
