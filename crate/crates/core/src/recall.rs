//! Implicit and explicit recall loops.
//!
//! Both loops retry retrieval at a fixed frequency `f`. Attempt `k` happens at
//! exactly `t_start + k / f` and draws a brand-new cue from its own random
//! stream. The implicit loop gives up after `floor(f * t0)` attempts; the
//! explicit loop only runs after such a timeout and, before each attempt,
//! folds in the hints received so far and the attention boost of the current
//! emotional background.

use serde::{Deserialize, Serialize};

use crate::affect::{background_at, modulate_cue, EmotionalState};
use crate::error::{check_positive, check_unit, Error, Result};
use crate::memory::{make_cue, retrieve, CueSpec, MemoryCell};
use crate::rng::AttemptStreams;

/// Default explicit-phase deadline: one simulated day.
pub const DEFAULT_T_EXPLICIT_MAX: f64 = 86_400.0;

// Absorbs representation error in products like 10.0 * 0.3 before flooring.
const FLOOR_SLACK: f64 = 1e-9;

/// Number of attempts made in `[0, t)` at frequency `f`.
pub fn attempt_count(f: f64, t: f64) -> u64 {
    (f * t + FLOOR_SLACK).floor().max(0.0) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopConfig {
    f: f64,
    t0: f64,
    t_explicit_max: f64,
}

impl LoopConfig {
    pub fn new(f: f64, t0: f64, t_explicit_max: f64) -> Result<Self> {
        check_positive("f", f)?;
        check_positive("t0", t0)?;
        if !(t_explicit_max >= 0.0 && t_explicit_max.is_finite()) {
            return Err(Error::Range {
                name: "t_explicit_max",
                value: t_explicit_max,
                expected: "t_explicit_max >= 0",
            });
        }
        if attempt_count(f, t0) < 1 {
            return Err(Error::Range {
                name: "t0",
                value: t0,
                expected: "f * t0 >= 1 (at least one implicit attempt)",
            });
        }
        Ok(Self {
            f,
            t0,
            t_explicit_max,
        })
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t_explicit_max(&self) -> f64 {
        self.t_explicit_max
    }

    pub fn period(&self) -> f64 {
        1.0 / self.f
    }

    pub fn implicit_attempts(&self) -> u64 {
        attempt_count(self.f, self.t0)
    }

    pub fn explicit_attempts(&self) -> u64 {
        attempt_count(self.f, self.t_explicit_max)
    }

    /// Time of attempt `k` of a loop started at `t_start`.
    pub fn attempt_time(&self, t_start: f64, k: u64) -> f64 {
        t_start + k as f64 / self.f
    }
}

/// External information arriving at absolute time `at`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hint {
    pub at: f64,
    pub delta_p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopStatus {
    RecalledImplicit,
    RecalledExplicit,
    Timeout,
}

impl LoopStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            LoopStatus::RecalledImplicit => "recalled_implicit",
            LoopStatus::RecalledExplicit => "recalled_explicit",
            LoopStatus::Timeout => "timeout",
        }
    }

    pub fn is_recalled(&self) -> bool {
        !matches!(self, LoopStatus::Timeout)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopOutcome {
    pub status: LoopStatus,
    pub t_end: f64,
    pub attempts: u64,
    /// Cue quality used by each attempt, in order.
    pub p_trajectory: Vec<f64>,
}

/// One retrieval attempt as seen by a [`LoopObserver`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttemptRecord {
    pub index: u64,
    pub t: f64,
    pub p: f64,
    pub overlap: i64,
    pub recalled: bool,
}

/// Receives loop activity as it happens. Used by the scenario runner to log.
pub trait LoopObserver {
    fn on_attempt(&mut self, _attempt: &AttemptRecord) {}
    /// A hint is first used by the attempt at time `applied_at`.
    fn on_hint(&mut self, _hint: &Hint, _applied_at: f64, _p_after: f64) {}
}

impl LoopObserver for () {}

pub fn run_implicit_loop(
    cell: &MemoryCell,
    spec: CueSpec,
    cfg: &LoopConfig,
    streams: &impl AttemptStreams,
    t_start: f64,
    observer: &mut impl LoopObserver,
) -> Result<LoopOutcome> {
    let cfg = LoopConfig::new(cfg.f, cfg.t0, cfg.t_explicit_max)?;
    let mut p_trajectory = Vec::new();
    for k in 0..cfg.implicit_attempts() {
        let t = cfg.attempt_time(t_start, k);
        let cue = make_cue(cell.trace(), spec, &mut streams.attempt(k));
        let out = retrieve(cell, &cue)?;
        p_trajectory.push(spec.p());
        observer.on_attempt(&AttemptRecord {
            index: k,
            t,
            p: spec.p(),
            overlap: out.overlap,
            recalled: out.is_recalled(),
        });
        if out.is_recalled() {
            return Ok(LoopOutcome {
                status: LoopStatus::RecalledImplicit,
                t_end: t,
                attempts: k + 1,
                p_trajectory,
            });
        }
    }
    Ok(LoopOutcome {
        status: LoopStatus::Timeout,
        t_end: t_start + cfg.t0,
        attempts: p_trajectory.len() as u64,
        p_trajectory,
    })
}

/// Inputs of the explicit loop besides the cell and the random streams.
#[derive(Debug, Clone, Copy)]
pub struct ExplicitContext<'a> {
    pub spec: CueSpec,
    pub cfg: &'a LoopConfig,
    pub hints: &'a [Hint],
    pub affect: Option<&'a EmotionalState>,
    /// Attention gain `g`.
    pub gain: f64,
    /// Outcome of the implicit loop this one continues.
    pub after: &'a LoopOutcome,
}

pub fn run_explicit_loop(
    cell: &MemoryCell,
    ctx: ExplicitContext<'_>,
    streams: &impl AttemptStreams,
    t_start: f64,
    observer: &mut impl LoopObserver,
) -> Result<LoopOutcome> {
    if ctx.after.status != LoopStatus::Timeout {
        return Err(Error::Contract(
            "the explicit loop only runs after an implicit timeout".into(),
        ));
    }
    check_unit("g", ctx.gain)?;
    let cfg = LoopConfig::new(ctx.cfg.f, ctx.cfg.t0, ctx.cfg.t_explicit_max)?;
    for (i, h) in ctx.hints.iter().enumerate() {
        if h.at.is_nan() || h.at < t_start {
            return Err(Error::config(
                format!("hints[{i}].at"),
                format!(
                    "hint at {} precedes the explicit phase start {t_start}",
                    h.at
                ),
            ));
        }
        if !(h.delta_p >= 0.0 && h.delta_p.is_finite()) {
            return Err(Error::config(
                format!("hints[{i}].delta_p"),
                format!("delta_p must be >= 0, got {}", h.delta_p),
            ));
        }
    }

    let p_base = ctx.spec.p();
    let mut applied = vec![false; ctx.hints.len()];
    let mut p_trajectory = Vec::new();
    for k in 0..cfg.explicit_attempts() {
        let t = cfg.attempt_time(t_start, k);
        let hint_sum: f64 = ctx
            .hints
            .iter()
            .filter(|h| h.at <= t)
            .map(|h| h.delta_p)
            .sum();
        let p_hinted = (p_base + hint_sum).min(1.0);
        let p = modulate_cue(p_hinted, background_at(ctx.affect, t), ctx.gain)?;
        for (h, done) in ctx.hints.iter().zip(applied.iter_mut()) {
            if !*done && h.at <= t {
                *done = true;
                observer.on_hint(h, t, p_hinted);
            }
        }
        let cue = make_cue(cell.trace(), ctx.spec.with_p(p)?, &mut streams.attempt(k));
        let out = retrieve(cell, &cue)?;
        p_trajectory.push(p);
        observer.on_attempt(&AttemptRecord {
            index: k,
            t,
            p,
            overlap: out.overlap,
            recalled: out.is_recalled(),
        });
        if out.is_recalled() {
            return Ok(LoopOutcome {
                status: LoopStatus::RecalledExplicit,
                t_end: t,
                attempts: k + 1,
                p_trajectory,
            });
        }
    }
    Ok(LoopOutcome {
        status: LoopStatus::Timeout,
        t_end: t_start + cfg.t_explicit_max,
        attempts: p_trajectory.len() as u64,
        p_trajectory,
    })
}

/// Probability of at least one success in `floor(f * t_deadline)` independent
/// attempts.
pub fn loop_success_probability(p_single: f64, f: f64, t_deadline: f64) -> Result<f64> {
    check_unit("p_single", p_single)?;
    check_positive("f", f)?;
    check_positive("t_deadline", t_deadline)?;
    let n = attempt_count(f, t_deadline);
    Ok(1.0 - (1.0 - p_single).powf(n as f64))
}
