//! Episode runner.
//!
//! Episodes are simulated in onset order. Each one walks both chains: the
//! percept is classified against the emotional bank (block 2); a recognized
//! stimulus starts the hormonal background (3) and the stereotyped action (4);
//! the target trace is then sought by the implicit loop, and on a timeout with
//! a metamemory hit the feeling of knowing becomes conscious and the explicit
//! loop (5, 6) runs until recall or its deadline, ending in a planned action
//! (7) and consolidation. Events of all episodes are merged by
//! `(time, episode, causal sequence)`.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};

use crate::affect::{
    background_at, classify_stimulus, consolidate, fast_behavior, slow_behavior,
    trigger_hormonal_response, Action, ConsciousTrigger, EmotionalState, Recognition,
};
use crate::error::Result;
use crate::memory::{make_cue, CueSpec};
use crate::metamemory::fok_assess;
use crate::recall::{
    run_explicit_loop, run_implicit_loop, AttemptRecord, ExplicitContext, Hint, LoopObserver,
    LoopStatus,
};
use crate::rng::{phase, stream, KeyedStreams};

use super::config::{ResolvedStimulus, ScenarioConfig, World};
use super::event::{Event, EventKind, EventLog, SimTime};

/// Plan label of the slow action taken when the explicit phase runs out.
pub const KEEP_SEARCHING: &str = "keep_searching";

struct EpisodeLog {
    episode: u64,
    stimulus: String,
    events: Vec<Event>,
}

impl EpisodeLog {
    fn emit(&mut self, t: f64, kind: EventKind, fields: Value) {
        let mut payload = Map::new();
        payload.insert("episode".into(), json!(self.episode));
        payload.insert("stimulus".into(), json!(self.stimulus));
        if let Value::Object(extra) = fields {
            payload.extend(extra);
        }
        self.events.push(Event {
            t: SimTime::from_secs(t),
            kind,
            payload,
        });
    }

    fn action(&mut self, kind: EventKind, action: &Action) {
        self.emit(
            action.t_emitted,
            kind,
            json!({
                "label": action.label,
                "pathway": action.pathway.as_str(),
                "chain": action.pathway.chain(),
                "latency": action.latency,
            }),
        );
    }
}

struct LoopLogger<'a> {
    log: &'a mut EpisodeLog,
    kind: EventKind,
}

impl LoopObserver for LoopLogger<'_> {
    fn on_attempt(&mut self, a: &AttemptRecord) {
        self.log.emit(
            a.t,
            self.kind,
            json!({ "attempt": a.index, "p": a.p, "overlap": a.overlap, "hit": a.recalled }),
        );
    }

    fn on_hint(&mut self, hint: &Hint, applied_at: f64, p_after: f64) {
        self.log.emit(
            hint.at,
            EventKind::HintApplied,
            json!({ "delta_p": hint.delta_p, "applied_at": applied_at, "p_hinted": p_after }),
        );
    }
}

/// Consolidation gains per stimulus: `(time it becomes effective, gain)`.
type Gains = BTreeMap<String, Vec<(f64, f64)>>;

pub fn run_scenario(config: &ScenarioConfig) -> Result<EventLog> {
    let world = config.resolve()?;
    let mut gains = Gains::new();
    let mut tagged = Vec::new();
    for (idx, ep) in config.episodes.iter().enumerate() {
        let stim = &world.stimuli[&ep.stimulus];
        let log = run_episode(
            config,
            &world,
            idx,
            stim,
            ep.at,
            ep.p_base,
            ep.duration,
            &mut gains,
        )?;
        tagged.extend(
            log.events
                .into_iter()
                .enumerate()
                .map(|(seq, e)| ((e.t, idx, seq), e)),
        );
    }
    tagged.sort_by_key(|(key, _)| *key);
    Ok(EventLog::new(tagged.into_iter().map(|(_, e)| e).collect()))
}

#[allow(clippy::too_many_arguments)]
fn run_episode(
    config: &ScenarioConfig,
    world: &World,
    idx: usize,
    stim: &ResolvedStimulus,
    onset: f64,
    configured_p: f64,
    duration: f64,
    gains: &mut Gains,
) -> Result<EpisodeLog> {
    let mut log = EpisodeLog {
        episode: idx as u64,
        stimulus: stim.id.0.clone(),
        events: Vec::new(),
    };
    let e = idx as u64;
    let gain: f64 = gains
        .get(&stim.id.0)
        .map(|g| g.iter().filter(|(t, _)| *t <= onset).map(|(_, d)| d).sum())
        .unwrap_or(0.0);
    let p_base = (configured_p + gain).min(1.0);

    log.emit(
        onset,
        EventKind::StimulusOn,
        json!({ "p_base": p_base, "duration": duration, "target": stim.target.id().0 }),
    );
    log.emit(onset + duration, EventKind::StimulusOff, json!({}));

    // block 2: recognition of the percept
    let percept_spec = CueSpec::new(config.noise_model, stim.percept_p)?;
    let percept_cue = make_cue(
        stim.percept.trace(),
        percept_spec,
        &mut stream(config.seed, &[e, phase::PERCEPT]),
    );
    let recognition = classify_stimulus(&world.bank, &percept_cue)?;
    match &recognition {
        Recognition::Recognized {
            category,
            cell_id,
            overlap,
        } => log.emit(
            onset,
            EventKind::Classified,
            json!({ "recognized": true, "category": category.category_id.0, "cell": cell_id.0, "overlap": overlap }),
        ),
        Recognition::Unrecognized => {
            log.emit(onset, EventKind::Classified, json!({ "recognized": false }))
        }
    }

    // blocks 3 and 4
    let affect: Option<EmotionalState> = match recognition.category() {
        Some(category) => {
            let params = world.hormonal[&category.category_id];
            let state = trigger_hormonal_response(&recognition, onset, params)?;
            log.emit(
                onset,
                EventKind::HormonalOnset,
                json!({ "category": category.category_id.0, "b0": state.b0, "tau_b": state.tau_b }),
            );
            if let Some(action) = fast_behavior(&recognition, onset, config.t_fast) {
                log.action(EventKind::FastAction, &action);
            }
            Some(state)
        }
        None => None,
    };
    let b = |t: f64| background_at(affect.as_ref(), t);

    let spec = CueSpec::new(config.noise_model, p_base)?;
    let implicit = run_implicit_loop(
        &stim.target,
        spec,
        &world.loop_cfg,
        &KeyedStreams::new(config.seed, &[e, phase::IMPLICIT]),
        onset,
        &mut LoopLogger {
            log: &mut log,
            kind: EventKind::ImplicitAttempt,
        },
    )?;
    if implicit.status == LoopStatus::RecalledImplicit {
        log.emit(
            implicit.t_end,
            EventKind::Recalled,
            json!({
                "status": implicit.status.as_str(),
                "attempts": implicit.attempts,
                "latency": implicit.t_end - onset,
                "b": b(implicit.t_end),
            }),
        );
        return Ok(log);
    }
    let deadline = implicit.t_end;
    log.emit(
        deadline,
        EventKind::ImplicitTimeout,
        json!({ "attempts": implicit.attempts }),
    );

    let fok = fok_assess(
        world.metamemory.identify(&stim.id),
        &implicit,
        b(deadline),
        deadline,
    );
    if !fok.present {
        return Ok(log);
    }
    log.emit(
        deadline,
        EventKind::Fok,
        json!({ "present": true, "strength": fok.strength }),
    );

    // blocks 5 and 6
    let explicit = run_explicit_loop(
        &stim.target,
        ExplicitContext {
            spec,
            cfg: &world.loop_cfg,
            hints: &world.episode_hints[idx],
            affect: affect.as_ref(),
            gain: config.g,
            after: &implicit,
        },
        &KeyedStreams::new(config.seed, &[e, phase::EXPLICIT]),
        deadline,
        &mut LoopLogger {
            log: &mut log,
            kind: EventKind::ExplicitAttempt,
        },
    )?;
    let resolved_at = explicit.t_end;
    let slow = if explicit.status == LoopStatus::RecalledExplicit {
        log.emit(
            resolved_at,
            EventKind::Recalled,
            json!({
                "status": explicit.status.as_str(),
                "attempts": implicit.attempts + explicit.attempts,
                "latency": resolved_at - onset,
                "b": b(resolved_at),
            }),
        );
        slow_behavior(
            ConsciousTrigger::Recall(&explicit),
            &stim.plan,
            resolved_at + config.t_slow,
            onset,
            deadline,
        )?
    } else {
        slow_behavior(
            ConsciousTrigger::Fok(&fok),
            KEEP_SEARCHING,
            resolved_at + config.t_slow,
            onset,
            deadline,
        )?
    };
    log.action(EventKind::SlowAction, &slow);

    let c = consolidate(
        &stim.target,
        &explicit,
        p_base,
        b(resolved_at),
        config.delta_c,
    )?;
    log.emit(
        slow.t_emitted,
        EventKind::Consolidated,
        json!({ "p_before": c.p_before, "p_after": c.p_after, "cell": c.cell_id.0 }),
    );
    gains
        .entry(stim.id.0.clone())
        .or_default()
        .push((slow.t_emitted, c.p_after - c.p_before));
    Ok(log)
}

/// Event kinds the chains can produce for episode `episode` of `config`,
/// ignoring probabilities. Emotional intensities (`b0`, `tau_b`, `g`) do not
/// enter: mood scales what happens on a path but never opens or closes one.
pub fn reachable_kinds(config: &ScenarioConfig, episode: usize) -> Result<BTreeSet<EventKind>> {
    let world = config.resolve()?;
    let ep = config
        .episodes
        .get(episode)
        .ok_or_else(|| crate::error::Error::config("episode", format!("no episode {episode}")))?;
    let stim = &world.stimuli[&ep.stimulus];
    let mut kinds = BTreeSet::from([
        EventKind::StimulusOn,
        EventKind::StimulusOff,
        EventKind::Classified,
        EventKind::ImplicitAttempt,
        EventKind::Recalled,
        EventKind::ImplicitTimeout,
    ]);
    if !world.bank.is_empty() {
        kinds.extend([EventKind::HormonalOnset, EventKind::FastAction]);
    }
    if world.metamemory.identify(&stim.id).is_hit() {
        kinds.extend([
            EventKind::Fok,
            EventKind::SlowAction,
            EventKind::Consolidated,
        ]);
        if world.loop_cfg.explicit_attempts() > 0 {
            kinds.insert(EventKind::ExplicitAttempt);
            if !world.episode_hints[episode].is_empty() {
                kinds.insert(EventKind::HintApplied);
            }
        }
    }
    Ok(kinds)
}
