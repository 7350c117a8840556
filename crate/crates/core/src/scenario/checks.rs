//! Consistency checks over event logs. Each returns human-readable violations;
//! an empty vector means the log is consistent.

use std::collections::BTreeMap;

use super::config::ScenarioConfig;
use super::event::{EventKind, EventLog};

type EpisodeKey = (String, u64);

/// Positions of each event kind per episode, in log order.
fn positions(log: &EventLog) -> BTreeMap<EpisodeKey, BTreeMap<EventKind, Vec<usize>>> {
    let mut map: BTreeMap<EpisodeKey, BTreeMap<EventKind, Vec<usize>>> = BTreeMap::new();
    for (i, e) in log.iter().enumerate() {
        if let (Some(s), Some(ep)) = (e.stimulus(), e.episode()) {
            map.entry((s.to_owned(), ep))
                .or_default()
                .entry(e.kind)
                .or_default()
                .push(i);
        }
    }
    map
}

/// Time order plus the causal constraints between event kinds:
/// `classified < hormonal_onset <= fast_action`, `implicit_timeout < fok`,
/// `fok <= first explicit_attempt`, `recalled < slow_action <= consolidated`,
/// and at least one attempt before every `recalled`.
pub fn causal_violations(log: &EventLog) -> Vec<String> {
    let mut out = Vec::new();
    for (i, w) in log.events.windows(2).enumerate() {
        if w[1].t < w[0].t {
            out.push(format!("line {} goes back in time", i + 2));
        }
    }
    for ((stim, ep), kinds) in positions(log) {
        let first = |k: EventKind| kinds.get(&k).and_then(|v| v.first().copied());
        let before = |a: EventKind, b: EventKind, out: &mut Vec<String>| {
            if let (Some(x), Some(y)) = (first(a), first(b)) {
                if x >= y {
                    out.push(format!("{stim}#{ep}: {a} must precede {b}"));
                }
            } else if first(b).is_some() {
                out.push(format!("{stim}#{ep}: {b} without {a}"));
            }
        };
        before(EventKind::Classified, EventKind::HormonalOnset, &mut out);
        before(EventKind::HormonalOnset, EventKind::FastAction, &mut out);
        before(EventKind::ImplicitTimeout, EventKind::Fok, &mut out);
        before(EventKind::Fok, EventKind::ExplicitAttempt, &mut out);
        before(EventKind::SlowAction, EventKind::Consolidated, &mut out);
        if let (Some(r), Some(s)) = (first(EventKind::Recalled), first(EventKind::SlowAction)) {
            if r >= s {
                out.push(format!("{stim}#{ep}: recalled must precede slow_action"));
            }
        }
        if let Some(r) = first(EventKind::Recalled) {
            let attempted = [EventKind::ImplicitAttempt, EventKind::ExplicitAttempt]
                .iter()
                .any(|k| first(*k).is_some_and(|a| a < r));
            if !attempted {
                out.push(format!("{stim}#{ep}: recalled without a prior attempt"));
            }
        }
        for k in [
            EventKind::StimulusOn,
            EventKind::Classified,
            EventKind::Recalled,
            EventKind::Fok,
        ] {
            if kinds.get(&k).is_some_and(|v| v.len() > 1) {
                out.push(format!("{stim}#{ep}: more than one {k}"));
            }
        }
    }
    out
}

/// A `fok` event appears in an episode iff its stimulus has a metamemory
/// entry and the episode logged an `implicit_timeout`.
pub fn fok_violations(config: &ScenarioConfig, log: &EventLog) -> Vec<String> {
    let registered: Vec<&str> = config
        .metamemory
        .iter()
        .map(|m| m.stimulus.as_str())
        .collect();
    let mut out = Vec::new();
    for ((stim, ep), kinds) in positions(log) {
        let fok = kinds.contains_key(&EventKind::Fok);
        let expected =
            registered.contains(&stim.as_str()) && kinds.contains_key(&EventKind::ImplicitTimeout);
        if fok != expected {
            out.push(format!(
                "{stim}#{ep}: fok={fok} but entry&timeout={expected}"
            ));
        }
    }
    out
}
