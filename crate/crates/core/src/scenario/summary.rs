use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use serde::Serialize;

use crate::error::{Error, Result};

use super::event::{EventKind, EventLog, SimTime};

/// What happened to one episode, reconstructed from its events.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeSummary {
    pub stimulus: String,
    pub episode: u64,
    pub onset_s: f64,
    #[serde(skip)]
    onset: SimTime,
    pub recall_status: Option<String>,
    pub recall_latency_s: Option<f64>,
    pub attempts: u64,
    pub fok: bool,
    pub fast_latency_s: Option<f64>,
    pub slow_latency_s: Option<f64>,
    pub b_at_recall: Option<f64>,
}

impl EpisodeSummary {
    pub fn recalled(&self) -> bool {
        self.recall_status.is_some()
    }
}

/// Pure fold over an event log. Merging summaries of logs gives the summary
/// of their concatenation.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Summary {
    pub episodes: Vec<EpisodeSummary>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl Summary {
    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }

    pub fn merge(mut self, other: Summary) -> Summary {
        self.episodes.extend(other.episodes);
        self
    }

    pub fn recalled_count(&self) -> usize {
        self.episodes.iter().filter(|e| e.recalled()).count()
    }

    /// Fraction of episodes that ended in a recall; `None` for an empty summary.
    pub fn recall_rate(&self) -> Option<f64> {
        (!self.episodes.is_empty())
            .then(|| self.recalled_count() as f64 / self.episodes.len() as f64)
    }

    pub fn mean_recall_latency(&self) -> Option<f64> {
        mean(self.episodes.iter().filter_map(|e| e.recall_latency_s))
    }

    pub fn mean_b_at_recall(&self) -> Option<f64> {
        mean(self.episodes.iter().filter_map(|e| e.b_at_recall))
    }

    pub fn by_stimulus(&self) -> BTreeMap<&str, Vec<&EpisodeSummary>> {
        let mut map: BTreeMap<&str, Vec<&EpisodeSummary>> = BTreeMap::new();
        for e in &self.episodes {
            map.entry(e.stimulus.as_str()).or_default().push(e);
        }
        map
    }

    pub fn report(&self) -> SummaryReport {
        let stimuli = self
            .by_stimulus()
            .into_iter()
            .map(|(id, eps)| {
                let n = eps.len();
                let recalled = eps.iter().filter(|e| e.recalled()).count();
                let stats = StimulusStats {
                    episodes: n,
                    recalled,
                    recall_rate: recalled as f64 / n as f64,
                    mean_recall_latency_s: mean(eps.iter().filter_map(|e| e.recall_latency_s)),
                    mean_attempts: eps.iter().map(|e| e.attempts as f64).sum::<f64>() / n as f64,
                    fok_incidence: eps.iter().filter(|e| e.fok).count() as f64 / n as f64,
                    mean_fast_latency_s: mean(eps.iter().filter_map(|e| e.fast_latency_s)),
                    mean_slow_latency_s: mean(eps.iter().filter_map(|e| e.slow_latency_s)),
                };
                (id.to_owned(), stats)
            })
            .collect();
        SummaryReport {
            stimuli,
            aggregate: AggregateStats {
                episodes: self.episodes.len(),
                recalled: self.recalled_count(),
                recall_rate: self.recall_rate(),
                mean_recall_latency_s: self.mean_recall_latency(),
                mean_b_at_recall: self.mean_b_at_recall(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StimulusStats {
    pub episodes: usize,
    pub recalled: usize,
    pub recall_rate: f64,
    pub mean_recall_latency_s: Option<f64>,
    pub mean_attempts: f64,
    pub fok_incidence: f64,
    pub mean_fast_latency_s: Option<f64>,
    pub mean_slow_latency_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateStats {
    pub episodes: usize,
    pub recalled: usize,
    pub recall_rate: Option<f64>,
    pub mean_recall_latency_s: Option<f64>,
    pub mean_b_at_recall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub stimuli: BTreeMap<String, StimulusStats>,
    pub aggregate: AggregateStats,
}

pub fn summarize(log: &EventLog) -> Result<Summary> {
    let mut episodes: Vec<EpisodeSummary> = Vec::new();
    let mut open: HashMap<(String, u64), usize> = HashMap::new();
    for (i, ev) in log.iter().enumerate() {
        let line = i + 1;
        let parse_err = |message: String| Error::Parse { line, message };
        let stimulus = ev
            .stimulus()
            .ok_or_else(|| parse_err(format!("{} event without a stimulus", ev.kind)))?;
        let episode = ev
            .episode()
            .ok_or_else(|| parse_err(format!("{} event without an episode", ev.kind)))?;
        let key = (stimulus.to_owned(), episode);
        if ev.kind == EventKind::StimulusOn {
            open.insert(key, episodes.len());
            episodes.push(EpisodeSummary {
                stimulus: stimulus.to_owned(),
                episode,
                onset_s: ev.t.secs(),
                onset: ev.t,
                recall_status: None,
                recall_latency_s: None,
                attempts: 0,
                fok: false,
                fast_latency_s: None,
                slow_latency_s: None,
                b_at_recall: None,
            });
            continue;
        }
        let idx = *open.get(&key).ok_or_else(|| {
            parse_err(format!(
                "{} event for `{stimulus}` episode {episode} before its stimulus_on",
                ev.kind
            ))
        })?;
        let rec = &mut episodes[idx];
        match ev.kind {
            EventKind::ImplicitAttempt | EventKind::ExplicitAttempt => rec.attempts += 1,
            EventKind::Fok => rec.fok = true,
            EventKind::FastAction => rec.fast_latency_s = Some(ev.t.since(rec.onset)),
            EventKind::SlowAction => rec.slow_latency_s = Some(ev.t.since(rec.onset)),
            EventKind::Recalled => {
                let status = ev
                    .get_str("status")
                    .ok_or_else(|| parse_err("recalled event without a status".into()))?;
                rec.recall_status = Some(status.to_owned());
                rec.recall_latency_s = Some(ev.t.since(rec.onset));
                rec.b_at_recall = ev.get_f64("b");
            }
            _ => {}
        }
    }
    Ok(Summary { episodes })
}

pub fn summarize_jsonl(input: impl BufRead) -> Result<Summary> {
    summarize(&EventLog::read_jsonl(input)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::event::Event;
    use serde_json::{json, Map, Value};

    fn ev(t: f64, kind: EventKind, extra: Value) -> Event {
        let mut payload = Map::new();
        payload.insert("stimulus".into(), json!("w"));
        payload.insert("episode".into(), json!(0));
        if let Value::Object(m) = extra {
            payload.extend(m);
        }
        Event {
            t: SimTime::from_secs(t),
            kind,
            payload,
        }
    }

    #[test]
    fn empty_log_gives_empty_summary() {
        let s = summarize(&EventLog::default()).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.recall_rate(), None);
        assert!(s.report().stimuli.is_empty());
    }

    #[test]
    fn recall_latency_is_a_difference() {
        let log = EventLog::new(vec![
            ev(1.0, EventKind::StimulusOn, json!({})),
            ev(1.0, EventKind::ImplicitAttempt, json!({})),
            ev(
                3.0,
                EventKind::Recalled,
                json!({"status": "recalled_implicit", "b": 0.25}),
            ),
        ]);
        let s = summarize(&log).unwrap();
        assert_eq!(s.episodes[0].recall_latency_s, Some(2.0));
        assert_eq!(s.episodes[0].attempts, 1);
        assert_eq!(s.recall_rate(), Some(1.0));
        assert_eq!(s.mean_b_at_recall(), Some(0.25));
        assert_eq!(summarize(&log).unwrap(), s);
    }

    #[test]
    fn orphan_events_are_parse_errors() {
        let log = EventLog::new(vec![ev(1.0, EventKind::Fok, json!({}))]);
        assert!(matches!(summarize(&log), Err(Error::Parse { line: 1, .. })));
    }
}
