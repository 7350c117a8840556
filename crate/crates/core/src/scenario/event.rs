use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Simulation time in whole microseconds, the resolution of the event log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimTime(i64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub fn from_secs(secs: f64) -> Self {
        SimTime((secs * 1e6).round() as i64)
    }

    pub fn from_micros(micros: i64) -> Self {
        SimTime(micros)
    }

    pub fn micros(&self) -> i64 {
        self.0
    }

    pub fn secs(&self) -> f64 {
        self.0 as f64 / 1e6
    }

    /// Seconds elapsed since `earlier`, computed exactly on microseconds.
    pub fn since(&self, earlier: SimTime) -> f64 {
        SimTime(self.0 - earlier.0).secs()
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:06}", abs / 1_000_000, abs % 1_000_000)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    StimulusOn,
    StimulusOff,
    Classified,
    HormonalOnset,
    FastAction,
    ImplicitAttempt,
    ImplicitTimeout,
    Fok,
    ExplicitAttempt,
    HintApplied,
    Recalled,
    SlowAction,
    Consolidated,
}

impl EventKind {
    pub const ALL: [EventKind; 13] = [
        EventKind::StimulusOn,
        EventKind::StimulusOff,
        EventKind::Classified,
        EventKind::HormonalOnset,
        EventKind::FastAction,
        EventKind::ImplicitAttempt,
        EventKind::ImplicitTimeout,
        EventKind::Fok,
        EventKind::ExplicitAttempt,
        EventKind::HintApplied,
        EventKind::Recalled,
        EventKind::SlowAction,
        EventKind::Consolidated,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::StimulusOn => "stimulus_on",
            EventKind::StimulusOff => "stimulus_off",
            EventKind::Classified => "classified",
            EventKind::HormonalOnset => "hormonal_onset",
            EventKind::FastAction => "fast_action",
            EventKind::ImplicitAttempt => "implicit_attempt",
            EventKind::ImplicitTimeout => "implicit_timeout",
            EventKind::Fok => "fok",
            EventKind::ExplicitAttempt => "explicit_attempt",
            EventKind::HintApplied => "hint_applied",
            EventKind::Recalled => "recalled",
            EventKind::SlowAction => "slow_action",
            EventKind::Consolidated => "consolidated",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        EventKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown event kind `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub t: SimTime,
    pub kind: EventKind,
    pub payload: Map<String, Value>,
}

impl Event {
    pub fn stimulus(&self) -> Option<&str> {
        self.payload.get("stimulus").and_then(Value::as_str)
    }

    pub fn episode(&self) -> Option<u64> {
        self.payload.get("episode").and_then(Value::as_u64)
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.payload.get(key).and_then(Value::as_f64)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.payload.get(key).and_then(Value::as_str)
    }

    pub fn get_bool(&self, key: &str) -> Option<bool> {
        self.payload.get(key).and_then(Value::as_bool)
    }

    /// One JSON object without the trailing newline. `t` is written with
    /// exactly six decimals.
    pub fn to_json_line(&self) -> String {
        let kind = Value::String(self.kind.as_str().to_owned());
        let payload = Value::Object(self.payload.clone());
        format!("{{\"t\":{},\"kind\":{kind},\"payload\":{payload}}}", self.t)
    }

    pub fn from_json_line(line: &str) -> std::result::Result<Self, String> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            t: f64,
            kind: String,
            payload: Map<String, Value>,
        }
        let raw: Raw = serde_json::from_str(line).map_err(|e| e.to_string())?;
        if !raw.t.is_finite() {
            return Err("non-finite timestamp".into());
        }
        Ok(Event {
            t: SimTime::from_secs(raw.t),
            kind: raw.kind.parse()?,
            payload: raw.payload,
        })
    }
}

/// Events in their total order (time, then causal sequence).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventLog {
    pub events: Vec<Event>,
}

impl EventLog {
    pub fn new(events: Vec<Event>) -> Self {
        Self { events }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Event> {
        self.events.iter()
    }

    pub fn of_kind(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    /// Events of one episode, in log order.
    pub fn episode(&self, episode: u64) -> impl Iterator<Item = &Event> {
        self.events
            .iter()
            .filter(move |e| e.episode() == Some(episode))
    }

    pub fn write_jsonl(&self, mut out: impl Write) -> Result<()> {
        for e in &self.events {
            writeln!(out, "{}", e.to_json_line())?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for e in &self.events {
            s.push_str(&e.to_json_line());
            s.push('\n');
        }
        s
    }

    /// Parses JSON Lines; blank lines are skipped, errors carry the 1-based line number.
    pub fn read_jsonl(input: impl BufRead) -> Result<Self> {
        let mut events = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let event = Event::from_json_line(&line).map_err(|message| Error::Parse {
                line: i + 1,
                message,
            })?;
            events.push(event);
        }
        Ok(Self { events })
    }

    pub fn concat(logs: impl IntoIterator<Item = EventLog>) -> Self {
        Self {
            events: logs.into_iter().flat_map(|l| l.events).collect(),
        }
    }
}
