use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::affect::{CategoryId, EmotionalCategory, HormonalParams, DEFAULT_T_FAST};
use crate::error::{Error, Result};
use crate::memory::{check_theta, store_trace, CellId, MemoryCell, NoiseModel, Trace};
use crate::metamemory::{Metamemory, StimulusId};
use crate::recall::{Hint, LoopConfig, DEFAULT_T_EXPLICIT_MAX};
use crate::rng::{phase, stream};

use super::builtin;

fn default_noise_model() -> NoiseModel {
    NoiseModel::Flip
}
fn default_t_explicit_max() -> f64 {
    DEFAULT_T_EXPLICIT_MAX
}
fn default_t_fast() -> f64 {
    DEFAULT_T_FAST
}
fn default_t_slow() -> f64 {
    0.5
}
fn default_one() -> f64 {
    1.0
}
fn default_plan() -> String {
    "act_on_recall".to_owned()
}

/// A memory cell: either an explicit bipolar vector or a seed for a random one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<i8>>,
}

/// An emotional category attached to a bank cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategorySpec {
    pub id: String,
    pub cell: String,
    pub action: String,
    #[serde(default)]
    pub innate: bool,
    pub b0: f64,
    pub tau_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StimulusSpec {
    pub id: String,
    /// Cell holding the trace to be recalled.
    pub target: String,
    /// Cell whose trace is perceived and classified; defaults to `target`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub percept: Option<String>,
    /// Cue quality of the perceived stimulus.
    #[serde(default = "default_one")]
    pub percept_p: f64,
    /// Label of the planned action after an explicit recall.
    #[serde(default = "default_plan")]
    pub plan: String,
}

/// One presentation of a stimulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpisodeSpec {
    pub at: f64,
    pub stimulus: String,
    pub p_base: f64,
    #[serde(default)]
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HintSpec {
    pub stimulus: String,
    pub at: f64,
    pub delta_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetamemorySpec {
    pub stimulus: String,
    pub cell: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub seed: u64,
    pub n: usize,
    #[serde(default = "default_noise_model")]
    pub noise_model: NoiseModel,
    #[serde(default)]
    pub theta: f64,
    pub f: f64,
    pub t0: f64,
    #[serde(default = "default_t_explicit_max")]
    pub t_explicit_max: f64,
    #[serde(default = "default_t_fast")]
    pub t_fast: f64,
    /// Planning latency of the slow pathway after its conscious trigger.
    #[serde(default = "default_t_slow")]
    pub t_slow: f64,
    #[serde(default)]
    pub g: f64,
    #[serde(default)]
    pub delta_c: f64,
    #[serde(default)]
    pub cells: Vec<CellSpec>,
    #[serde(default)]
    pub categories: Vec<CategorySpec>,
    #[serde(default)]
    pub stimuli: Vec<StimulusSpec>,
    #[serde(default)]
    pub episodes: Vec<EpisodeSpec>,
    #[serde(default)]
    pub hints: Vec<HintSpec>,
    #[serde(default)]
    pub metamemory: Vec<MetamemorySpec>,
}

/// A stimulus with its cells resolved.
#[derive(Debug, Clone)]
pub(crate) struct ResolvedStimulus {
    pub id: StimulusId,
    pub target: MemoryCell,
    pub percept: MemoryCell,
    pub percept_p: f64,
    pub plan: String,
}

/// Validated, resolved form of a config.
#[derive(Debug, Clone)]
pub(crate) struct World {
    pub loop_cfg: LoopConfig,
    pub bank: Vec<(MemoryCell, EmotionalCategory)>,
    pub hormonal: BTreeMap<CategoryId, HormonalParams>,
    pub stimuli: BTreeMap<String, ResolvedStimulus>,
    pub metamemory: Metamemory,
    /// Hints per episode index, sorted by time.
    pub episode_hints: Vec<Vec<Hint>>,
}

fn unit(field: String, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::config(field, format!("{v} is outside [0, 1]")))
    }
}

fn non_negative(field: String, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(
            field,
            format!("{v} must be a finite value >= 0"),
        ))
    }
}

fn positive(field: String, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("{v} must be > 0")))
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| format!("bytes {}..{}", s.start, s.end))
                .unwrap_or_else(|| "config".to_owned());
            Error::config(field, e.message().to_owned())
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    /// A builtin scenario name or a path to a TOML file.
    pub fn load(name_or_path: &str) -> Result<Self> {
        if let Some(cfg) = builtin::get(name_or_path) {
            return Ok(cfg);
        }
        let path = Path::new(name_or_path);
        if !path.exists() {
            return Err(Error::config(
                "config",
                format!(
                    "`{name_or_path}` is neither a file nor a builtin scenario ({})",
                    builtin::NAMES.join(", ")
                ),
            ));
        }
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.resolve().map(|_| ())
    }

    pub(crate) fn resolve(&self) -> Result<World> {
        if self.n == 0 {
            return Err(Error::config("n", "dimension must be at least 1"));
        }
        check_theta(self.theta).map_err(|e| Error::config("theta", e.to_string()))?;
        positive("f".into(), self.f)?;
        positive("t0".into(), self.t0)?;
        non_negative("t_explicit_max".into(), self.t_explicit_max)?;
        non_negative("t_fast".into(), self.t_fast)?;
        positive("t_slow".into(), self.t_slow)?;
        unit("g".into(), self.g)?;
        non_negative("delta_c".into(), self.delta_c)?;
        let loop_cfg = LoopConfig::new(self.f, self.t0, self.t_explicit_max)
            .map_err(|e| Error::config("t0", e.to_string()))?;

        let mut cells = BTreeMap::new();
        for (i, c) in self.cells.iter().enumerate() {
            let field = |name: &str| format!("cells[{i}].{name}");
            let trace = match (&c.trace_seed, &c.components) {
                (Some(seed), None) => Trace::random(self.n, &mut stream(*seed, &[phase::TRACE]))?,
                (None, Some(components)) => {
                    if components.len() != self.n {
                        return Err(Error::config(
                            field("components"),
                            format!("has {} components, n = {}", components.len(), self.n),
                        ));
                    }
                    Trace::new(components.clone())
                        .map_err(|e| Error::config(field("components"), e.to_string()))?
                }
                _ => {
                    return Err(Error::config(
                        field("trace_seed"),
                        "exactly one of trace_seed and components is required",
                    ))
                }
            };
            let cell = store_trace(c.id.as_str(), trace, self.theta)?;
            if cells.insert(c.id.clone(), cell).is_some() {
                return Err(Error::config(
                    field("id"),
                    format!("duplicate cell `{}`", c.id),
                ));
            }
        }
        let cell = |field: String, id: &str| -> Result<MemoryCell> {
            cells
                .get(id)
                .cloned()
                .ok_or_else(|| Error::config(field, format!("unknown cell `{id}`")))
        };

        let mut bank = Vec::new();
        let mut hormonal = BTreeMap::new();
        let mut bank_cells = BTreeSet::new();
        for (i, c) in self.categories.iter().enumerate() {
            let field = |name: &str| format!("categories[{i}].{name}");
            let bank_cell = cell(field("cell"), &c.cell)?;
            if !bank_cells.insert(c.cell.clone()) {
                return Err(Error::config(
                    field("cell"),
                    format!("cell `{}` already carries a category", c.cell),
                ));
            }
            unit(field("b0"), c.b0)?;
            positive(field("tau_b"), c.tau_b)?;
            let id = CategoryId(c.id.clone());
            if hormonal
                .insert(
                    id.clone(),
                    HormonalParams {
                        b0: c.b0,
                        tau_b: c.tau_b,
                    },
                )
                .is_some()
            {
                return Err(Error::config(
                    field("id"),
                    format!("duplicate category `{}`", c.id),
                ));
            }
            bank.push((
                bank_cell,
                EmotionalCategory {
                    category_id: id,
                    stereotyped_action: c.action.clone(),
                    innate: c.innate,
                },
            ));
        }

        let mut stimuli = BTreeMap::new();
        for (i, s) in self.stimuli.iter().enumerate() {
            let field = |name: &str| format!("stimuli[{i}].{name}");
            let target = cell(field("target"), &s.target)?;
            let percept = match &s.percept {
                Some(p) => cell(field("percept"), p)?,
                None => target.clone(),
            };
            unit(field("percept_p"), s.percept_p)?;
            let resolved = ResolvedStimulus {
                id: StimulusId(s.id.clone()),
                target,
                percept,
                percept_p: s.percept_p,
                plan: s.plan.clone(),
            };
            if stimuli.insert(s.id.clone(), resolved).is_some() {
                return Err(Error::config(
                    field("id"),
                    format!("duplicate stimulus `{}`", s.id),
                ));
            }
        }

        let mut last_at = 0.0f64;
        for (i, e) in self.episodes.iter().enumerate() {
            let field = |name: &str| format!("episodes[{i}].{name}");
            if !stimuli.contains_key(&e.stimulus) {
                return Err(Error::config(
                    field("stimulus"),
                    format!("unknown stimulus `{}`", e.stimulus),
                ));
            }
            non_negative(field("at"), e.at)?;
            if e.at < last_at {
                return Err(Error::config(
                    field("at"),
                    "episodes must be sorted by time",
                ));
            }
            last_at = e.at;
            unit(field("p_base"), e.p_base)?;
            non_negative(field("duration"), e.duration)?;
        }

        let mut episode_hints = vec![Vec::new(); self.episodes.len()];
        for (i, h) in self.hints.iter().enumerate() {
            let field = |name: &str| format!("hints[{i}].{name}");
            if !stimuli.contains_key(&h.stimulus) {
                return Err(Error::config(
                    field("stimulus"),
                    format!("unknown stimulus `{}`", h.stimulus),
                ));
            }
            non_negative(field("at"), h.at)?;
            non_negative(field("delta_p"), h.delta_p)?;
            let owner = self
                .episodes
                .iter()
                .enumerate()
                .rfind(|(_, e)| e.stimulus == h.stimulus && e.at <= h.at)
                .map(|(j, e)| (j, e.at));
            let Some((j, onset)) = owner else {
                return Err(Error::config(
                    field("at"),
                    format!("no episode of `{}` starts before {}", h.stimulus, h.at),
                ));
            };
            if h.at < onset + self.t0 {
                return Err(Error::config(
                    field("at"),
                    format!(
                        "hint at {} falls inside the implicit phase of episodes[{j}] \
                         (explicit recall starts at {})",
                        h.at,
                        onset + self.t0
                    ),
                ));
            }
            episode_hints[j].push(Hint {
                at: h.at,
                delta_p: h.delta_p,
            });
        }
        for hints in &mut episode_hints {
            hints.sort_by(|a, b| a.at.total_cmp(&b.at));
        }

        let mut metamemory = Metamemory::new();
        for (i, m) in self.metamemory.iter().enumerate() {
            let field = |name: &str| format!("metamemory[{i}].{name}");
            let stim = stimuli.get(&m.stimulus).ok_or_else(|| {
                Error::config(
                    field("stimulus"),
                    format!("unknown stimulus `{}`", m.stimulus),
                )
            })?;
            let c = cell(field("cell"), &m.cell)?;
            if c.id() != stim.target.id() {
                return Err(Error::Integrity(format!(
                    "metamemory[{i}]: stimulus `{}` targets cell `{}`, not `{}`",
                    m.stimulus,
                    stim.target.id(),
                    m.cell
                )));
            }
            metamemory.register(m.stimulus.as_str(), &c, c.trace().clone())?;
        }

        Ok(World {
            loop_cfg,
            bank,
            hormonal,
            stimuli,
            metamemory,
            episode_hints,
        })
    }

    pub fn cell_ids(&self) -> Vec<CellId> {
        self.cells.iter().map(|c| CellId(c.id.clone())).collect()
    }
}
