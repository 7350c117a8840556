//! Parameter sweeps over scenario configs.
//!
//! A grid is an ordered list of parameters, each with a list of values; points
//! are the cartesian product with the first parameter varying slowest. Runs of
//! a point are seeded from the base seed, and points are simulated in parallel
//! but always reported in point order.

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::derive_seed;

use super::config::ScenarioConfig;
use super::engine::run_scenario;
use super::summary::{summarize, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    /// `p_base` of every episode.
    PBase,
    /// `delta_p` of every hint.
    DeltaP,
    /// `b0` of every category.
    B0,
    /// `tau_b` of every category.
    TauB,
    /// `percept_p` of every stimulus.
    PerceptP,
    Theta,
    F,
    T0,
    TExplicitMax,
    TFast,
    TSlow,
    G,
    DeltaC,
}

impl SweepParam {
    pub const NAMES: [&'static str; 13] = [
        "p_base",
        "delta_p",
        "b0",
        "tau_b",
        "percept_p",
        "theta",
        "f",
        "t0",
        "t_explicit_max",
        "t_fast",
        "t_slow",
        "g",
        "delta_c",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::PBase => "p_base",
            SweepParam::DeltaP => "delta_p",
            SweepParam::B0 => "b0",
            SweepParam::TauB => "tau_b",
            SweepParam::PerceptP => "percept_p",
            SweepParam::Theta => "theta",
            SweepParam::F => "f",
            SweepParam::T0 => "t0",
            SweepParam::TExplicitMax => "t_explicit_max",
            SweepParam::TFast => "t_fast",
            SweepParam::TSlow => "t_slow",
            SweepParam::G => "g",
            SweepParam::DeltaC => "delta_c",
        }
    }

    /// Returns a copy of `config` with this parameter set to `value`.
    pub fn apply(&self, config: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut c = config.clone();
        let missing = |what: &str| {
            Err(Error::config(
                self.name(),
                format!("the config has no {what} to sweep"),
            ))
        };
        match self {
            SweepParam::PBase => {
                if c.episodes.is_empty() {
                    return missing("episodes");
                }
                c.episodes.iter_mut().for_each(|e| e.p_base = value);
            }
            SweepParam::DeltaP => {
                if c.hints.is_empty() {
                    return missing("hints");
                }
                c.hints.iter_mut().for_each(|h| h.delta_p = value);
            }
            SweepParam::B0 => {
                if c.categories.is_empty() {
                    return missing("categories");
                }
                c.categories.iter_mut().for_each(|k| k.b0 = value);
            }
            SweepParam::TauB => {
                if c.categories.is_empty() {
                    return missing("categories");
                }
                c.categories.iter_mut().for_each(|k| k.tau_b = value);
            }
            SweepParam::PerceptP => {
                if c.stimuli.is_empty() {
                    return missing("stimuli");
                }
                c.stimuli.iter_mut().for_each(|s| s.percept_p = value);
            }
            SweepParam::Theta => c.theta = value,
            SweepParam::F => c.f = value,
            SweepParam::T0 => c.t0 = value,
            SweepParam::TExplicitMax => c.t_explicit_max = value,
            SweepParam::TFast => c.t_fast = value,
            SweepParam::TSlow => c.t_slow = value,
            SweepParam::G => c.g = value,
            SweepParam::DeltaC => c.delta_c = value,
        }
        Ok(c)
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use SweepParam::*;
        let all = [
            PBase,
            DeltaP,
            B0,
            TauB,
            PerceptP,
            Theta,
            F,
            T0,
            TExplicitMax,
            TFast,
            TSlow,
            G,
            DeltaC,
        ];
        all.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            Error::config(
                format!("grid.{s}"),
                format!(
                    "unknown parameter (expected one of {})",
                    Self::NAMES.join(", ")
                ),
            )
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<(SweepParam, Vec<f64>)>,
}

impl Grid {
    pub fn new(axes: Vec<(SweepParam, Vec<f64>)>) -> Result<Self> {
        for (i, (p, values)) in axes.iter().enumerate() {
            if values.is_empty() {
                return Err(Error::config(format!("grid.{}", p.name()), "no values"));
            }
            if axes[..i].iter().any(|(q, _)| q == p) {
                return Err(Error::config(format!("grid.{}", p.name()), "listed twice"));
            }
        }
        Ok(Self { axes })
    }

    pub fn single(param: SweepParam, values: Vec<f64>) -> Result<Self> {
        Self::new(vec![(param, values)])
    }

    /// Parses `name = [v1, v2, ...]` lines, keeping the file's key order.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table =
            toml::from_str(text).map_err(|e| Error::config("grid", e.message().to_owned()))?;
        let mut axes = Vec::new();
        for (key, value) in table {
            let param: SweepParam = key.parse()?;
            let field = format!("grid.{key}");
            let values = value
                .as_array()
                .ok_or_else(|| Error::config(&field, "expected an array of numbers"))?
                .iter()
                .map(|v| {
                    v.as_float()
                        .or_else(|| v.as_integer().map(|i| i as f64))
                        .ok_or_else(|| Error::config(&field, "expected an array of numbers"))
                })
                .collect::<Result<Vec<f64>>>()?;
            axes.push((param, values));
        }
        Self::new(axes)
    }

    pub fn params(&self) -> impl Iterator<Item = SweepParam> + '_ {
        self.axes.iter().map(|(p, _)| *p)
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|(_, v)| v.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point values by index, first axis slowest.
    pub fn point(&self, mut index: usize) -> Vec<f64> {
        let mut values = vec![0.0; self.axes.len()];
        for (slot, (_, axis)) in values.iter_mut().zip(&self.axes).rev() {
            *slot = axis[index % axis.len()];
            index /= axis.len();
        }
        values
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn apply(&self, config: &ScenarioConfig, point: &[f64]) -> Result<ScenarioConfig> {
        self.axes
            .iter()
            .zip(point)
            .try_fold(config.clone(), |c, ((p, _), &v)| p.apply(&c, v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeedScheme {
    /// Each `(point, run)` gets its own stream.
    #[default]
    PerPoint,
    /// Run `k` uses the same seed at every point (common random numbers).
    Paired,
}

impl SeedScheme {
    pub fn run_seed(&self, base: u64, point: usize, run: usize) -> u64 {
        match self {
            SeedScheme::PerPoint => derive_seed(base, &[point as u64, run as u64]),
            SeedScheme::Paired => derive_seed(base, &[run as u64]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: Vec<f64>,
    pub episodes: usize,
    pub recalled: usize,
    pub recall_rate: f64,
    pub mean_latency_s: Option<f64>,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub params: Vec<SweepParam>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// CSV with the grid parameters in order, then `recall_rate` and
    /// `mean_latency_s` (empty when nothing was recalled).
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = self.params.iter().map(|p| p.name()).collect();
        header.extend(["recall_rate", "mean_latency_s"]);
        w.write_record(&header).map_err(csv_err)?;
        for row in &self.rows {
            let mut record: Vec<String> = row.point.iter().map(|v| v.to_string()).collect();
            record.push(row.recall_rate.to_string());
            record.push(
                row.mean_latency_s
                    .map(|v| v.to_string())
                    .unwrap_or_default(),
            );
            w.write_record(&record).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub fn sweep(
    config: &ScenarioConfig,
    grid: &Grid,
    runs_per_point: usize,
    scheme: SeedScheme,
) -> Result<SweepTable> {
    let points = grid.points();
    let configs = points
        .iter()
        .map(|p| {
            let c = grid.apply(config, p)?;
            c.validate()?;
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = configs
        .par_iter()
        .zip(points.par_iter())
        .enumerate()
        .map(|(idx, (cfg, point))| {
            let mut summary = Summary::default();
            for run in 0..runs_per_point {
                let mut c = cfg.clone();
                c.seed = scheme.run_seed(config.seed, idx, run);
                summary = summary.merge(summarize(&run_scenario(&c)?)?);
            }
            Ok(SweepRow {
                point: point.clone(),
                episodes: summary.episodes.len(),
                recalled: summary.recalled_count(),
                recall_rate: summary.recall_rate().unwrap_or(0.0),
                mean_latency_s: summary.mean_recall_latency(),
                summary,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        params: grid.params().collect(),
        rows,
    })
}
