//! Bipolar traces, damaged cues and the single-trace memory cell.
//!
//! A cell stores one trace `x0` and recalls it all-or-none: a cue with overlap
//! `h = sum(cue_i * trace_i)` strictly above `theta * N` returns the stored
//! trace, anything else is a miss. Because the cell holds a single pattern the
//! recall probability reduces to a binomial tail over the number of intact cue
//! components, which [`recall_probability`] evaluates exactly and
//! [`recall_probability_enum`] checks by brute force.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};

/// Largest dimension accepted by [`recall_probability_enum`].
pub const MAX_ENUM_DIMENSION: usize = 20;
/// Largest dimension accepted by [`recall_probability`].
pub const MAX_ANALYTIC_DIMENSION: usize = 1000;

/// A stored memory vector with components in `{+1, -1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct Trace(Vec<i8>);

impl Trace {
    pub fn new(components: Vec<i8>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Dimension(
                "a trace needs at least one component".into(),
            ));
        }
        if let Some(pos) = components.iter().position(|&c| c != 1 && c != -1) {
            return Err(Error::Integrity(format!(
                "trace component {pos} is {}, expected +1 or -1",
                components[pos]
            )));
        }
        Ok(Self(components))
    }

    /// Uniformly random bipolar trace.
    pub fn random(dimension: usize, rng: &mut impl Rng) -> Result<Self> {
        let components = (0..dimension)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        Self::new(components)
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i8] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }
}

impl TryFrom<Vec<i8>> for Trace {
    type Error = Error;

    fn try_from(value: Vec<i8>) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Trace> for Vec<i8> {
    fn from(trace: Trace) -> Self {
        trace.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    /// A damaged component carries the opposite sign.
    Flip,
    /// A damaged component is zero.
    Erase,
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseModel::Flip => "flip",
            NoiseModel::Erase => "erase",
        })
    }
}

impl FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flip" => Ok(NoiseModel::Flip),
            "erase" => Ok(NoiseModel::Erase),
            other => Err(Error::config(
                "noise_model",
                format!("unknown noise model `{other}` (expected flip or erase)"),
            )),
        }
    }
}

/// How a cue is damaged: each component independently stays correct with
/// probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CueSpec {
    noise_model: NoiseModel,
    p: f64,
}

impl CueSpec {
    pub fn new(noise_model: NoiseModel, p: f64) -> Result<Self> {
        check_unit("p", p)?;
        Ok(Self { noise_model, p })
    }

    pub fn noise_model(&self) -> NoiseModel {
        self.noise_model
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Same noise model, different correctness probability.
    pub fn with_p(&self, p: f64) -> Result<Self> {
        Self::new(self.noise_model, p)
    }
}

/// A damaged version of a trace presented to a cell (`x_in`).
#[derive(Debug, Clone, PartialEq)]
pub struct Cue {
    components: Vec<i8>,
    source_spec: CueSpec,
}

impl Cue {
    pub fn from_components(components: Vec<i8>, source_spec: CueSpec) -> Result<Self> {
        if let Some(pos) = components.iter().position(|c| !(-1..=1).contains(c)) {
            return Err(Error::Integrity(format!(
                "cue component {pos} is {}, expected -1, 0 or +1",
                components[pos]
            )));
        }
        if source_spec.noise_model == NoiseModel::Flip && components.contains(&0) {
            return Err(Error::Integrity(
                "a flip-model cue cannot contain zeros".into(),
            ));
        }
        Ok(Self {
            components,
            source_spec,
        })
    }

    pub fn components(&self) -> &[i8] {
        &self.components
    }

    pub fn source_spec(&self) -> CueSpec {
        self.source_spec
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellId(pub String);

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CellId {
    fn from(s: &str) -> Self {
        CellId(s.to_owned())
    }
}

/// A single-trace memory cell with a retrieval threshold expressed as a
/// fraction of the dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryCell {
    id: CellId,
    trace: Trace,
    theta: f64,
}

impl MemoryCell {
    pub fn id(&self) -> &CellId {
        &self.id
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn dimension(&self) -> usize {
        self.trace.dimension()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RetrievalStatus {
    Recalled,
    Miss,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalOutcome {
    pub status: RetrievalStatus,
    /// The stored trace, present iff `status` is `Recalled`.
    pub output: Option<Trace>,
    pub overlap: i64,
}

impl RetrievalOutcome {
    pub fn is_recalled(&self) -> bool {
        self.status == RetrievalStatus::Recalled
    }
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if (0.0..1.0).contains(&theta) {
        Ok(())
    } else {
        Err(Error::Range {
            name: "theta",
            value: theta,
            expected: "0 <= theta < 1",
        })
    }
}

/// Decision rule shared by retrieval and the closed form. Ties are a miss.
fn above_threshold(overlap: i64, theta: f64, dimension: usize) -> bool {
    overlap as f64 > theta * dimension as f64
}

pub fn store_trace(id: impl Into<CellId>, trace: Trace, theta: f64) -> Result<MemoryCell> {
    check_theta(theta)?;
    Ok(MemoryCell {
        id: id.into(),
        trace,
        theta,
    })
}

/// Samples a damaged cue. Exactly one uniform draw is consumed per component,
/// and a component is intact iff its draw is below `p`, so cues drawn from the
/// same stream at a higher `p` keep every component that was intact at a lower one.
pub fn make_cue(trace: &Trace, spec: CueSpec, rng: &mut impl Rng) -> Cue {
    let components = trace
        .components()
        .iter()
        .map(|&c| {
            let intact = rng.random::<f64>() < spec.p;
            match (intact, spec.noise_model) {
                (true, _) => c,
                (false, NoiseModel::Flip) => -c,
                (false, NoiseModel::Erase) => 0,
            }
        })
        .collect();
    Cue {
        components,
        source_spec: spec,
    }
}

pub fn retrieve(cell: &MemoryCell, cue: &Cue) -> Result<RetrievalOutcome> {
    if cue.dimension() != cell.dimension() {
        return Err(Error::Dimension(format!(
            "cue has {} components, cell `{}` has {}",
            cue.dimension(),
            cell.id,
            cell.dimension()
        )));
    }
    let overlap: i64 = cue
        .components
        .iter()
        .zip(cell.trace.components())
        .map(|(&a, &b)| i64::from(a) * i64::from(b))
        .sum();
    Ok(if above_threshold(overlap, cell.theta, cell.dimension()) {
        RetrievalOutcome {
            status: RetrievalStatus::Recalled,
            output: Some(cell.trace.clone()),
            overlap,
        }
    } else {
        RetrievalOutcome {
            status: RetrievalStatus::Miss,
            output: None,
            overlap,
        }
    })
}

fn check_dimension(n: usize, limit: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Dimension("dimension must be at least 1".into()));
    }
    if n > limit {
        return Err(Error::Range {
            name: "N",
            value: n as f64,
            expected: "N within the supported dimension limit",
        });
    }
    Ok(())
}

fn binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    let k_small = k.min(n - k);
    let mut coeff = 1.0f64;
    for i in 0..k_small {
        coeff = coeff * (n - i) as f64 / (i + 1) as f64;
    }
    coeff * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

/// Exact probability that one freshly sampled cue recalls the trace.
///
/// With `K ~ Binomial(N, p)` intact components the overlap is `2K - N` for
/// flip noise and `K` for erasures.
pub fn recall_probability(n: usize, spec: CueSpec, theta: f64) -> Result<f64> {
    check_dimension(n, MAX_ANALYTIC_DIMENSION)?;
    check_theta(theta)?;
    let overlap = |k: usize| match spec.noise_model {
        NoiseModel::Flip => 2 * k as i64 - n as i64,
        NoiseModel::Erase => k as i64,
    };
    let total: f64 = (0..=n)
        .filter(|&k| above_threshold(overlap(k), theta, n))
        .map(|k| binomial_pmf(n, k, spec.p))
        .sum();
    Ok(total.min(1.0))
}

/// Brute-force recall probability: enumerates every damage pattern of an
/// N-component cue, weights it by its Bernoulli probability and runs
/// [`retrieve`] on it.
pub fn recall_probability_enum(n: usize, spec: CueSpec, theta: f64) -> Result<f64> {
    if n > MAX_ENUM_DIMENSION {
        return Err(Error::Feasibility {
            n,
            limit: MAX_ENUM_DIMENSION,
        });
    }
    check_dimension(n, MAX_ENUM_DIMENSION)?;
    let trace = Trace::new((0..n).map(|i| if i % 3 == 1 { -1 } else { 1 }).collect())?;
    let cell = store_trace("enum", trace.clone(), theta)?;
    let p = spec.p;
    let mut total = 0.0;
    for mask in 0u32..(1u32 << n) {
        let mut weight = 1.0;
        let mut components = Vec::with_capacity(n);
        for (i, &c) in trace.components().iter().enumerate() {
            if mask >> i & 1 == 1 {
                weight *= p;
                components.push(c);
            } else {
                weight *= 1.0 - p;
                components.push(match spec.noise_model {
                    NoiseModel::Flip => -c,
                    NoiseModel::Erase => 0,
                });
            }
        }
        if weight == 0.0 {
            continue;
        }
        let cue = Cue::from_components(components, spec)?;
        if retrieve(&cell, &cue)?.is_recalled() {
            total += weight;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;

    fn flip(p: f64) -> CueSpec {
        CueSpec::new(NoiseModel::Flip, p).unwrap()
    }

    fn erase(p: f64) -> CueSpec {
        CueSpec::new(NoiseModel::Erase, p).unwrap()
    }

    fn trace(c: &[i8]) -> Trace {
        Trace::new(c.to_vec()).unwrap()
    }

    #[test]
    fn stored_cell_recalls_identity_cue() {
        let t = trace(&[1, -1, 1]);
        let cell = store_trace("c", t.clone(), 0.0).unwrap();
        assert_eq!(cell.dimension(), 3);
        let cue = Cue::from_components(t.components().to_vec(), flip(1.0)).unwrap();
        let out = retrieve(&cell, &cue).unwrap();
        assert_eq!(out.status, RetrievalStatus::Recalled);
        assert_eq!(out.overlap, 3);
        assert_eq!(out.output.as_ref(), Some(&t));
    }

    #[test]
    fn store_rejects_bad_theta_and_empty_trace() {
        let t = trace(&[1]);
        assert!(matches!(
            store_trace("c", t.clone(), 1.0),
            Err(Error::Range { .. })
        ));
        assert!(matches!(
            store_trace("c", t, -0.1),
            Err(Error::Range { .. })
        ));
        assert!(matches!(Trace::new(vec![]), Err(Error::Dimension(_))));
        assert!(Trace::new(vec![1, 0]).is_err());
    }

    #[test]
    fn cue_spec_rejects_out_of_range_p() {
        assert!(CueSpec::new(NoiseModel::Flip, 1.01).is_err());
        assert!(CueSpec::new(NoiseModel::Erase, -0.5).is_err());
        assert!(CueSpec::new(NoiseModel::Erase, f64::NAN).is_err());
    }

    #[test]
    fn make_cue_extremes() {
        let t = trace(&[1, -1, -1, 1, 1]);
        let mut rng = stream(1, &[]);
        let cue = make_cue(&t, flip(1.0), &mut rng);
        assert_eq!(cue.components(), t.components());
        let cue = make_cue(&t, erase(0.0), &mut rng);
        assert!(cue.components().iter().all(|&c| c == 0));
        let cue = make_cue(&t, flip(0.0), &mut rng);
        assert_eq!(cue.components(), t.negated().components());
    }

    #[test]
    fn make_cue_is_deterministic_per_seed() {
        let t = trace(&[1, -1, 1, 1]);
        let a = make_cue(&t, flip(0.5), &mut stream(99, &[1]));
        let b = make_cue(&t, flip(0.5), &mut stream(99, &[1]));
        assert_eq!(a, b);
        assert!(a.components().iter().all(|&c| c != 0));
    }

    #[test]
    fn retrieve_anti_cue_and_tie() {
        let t = trace(&[1, -1, 1, 1]);
        let cell = store_trace("c", t.clone(), 0.0).unwrap();
        let anti = Cue::from_components(t.negated().components().to_vec(), flip(0.0)).unwrap();
        let out = retrieve(&cell, &anti).unwrap();
        assert_eq!((out.status, out.overlap), (RetrievalStatus::Miss, -4));
        assert!(out.output.is_none());

        let cell2 = store_trace("c2", trace(&[1, 1]), 0.0).unwrap();
        let tie = Cue::from_components(vec![1, -1], flip(0.5)).unwrap();
        let out = retrieve(&cell2, &tie).unwrap();
        assert_eq!((out.status, out.overlap), (RetrievalStatus::Miss, 0));
    }

    #[test]
    fn retrieve_rejects_dimension_mismatch() {
        let cell = store_trace("c", trace(&[1, 1, 1]), 0.0).unwrap();
        let cue = Cue::from_components(vec![1, 1], flip(1.0)).unwrap();
        assert!(matches!(retrieve(&cell, &cue), Err(Error::Dimension(_))));
    }

    #[test]
    fn flip_cue_rejects_zeros() {
        assert!(Cue::from_components(vec![1, 0], flip(0.5)).is_err());
        assert!(Cue::from_components(vec![1, 0], erase(0.5)).is_ok());
    }

    #[test]
    fn analytic_spot_values() {
        // sum_{k=4}^{7} C(7,k) 0.6^k 0.4^(7-k)
        let expected = 0.290304 + 0.2612736 + 0.1306368 + 0.0279936;
        let p = recall_probability(7, flip(0.6), 0.0).unwrap();
        assert!((p - expected).abs() < 1e-15);
        assert!((p - 0.710208).abs() < 1e-12);
        assert!((recall_probability(2, flip(0.5), 0.0).unwrap() - 0.25).abs() < 1e-15);
        for n in [1, 5, 40, 200] {
            assert_eq!(recall_probability(n, flip(1.0), 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn enumeration_spot_values() {
        assert!((recall_probability_enum(7, flip(0.6), 0.0).unwrap() - 0.710208).abs() < 1e-12);
        assert!((recall_probability_enum(2, flip(0.5), 0.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((recall_probability_enum(1, erase(0.3), 0.0).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(recall_probability_enum(3, flip(0.0), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn enumeration_limit() {
        assert!(matches!(
            recall_probability_enum(21, flip(0.5), 0.0),
            Err(Error::Feasibility { n: 21, .. })
        ));
        assert!(recall_probability(0, flip(0.5), 0.0).is_err());
        assert!(recall_probability(4, flip(0.5), 1.0).is_err());
    }

    #[test]
    fn erase_cannot_miss_at_theta_zero_unless_all_erased() {
        // P = 1 - (1-p)^N for erasures at theta = 0
        let p = recall_probability(5, erase(0.2), 0.0).unwrap();
        assert!((p - (1.0 - 0.8f64.powi(5))).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn analytic_matches_enumeration(
            n in 1usize..=14,
            p in 0.0f64..=1.0,
            theta in 0.0f64..0.95,
            erase_model in any::<bool>(),
        ) {
            let spec = if erase_model { erase(p) } else { flip(p) };
            let a = recall_probability(n, spec, theta).unwrap();
            let e = recall_probability_enum(n, spec, theta).unwrap();
            prop_assert!((a - e).abs() <= 1e-12, "analytic {a} vs enum {e}");
        }

        #[test]
        fn retrieval_is_all_or_none(seed in any::<u64>(), p in 0.0f64..=1.0, theta in 0.0f64..0.9) {
            let mut rng = stream(seed, &[]);
            let t = Trace::random(9, &mut rng).unwrap();
            let cell = store_trace("c", t.clone(), theta).unwrap();
            let cue = make_cue(&t, flip(p), &mut rng);
            let out = retrieve(&cell, &cue).unwrap();
            prop_assert_eq!(out.is_recalled(), out.overlap as f64 > theta * 9.0);
            match out.output {
                Some(o) => prop_assert_eq!(o, t),
                None => prop_assert!(!out.is_recalled()),
            }
        }
    }
}
