//! Requirement-driven configuration selection and reconfiguration planning.
//!
//! Both operations search the full set of valid configurations of a scope
//! that contain every required feature and no excluded one:
//!
//! * [`select_configuration`] minimises total weight, ties going to the
//!   smallest configuration in canonical bit-vector order;
//! * [`reconfigure`] minimises the number of features added or removed
//!   relative to a current configuration, then the number removed, then
//!   total weight, then canonical order.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::engine::{Bits, ConfigurationIter, EngineError, EnumerateOptions, Scope};
use crate::model::{Configuration, FeatureId, FeatureModel};

/// Non-negative exact cost.
pub type Weight = Ratio<BigUint>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelfConfigError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("feature `{0}` is both required and excluded")]
    Contradictory(FeatureId),
    #[error("no valid configuration of `{0}` satisfies the requirements")]
    NoValidConfiguration(FeatureId),
    #[error("invalid weight `{text}` for `{feature}`")]
    BadWeight { feature: String, text: String },
}

impl SelfConfigError {
    pub fn kind_name(&self) -> &'static str {
        match self {
            SelfConfigError::Engine(e) => e.kind_name(),
            SelfConfigError::Contradictory(_) => "Contradictory",
            SelfConfigError::NoValidConfiguration(_) => "NoValidConfiguration",
            SelfConfigError::BadWeight { .. } => "BadWeight",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RequirementSet {
    pub required: BTreeSet<FeatureId>,
    pub excluded: BTreeSet<FeatureId>,
    /// Per-feature cost; unlisted features cost 1.
    pub weights: BTreeMap<FeatureId, Weight>,
}

impl RequirementSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn require(mut self, id: impl Into<FeatureId>) -> Self {
        self.required.insert(id.into());
        self
    }

    pub fn exclude(mut self, id: impl Into<FeatureId>) -> Self {
        self.excluded.insert(id.into());
        self
    }

    pub fn weight(&self, id: &FeatureId) -> Weight {
        self.weights.get(id).cloned().unwrap_or_else(Weight::one)
    }

    /// Whether `config` holds every required and no excluded feature.
    pub fn admits(&self, config: &Configuration) -> bool {
        self.required.iter().all(|f| config.contains(f)) && !self.excluded.iter().any(|f| config.contains(f))
    }

    pub fn cost_of(&self, config: &Configuration) -> Weight {
        config.iter().fold(Weight::zero(), |acc, f| acc + self.weight(f))
    }
}

/// Parses a weight: an integer, a decimal (`2.5`) or a fraction (`3/2`).
pub fn parse_weight(text: &str) -> Option<Weight> {
    let text = text.trim();
    if let Some((int, frac)) = text.split_once('.') {
        if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) {
            return None;
        }
        let digits = format!("{int}{frac}");
        let numer = BigUint::from_str(&digits).ok()?;
        let denom = num_traits::pow(BigUint::from(10u32), frac.len());
        return Some(Ratio::new(numer, denom));
    }
    let r = Weight::from_str(text).ok()?;
    (!r.denom().is_zero()).then_some(r)
}

/// Reads a weights file: one `token value` pair per line, `#` comments.
pub fn parse_weights(text: &str) -> Result<BTreeMap<FeatureId, Weight>, SelfConfigError> {
    let mut out = BTreeMap::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(token), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(SelfConfigError::BadWeight { feature: line.to_string(), text: String::new() });
        };
        let w = parse_weight(value)
            .ok_or_else(|| SelfConfigError::BadWeight { feature: token.to_string(), text: value.to_string() })?;
        out.insert(FeatureId::new(token), w);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub configuration: Configuration,
    pub cost: Weight,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReconfigurationPlan {
    pub target: Configuration,
    pub add: BTreeSet<FeatureId>,
    pub remove: BTreeSet<FeatureId>,
    #[serde(serialize_with = "serialize_ratio")]
    pub cost: Weight,
    pub delta_size: usize,
}

fn serialize_ratio<S: serde::Serializer>(r: &Weight, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&crate::report::ratio_text(r.numer(), r.denom()))
}

/// Weights of the scope features as integers over one shared denominator.
struct ScaledWeights {
    numer: Vec<BigUint>,
    denom: BigUint,
}

impl ScaledWeights {
    fn new(weights: &[Weight]) -> Self {
        let denom = weights.iter().fold(BigUint::one(), |acc, w| acc.lcm(w.denom()));
        let numer = weights.iter().map(|w| w.numer() * (&denom / w.denom())).collect();
        ScaledWeights { numer, denom }
    }

    fn cost(&self, bits: &Bits) -> BigUint {
        bits.ones().fold(BigUint::zero(), |acc, i| acc + &self.numer[i])
    }

    fn weight(&self, scaled: BigUint) -> Weight {
        Ratio::new(scaled, self.denom.clone())
    }
}

/// Searches `scope` under `req`; weights are indexed by scope position.
fn constrained<'m>(
    model: &'m FeatureModel,
    scope: &FeatureId,
    req: &RequirementSet,
    options: EnumerateOptions,
) -> Result<(ConfigurationIter<'m>, ScaledWeights), SelfConfigError> {
    if let Some(f) = req.required.intersection(&req.excluded).next() {
        return Err(SelfConfigError::Contradictory(f.clone()));
    }
    let scope = Scope::new(model, scope)?;
    if scope.len() > options.cap {
        return Err(
            EngineError::ScopeTooLarge { scope: scope.root.clone(), features: scope.len(), cap: options.cap }.into()
        );
    }
    let mut fixed = Vec::new();
    for f in &req.required {
        fixed.push((scope.locate(f)?, true));
    }
    for f in &req.excluded {
        fixed.push((scope.locate(f)?, false));
    }
    let weights: Vec<Weight> = (0..scope.len()).map(|i| req.weight(scope.id_at(i))).collect();
    Ok((ConfigurationIter::new(scope, fixed), ScaledWeights::new(&weights)))
}

pub fn select_configuration(
    model: &FeatureModel,
    scope: &FeatureId,
    req: &RequirementSet,
    options: EnumerateOptions,
) -> Result<Selection, SelfConfigError> {
    let (mut iter, weights) = constrained(model, scope, req, options)?;
    let mut best: Option<(BigUint, Bits)> = None;
    while let Some(bits) = iter.next_bits() {
        let c = weights.cost(&bits);
        // Ascending emission order: the first minimum is the canonical one.
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, bits));
        }
    }
    let (cost, bits) = best.ok_or_else(|| SelfConfigError::NoValidConfiguration(scope.clone()))?;
    Ok(Selection { configuration: Scope::new(model, scope)?.configuration_of(&bits), cost: weights.weight(cost) })
}

pub fn reconfigure(
    model: &FeatureModel,
    scope: &FeatureId,
    current: &Configuration,
    req: &RequirementSet,
    options: EnumerateOptions,
) -> Result<ReconfigurationPlan, SelfConfigError> {
    let (mut iter, weights) = constrained(model, scope, req, options)?;
    let view = Scope::new(model, scope)?;
    let now = view.bits_of(current)?;
    let now_ones: Vec<usize> = now.ones().collect();

    let mut best: Option<((usize, usize, BigUint), Bits)> = None;
    while let Some(bits) = iter.next_bits() {
        let removed = now_ones.iter().filter(|&&i| !bits.get(i)).count();
        let added = bits.ones().filter(|&i| !now.get(i)).count();
        let key = (added + removed, removed, weights.cost(&bits));
        if best.as_ref().is_none_or(|(b, _)| key < *b) {
            best = Some((key, bits));
        }
    }
    let ((delta_size, _, cost), bits) = best.ok_or_else(|| SelfConfigError::NoValidConfiguration(scope.clone()))?;
    let target = view.configuration_of(&bits);
    let add = target.iter().filter(|f| !current.contains(f)).cloned().collect();
    let remove = current.iter().filter(|f| !target.contains(f)).cloned().collect();
    Ok(ReconfigurationPlan { target, add, remove, cost: weights.weight(cost), delta_size })
}
