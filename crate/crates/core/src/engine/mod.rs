//! Validity, enumeration and metrics over one scope of a model.
//!
//! A scope is a feature together with its tree descendants. Inside a scope
//! the features are numbered by canonical model order; a configuration is
//! then a bit-vector where the feature at scope position `i` is bit `i`,
//! and configurations are ordered by the value of that bit-vector.

mod bits;
mod enumerate;
mod metrics;
mod oracle;

use serde::Serialize;
use thiserror::Error;

use crate::model::{ArcRole, Configuration, FeatureId, FeatureModel, Layer, Level};

pub(crate) use bits::Bits;
pub use enumerate::{enumerate_configurations, ConfigurationIter, EnumerateOptions, DEFAULT_SCOPE_CAP};
pub use metrics::{layer_metrics, scas_report, LayerKey, LayerMetrics};
pub use oracle::{brute_force_enumerate, ORACLE_MAX_FEATURES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("unknown feature `{0}`")]
    UnknownFeature(FeatureId),
    #[error("feature `{feature}` lies outside scope `{scope}`")]
    OutOfScope { feature: FeatureId, scope: FeatureId },
    #[error("scope `{scope}` has {features} features, above the cap of {cap}")]
    ScopeTooLarge { scope: FeatureId, features: usize, cap: usize },
    #[error("scope `{0}` has no valid configuration")]
    VoidScope(FeatureId),
    #[error("no feature carries a layer tag")]
    NoLayerTags,
    #[error("more than one subtree is tagged {}/{layer}", level.map_or("-", Level::as_str))]
    DuplicateLayerRoot { level: Option<Level>, layer: Layer },
}

impl EngineError {
    pub fn kind_name(&self) -> &'static str {
        match self {
            EngineError::UnknownFeature(_) => "UnknownFeature",
            EngineError::OutOfScope { .. } => "OutOfScope",
            EngineError::ScopeTooLarge { .. } => "ScopeTooLarge",
            EngineError::VoidScope(_) => "VoidScope",
            EngineError::NoLayerTags => "NoLayerTags",
            EngineError::DuplicateLayerRoot { .. } => "DuplicateLayerRoot",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ViolationReason {
    BelowMin,
    AboveMax,
    OrphanHead,
    RootMissing,
}

/// Why a configuration is invalid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub reason: ViolationReason,
    /// Index into [`FeatureModel::arcs`]; `None` for [`ViolationReason::RootMissing`].
    pub arc: Option<usize>,
    /// The orphaned head, or the missing scope root.
    pub feature: Option<FeatureId>,
    /// Selected heads of `arc`.
    pub observed: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct ScopeArc {
    pub model_arc: usize,
    pub tail: usize,
    pub heads: Vec<usize>,
    pub min: u32,
    pub max: u32,
    pub tree: bool,
}

/// A scope resolved against its model.
#[derive(Clone, Debug)]
pub(crate) struct Scope<'m> {
    pub model: &'m FeatureModel,
    pub root: FeatureId,
    /// Model positions of the scope's features, ascending.
    pub members: Vec<usize>,
    local: Vec<Option<usize>>,
    pub arcs: Vec<ScopeArc>,
}

impl<'m> Scope<'m> {
    pub fn new(model: &'m FeatureModel, scope: &FeatureId) -> Result<Scope<'m>, EngineError> {
        let root = model.position(scope).ok_or_else(|| EngineError::UnknownFeature(scope.clone()))?;
        let members = model.descendants(root);
        let mut local = vec![None; model.feature_count()];
        let mut inside = vec![false; model.feature_count()];
        for (i, &p) in members.iter().enumerate() {
            local[p] = Some(i);
            inside[p] = true;
        }
        let arcs = model
            .arcs_within(&inside)
            .into_iter()
            .map(|a| {
                let arc = &model.arcs()[a];
                ScopeArc {
                    model_arc: a,
                    tail: local[model.arc_tail(a)].expect("inside scope"),
                    heads: model.arc_heads(a).iter().map(|&h| local[h].expect("inside scope")).collect(),
                    min: arc.mult.min,
                    max: arc.mult.max,
                    tree: arc.role == ArcRole::Tree,
                }
            })
            .collect();
        Ok(Scope { model, root: scope.clone(), members, local, arcs })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn root_local(&self) -> usize {
        self.local_of(self.model.position(&self.root).expect("scope root exists")).expect("root is a member")
    }

    pub fn local_of(&self, model_pos: usize) -> Option<usize> {
        self.local[model_pos]
    }

    pub fn id_at(&self, local: usize) -> &FeatureId {
        &self.model.feature_at(self.members[local]).id
    }

    /// Local index of `id`, distinguishing unknown from out-of-scope.
    pub fn locate(&self, id: &FeatureId) -> Result<usize, EngineError> {
        let pos = self.model.position(id).ok_or_else(|| EngineError::UnknownFeature(id.clone()))?;
        self.local_of(pos).ok_or_else(|| EngineError::OutOfScope { feature: id.clone(), scope: self.root.clone() })
    }

    pub fn bits_of(&self, config: &Configuration) -> Result<Bits, EngineError> {
        let mut bits = Bits::zeros(self.len());
        for id in config.iter() {
            bits.set(self.locate(id)?, true);
        }
        Ok(bits)
    }

    pub fn configuration_of(&self, bits: &Bits) -> Configuration {
        bits.ones().map(|i| self.id_at(i).clone()).collect()
    }

    pub fn satisfies(&self, bits: &Bits) -> bool {
        if !bits.get(self.root_local()) {
            return false;
        }
        self.arcs.iter().all(|arc| {
            let selected = arc.heads.iter().filter(|&&h| bits.get(h)).count() as u32;
            if bits.get(arc.tail) {
                arc.min <= selected && selected <= arc.max
            } else {
                !arc.tree || selected == 0
            }
        })
    }

    pub fn violations(&self, bits: &Bits) -> Vec<Violation> {
        let mut out = Vec::new();
        if !bits.get(self.root_local()) {
            out.push(Violation {
                reason: ViolationReason::RootMissing,
                arc: None,
                feature: Some(self.root.clone()),
                observed: 0,
            });
        }
        for arc in &self.arcs {
            let observed = arc.heads.iter().filter(|&&h| bits.get(h)).count();
            let violation = |reason, feature| Violation { reason, arc: Some(arc.model_arc), feature, observed };
            if bits.get(arc.tail) {
                if (observed as u32) < arc.min {
                    out.push(violation(ViolationReason::BelowMin, None));
                } else if observed as u32 > arc.max {
                    out.push(violation(ViolationReason::AboveMax, None));
                }
            } else if arc.tree {
                for &h in arc.heads.iter().filter(|&&h| bits.get(h)) {
                    out.push(violation(ViolationReason::OrphanHead, Some(self.id_at(h).clone())));
                }
            }
        }
        out
    }
}

/// Checks `config` against every arc inside `scope`. The configuration is
/// valid iff the returned list is empty.
pub fn is_valid(
    model: &FeatureModel,
    config: &Configuration,
    scope: &FeatureId,
) -> Result<Vec<Violation>, EngineError> {
    let scope = Scope::new(model, scope)?;
    let bits = scope.bits_of(config)?;
    Ok(scope.violations(&bits))
}

/// The feature tokens of `scope`'s subtree in canonical order.
pub fn scope_features(model: &FeatureModel, scope: &FeatureId) -> Result<Vec<FeatureId>, EngineError> {
    let scope = Scope::new(model, scope)?;
    Ok((0..scope.len()).map(|i| scope.id_at(i).clone()).collect())
}

/// Compares two configurations of the same scope by canonical bit-vector order.
pub fn canonical_cmp(
    model: &FeatureModel,
    scope: &FeatureId,
    a: &Configuration,
    b: &Configuration,
) -> Result<std::cmp::Ordering, EngineError> {
    let scope = Scope::new(model, scope)?;
    Ok(scope.bits_of(a)?.cmp(&scope.bits_of(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_arc_table;

    fn model() -> FeatureModel {
        parse_arc_table("{0(0.r);1(1.m);2(2.a);3(3.b)} 0 [0,1] {1} 1 [0,1] {2,3}").unwrap()
    }

    #[test]
    fn violation_kinds() {
        let m = model();
        let root = FeatureId::new("r");
        let v = is_valid(&m, &Configuration::new(), &root).unwrap();
        assert_eq!(v[0].reason, ViolationReason::RootMissing);

        let v = is_valid(&m, &["r", "m", "a", "b"].into_iter().collect(), &root).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].reason, ViolationReason::AboveMax);
        assert_eq!(v[0].observed, 2);

        let v = is_valid(&m, &["r", "a"].into_iter().collect(), &root).unwrap();
        assert_eq!(v[0].reason, ViolationReason::OrphanHead);
        assert_eq!(v[0].feature, Some(FeatureId::new("a")));

        assert!(is_valid(&m, &["r", "m", "b"].into_iter().collect(), &root).unwrap().is_empty());
    }

    #[test]
    fn unknown_and_out_of_scope() {
        let m = model();
        let c: Configuration = ["r", "zz"].into_iter().collect();
        assert!(matches!(is_valid(&m, &c, &"r".into()), Err(EngineError::UnknownFeature(_))));
        let c: Configuration = ["r", "m"].into_iter().collect();
        assert!(matches!(is_valid(&m, &c, &"m".into()), Err(EngineError::OutOfScope { .. })));
        assert!(matches!(is_valid(&m, &c, &"q".into()), Err(EngineError::UnknownFeature(_))));
    }
}
