//! Product counts, variability and commonality per scope.
//!
//! For a scope with `n` features and `k` valid configurations:
//! variability is `k / (2^n - 1)` and the commonality of a feature is the
//! number of configurations containing it divided by `k`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::One;
use serde::Serialize;

use super::{enumerate_configurations, EngineError, EnumerateOptions};
use crate::model::{FeatureId, FeatureModel, Layer, Level};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerMetrics {
    pub scope: FeatureId,
    /// Number of valid configurations.
    pub k: u64,
    /// Number of features in the scope, root and abstract features included.
    pub n: usize,
    /// `k / (2^n - 1)`, reduced.
    pub variability: Ratio<BigUint>,
    /// Per feature: configurations containing it, over `k`; reduced.
    pub commonality: BTreeMap<FeatureId, Ratio<u64>>,
    /// Configurations containing each feature, in canonical feature order.
    pub shares: Vec<(FeatureId, u64)>,
}

impl LayerMetrics {
    /// `2^n - 1`, the number of non-empty subsets of the scope.
    pub fn subset_count(&self) -> BigUint {
        (BigUint::one() << self.n) - BigUint::one()
    }

    pub fn share_of(&self, id: &FeatureId) -> Option<u64> {
        self.shares.iter().find(|(f, _)| f == id).map(|(_, s)| *s)
    }
}

pub fn layer_metrics(
    model: &FeatureModel,
    scope: &FeatureId,
    options: EnumerateOptions,
) -> Result<LayerMetrics, EngineError> {
    // Metrics need every configuration; never stream.
    let mut iter = enumerate_configurations(model, scope, options.streaming(false))?;
    let n = iter.scope_len();
    let mut share = vec![0u64; n];
    let mut k = 0u64;
    while let Some(bits) = iter.next_bits() {
        k += 1;
        for i in bits.ones() {
            share[i] += 1;
        }
    }
    if k == 0 {
        return Err(EngineError::VoidScope(scope.clone()));
    }
    let features = iter.scope_features();
    let subsets = (BigUint::one() << n) - BigUint::one();
    let shares: Vec<(FeatureId, u64)> = features.into_iter().zip(share).collect();
    let commonality = shares.iter().map(|(f, s)| (f.clone(), Ratio::new(*s, k))).collect();
    Ok(LayerMetrics {
        scope: scope.clone(),
        k,
        n,
        variability: Ratio::new(BigUint::from(k), subsets),
        commonality,
        shares,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LayerKey {
    pub level: Option<Level>,
    pub layer: Layer,
}

/// Metrics for every layer subtree, keyed by level and layer.
///
/// A layer subtree root is a feature tagged with a layer whose parent does
/// not carry the same level and layer.
pub fn scas_report(
    model: &FeatureModel,
    options: EnumerateOptions,
) -> Result<BTreeMap<LayerKey, LayerMetrics>, EngineError> {
    let mut roots: BTreeMap<LayerKey, FeatureId> = BTreeMap::new();
    for (pos, f) in model.features().iter().enumerate() {
        let Some(layer) = f.layer else { continue };
        let same_as_parent = model
            .parent_of(pos)
            .map(|p| model.feature_at(p))
            .is_some_and(|p| p.layer == Some(layer) && p.level == f.level);
        if same_as_parent {
            continue;
        }
        let key = LayerKey { level: f.level, layer };
        if roots.insert(key, f.id.clone()).is_some() {
            return Err(EngineError::DuplicateLayerRoot { level: f.level, layer });
        }
    }
    if roots.is_empty() {
        return Err(EngineError::NoLayerTags);
    }
    roots.into_iter().map(|(key, root)| Ok((key, layer_metrics(model, &root, options)?))).collect()
}
