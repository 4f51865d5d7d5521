use std::collections::BTreeSet;

use super::{Bits, EngineError, Scope};
use crate::model::{Configuration, FeatureId, FeatureModel};

pub const ORACLE_MAX_FEATURES: usize = 20;

/// Every subset of the scope's features that passes the validity check.
/// Exhaustive over `2^n` subsets; used to cross-check the search.
pub fn brute_force_enumerate(model: &FeatureModel, scope: &FeatureId) -> Result<BTreeSet<Configuration>, EngineError> {
    let scope = Scope::new(model, scope)?;
    let n = scope.len();
    if n > ORACLE_MAX_FEATURES {
        return Err(EngineError::ScopeTooLarge { scope: scope.root.clone(), features: n, cap: ORACLE_MAX_FEATURES });
    }
    Ok((0..1u64 << n)
        .map(|mask| Bits::from_u64(n, mask))
        .filter(|bits| scope.satisfies(bits))
        .map(|bits| scope.configuration_of(&bits))
        .collect())
}
