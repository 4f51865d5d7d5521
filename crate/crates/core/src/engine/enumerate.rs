//! Lazy enumeration of the valid configurations of a scope.
//!
//! Depth-first search that decides one feature at a time, from the highest
//! scope position down to position 0, trying "unselected" before
//! "selected". That order emits configurations in ascending bit-vector
//! value. Values implied by the scope root and the pinned features are
//! fixed up front. After each decision every arc touching the decided
//! feature, and every arc leaving an ancestor it newly implies, is checked
//! against the partial assignment; the branch is cut as soon as some arc
//! can no longer be satisfied.

use super::{Bits, EngineError, Scope};
use crate::model::{Configuration, FeatureId, FeatureModel};

pub const DEFAULT_SCOPE_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerateOptions {
    /// Largest scope (in features) enumerated without `streaming`.
    pub cap: usize,
    /// Allow scopes above `cap`; the caller promises to stop early.
    pub streaming: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { cap: DEFAULT_SCOPE_CAP, streaming: false }
    }
}

impl EnumerateOptions {
    /// Default options with the cap taken from `SCAS_SCOPE_CAP` when set.
    pub fn from_env() -> Self {
        let cap = std::env::var("SCAS_SCOPE_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_SCOPE_CAP);
        EnumerateOptions { cap, streaming: false }
    }

    pub fn streaming(mut self, on: bool) -> Self {
        self.streaming = on;
        self
    }
}

/// Valid configurations of `scope`, in canonical order.
pub fn enumerate_configurations<'m>(
    model: &'m FeatureModel,
    scope: &FeatureId,
    options: EnumerateOptions,
) -> Result<ConfigurationIter<'m>, EngineError> {
    let scope = Scope::new(model, scope)?;
    if !options.streaming && scope.len() > options.cap {
        return Err(EngineError::ScopeTooLarge { scope: scope.root.clone(), features: scope.len(), cap: options.cap });
    }
    Ok(ConfigurationIter::new(scope, Vec::new()))
}

#[derive(Clone, Copy)]
struct Touch {
    arc: usize,
    is_tail: bool,
}

pub struct ConfigurationIter<'m> {
    scope: Scope<'m>,
    forced: Vec<Option<bool>>,
    value: Vec<Option<bool>>,
    selected_heads: Vec<u32>,
    open_heads: Vec<u32>,
    touching: Vec<Vec<Touch>>,
    /// Tree parent inside the scope.
    parent: Vec<Option<usize>>,
    arcs_from: Vec<Vec<usize>>,
    /// Number of selected features strictly below each position.
    below: Vec<u32>,
    /// Scope positions, highest first.
    order: Vec<usize>,
    /// Next value to try per depth: 0 = unselected, 1 = selected, 2 = none left.
    choice: Vec<u8>,
    depth: usize,
    done: bool,
}

/// Closes `forced` under implications every valid configuration obeys.
/// Returns `false` on a contradiction.
fn propagate(scope: &Scope<'_>, parent: &[Option<usize>], forced: &mut [Option<bool>]) -> bool {
    fn set(forced: &mut [Option<bool>], i: usize, v: bool, changed: &mut bool) -> bool {
        match forced[i] {
            Some(f) => f == v,
            None => {
                forced[i] = Some(v);
                *changed = true;
                true
            }
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..forced.len() {
            if forced[i] == Some(true) {
                if let Some(p) = parent[i] {
                    if !set(forced, p, true, &mut changed) {
                        return false;
                    }
                }
            }
        }
        for arc in &scope.arcs {
            let full = arc.min as usize == arc.heads.len();
            match forced[arc.tail] {
                Some(true) if full => {
                    for &h in &arc.heads {
                        if !set(forced, h, true, &mut changed) {
                            return false;
                        }
                    }
                }
                Some(false) if arc.tree => {
                    for &h in &arc.heads {
                        if !set(forced, h, false, &mut changed) {
                            return false;
                        }
                    }
                }
                _ => {}
            }
            if full
                && arc.heads.iter().any(|&h| forced[h] == Some(false))
                && !set(forced, arc.tail, false, &mut changed)
            {
                return false;
            }
        }
    }
    true
}

impl<'m> ConfigurationIter<'m> {
    /// `fixed` pins scope positions to a value on top of the scope root.
    pub(crate) fn new(scope: Scope<'m>, fixed: Vec<(usize, bool)>) -> Self {
        let n = scope.len();
        let mut forced = vec![None; n];
        let mut done = false;
        for (i, v) in fixed.into_iter().chain(std::iter::once((scope.root_local(), true))) {
            if forced[i].is_some_and(|f| f != v) {
                done = true;
            }
            forced[i] = Some(v);
        }
        let mut touching = vec![Vec::new(); n];
        let mut arcs_from = vec![Vec::new(); n];
        let mut parent = vec![None; n];
        for (ai, arc) in scope.arcs.iter().enumerate() {
            touching[arc.tail].push(Touch { arc: ai, is_tail: true });
            arcs_from[arc.tail].push(ai);
            for &h in &arc.heads {
                touching[h].push(Touch { arc: ai, is_tail: false });
                if arc.tree {
                    parent[h] = Some(arc.tail);
                }
            }
        }
        done |= !propagate(&scope, &parent, &mut forced);
        let open_heads = scope.arcs.iter().map(|a| a.heads.len() as u32).collect();
        ConfigurationIter {
            selected_heads: vec![0; scope.arcs.len()],
            open_heads,
            touching,
            parent,
            arcs_from,
            below: vec![0; n],
            forced,
            value: vec![None; n],
            order: (0..n).rev().collect(),
            choice: vec![0; n],
            depth: 0,
            done,
            scope,
        }
    }

    /// Number of features in the scope.
    pub fn scope_len(&self) -> usize {
        self.scope.len()
    }

    /// Scope features in canonical (bit) order.
    pub fn scope_features(&self) -> Vec<FeatureId> {
        (0..self.scope.len()).map(|i| self.scope.id_at(i).clone()).collect()
    }

    /// What is known about `pos`: decided, forced, or implied by a
    /// selected descendant.
    fn state(&self, pos: usize) -> Option<bool> {
        self.value[pos].or(self.forced[pos]).or((self.below[pos] > 0).then_some(true))
    }

    fn consistent(&self, ai: usize) -> bool {
        let arc = &self.scope.arcs[ai];
        let selected = self.selected_heads[ai];
        let reachable = selected + self.open_heads[ai];
        let bounds_ok = selected <= arc.max && reachable >= arc.min;
        match self.state(arc.tail) {
            Some(true) => bounds_ok,
            Some(false) => !arc.tree || selected == 0,
            None => !arc.tree || selected == 0 || bounds_ok,
        }
    }

    fn assign(&mut self, pos: usize, on: bool) -> bool {
        self.value[pos] = Some(on);
        for t in &self.touching[pos] {
            if !t.is_tail {
                self.open_heads[t.arc] -= 1;
                if on {
                    self.selected_heads[t.arc] += 1;
                }
            }
        }
        let mut ok = self.touching[pos].iter().all(|t| self.consistent(t.arc));
        if on {
            let mut up = self.parent[pos];
            while let Some(p) = up {
                self.below[p] += 1;
                if self.below[p] == 1 {
                    ok = ok
                        && self.value[p].or(self.forced[p]) != Some(false)
                        && self.arcs_from[p].iter().all(|&ai| self.consistent(ai));
                }
                up = self.parent[p];
            }
        }
        ok
    }

    fn unassign(&mut self, pos: usize) {
        let on = self.value[pos].take().expect("assigned");
        for t in &self.touching[pos] {
            if !t.is_tail {
                self.open_heads[t.arc] += 1;
                if on {
                    self.selected_heads[t.arc] -= 1;
                }
            }
        }
        if on {
            let mut up = self.parent[pos];
            while let Some(p) = up {
                self.below[p] -= 1;
                up = self.parent[p];
            }
        }
    }

    fn current(&self) -> Bits {
        let mut bits = Bits::zeros(self.value.len());
        for (i, v) in self.value.iter().enumerate() {
            if *v == Some(true) {
                bits.set(i, true);
            }
        }
        bits
    }

    fn retreat(&mut self) {
        self.depth -= 1;
        self.unassign(self.order[self.depth]);
    }

    pub(crate) fn next_bits(&mut self) -> Option<Bits> {
        if self.done {
            return None;
        }
        let n = self.order.len();
        loop {
            if self.depth == n {
                let out = self.current();
                self.retreat();
                return Some(out);
            }
            let d = self.depth;
            let pos = self.order[d];
            let mut advanced = false;
            while self.choice[d] < 2 {
                let on = self.choice[d] == 1;
                self.choice[d] += 1;
                if self.forced[pos].is_some_and(|f| f != on) {
                    continue;
                }
                if self.assign(pos, on) {
                    self.depth += 1;
                    advanced = true;
                    break;
                }
                self.unassign(pos);
            }
            if !advanced {
                self.choice[d] = 0;
                if d == 0 {
                    self.done = true;
                    return None;
                }
                self.retreat();
            }
        }
    }
}

impl Iterator for ConfigurationIter<'_> {
    type Item = Configuration;

    fn next(&mut self) -> Option<Configuration> {
        let bits = self.next_bits()?;
        Some(self.scope.configuration_of(&bits))
    }
}
