//! Features, hyper-arcs and validated feature models.
//!
//! A [`FeatureModel`] is a directed hypergraph: every constraint is a
//! [`HyperArc`] from one tail feature to an ordered set of head features,
//! annotated with a [`Multiplicity`]. Tree arcs define the parent relation;
//! cross arcs are additional constraints that never make a feature a parent.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Identifier of a feature, unique within one model.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct FeatureId(String);

impl FeatureId {
    pub fn new(token: impl Into<String>) -> Self {
        FeatureId(token.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn is_well_formed(&self) -> bool {
        !self.0.is_empty() && !self.0.chars().any(char::is_whitespace)
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for FeatureId {
    fn from(token: &str) -> Self {
        FeatureId::new(token)
    }
}

/// Bounds on how many heads of an arc are selected when its tail is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Multiplicity {
    pub min: u32,
    pub max: u32,
}

impl Multiplicity {
    pub const MANDATORY: Multiplicity = Multiplicity { min: 1, max: 1 };
    pub const OPTIONAL: Multiplicity = Multiplicity { min: 0, max: 1 };

    pub const fn new(min: u32, max: u32) -> Self {
        Multiplicity { min, max }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.min, self.max)
    }
}

/// Classification of an arc from its multiplicity and head count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ArcKind {
    Mandatory,
    Optional,
    XorGroup,
    MutexGroup,
    OrGroup,
}

impl ArcKind {
    /// Classifies `mult` over `head_count` heads. Returns `None` for shapes
    /// that are not one of the five arc kinds (e.g. `[0,0]`, `[0,2]`, or
    /// `max > head_count`).
    pub fn classify(mult: Multiplicity, head_count: usize) -> Option<ArcKind> {
        let (min, max) = (mult.min as usize, mult.max as usize);
        if head_count == 0 || min > max || max > head_count {
            return None;
        }
        match (head_count, min, max) {
            (1, 1, 1) => Some(ArcKind::Mandatory),
            (1, 0, 1) => Some(ArcKind::Optional),
            (_, 1, 1) => Some(ArcKind::XorGroup),
            (_, 0, 1) => Some(ArcKind::MutexGroup),
            (h, min, _) if h > 1 && min >= 1 => Some(ArcKind::OrGroup),
            _ => None,
        }
    }

    pub fn is_group(self) -> bool {
        !matches!(self, ArcKind::Mandatory | ArcKind::Optional)
    }
}

/// Whether an arc contributes to the feature tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcRole {
    Tree,
    Cross,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HyperArc {
    pub tail: FeatureId,
    pub heads: Vec<FeatureId>,
    pub mult: Multiplicity,
    pub role: ArcRole,
}

impl HyperArc {
    pub fn tree(tail: impl Into<FeatureId>, heads: Vec<FeatureId>, mult: Multiplicity) -> Self {
        HyperArc { tail: tail.into(), heads, mult, role: ArcRole::Tree }
    }

    pub fn cross(tail: impl Into<FeatureId>, heads: Vec<FeatureId>, mult: Multiplicity) -> Self {
        HyperArc { tail: tail.into(), heads, mult, role: ArcRole::Cross }
    }

    /// Only meaningful for arcs accepted by [`FeatureModel::build`].
    pub fn kind(&self) -> ArcKind {
        ArcKind::classify(self.mult, self.heads.len()).expect("arc multiplicity was validated at model construction")
    }
}

impl From<String> for FeatureId {
    fn from(token: String) -> Self {
        FeatureId(token)
    }
}

/// Management level a feature belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Provider,
    Tenant,
    User,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Provider => "provider",
            Level::Tenant => "tenant",
            Level::User => "user",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Application layer a feature belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Layer {
    #[serde(rename = "GUI")]
    Gui,
    #[serde(rename = "BP")]
    BusinessProcess,
    #[serde(rename = "S")]
    Service,
    #[serde(rename = "DB")]
    Database,
}

impl Layer {
    pub const ALL: [Layer; 4] = [Layer::Gui, Layer::BusinessProcess, Layer::Service, Layer::Database];

    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Gui => "GUI",
            Layer::BusinessProcess => "BP",
            Layer::Service => "S",
            Layer::Database => "DB",
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Feature {
    pub id: FeatureId,
    /// Numeric node index, when the source format carries one.
    pub index: Option<u32>,
    /// Display name exactly as written in the source.
    pub name: String,
    #[serde(rename = "abstract")]
    pub is_abstract: bool,
    pub level: Option<Level>,
    pub layer: Option<Layer>,
}

impl Feature {
    /// A concrete, untagged feature whose name equals its token.
    pub fn new(token: impl Into<String>) -> Self {
        let token = token.into();
        Feature {
            id: FeatureId::new(token.clone()),
            index: None,
            name: token,
            is_abstract: false,
            level: None,
            layer: None,
        }
    }

    pub fn with_index(mut self, index: u32) -> Self {
        self.index = Some(index);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn set_abstract(mut self, is_abstract: bool) -> Self {
        self.is_abstract = is_abstract;
        self
    }

    pub fn tagged(mut self, level: Option<Level>, layer: Option<Layer>) -> Self {
        self.level = level;
        self.layer = layer;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    /// `arc` is the position of the offending arc in the input list.
    #[error("arc {arc} from `{tail}` has an empty head set")]
    EmptyHeadSet { arc: usize, tail: FeatureId },
    #[error("arc {arc} from `{tail}` has multiplicity {mult} over {heads} head(s)")]
    BadMultiplicity { arc: usize, tail: FeatureId, mult: Multiplicity, heads: usize },
    #[error("unknown feature `{feature}`")]
    UnknownFeature { feature: FeatureId, arc: Option<usize> },
    #[error("arc {arc} from `{tail}` lists its tail or a repeated feature among its heads")]
    InvalidHeads { arc: usize, tail: FeatureId },
    #[error("feature `{feature}` has more than one parent")]
    MultipleParents { feature: FeatureId, arc: usize },
    #[error("the root `{feature}` is the head of a tree arc")]
    RootHasParent { feature: FeatureId, arc: usize },
    #[error("feature `{feature}` lies on a cycle of tree arcs")]
    Cycle { feature: FeatureId },
    #[error("feature `{feature}` is not connected to the root")]
    DisconnectedFeature { feature: FeatureId },
    #[error("feature token `{0}` is declared twice")]
    DuplicateFeature(FeatureId),
    #[error("node index {0} is declared twice")]
    DuplicateIndex(u32),
    #[error("feature token `{0}` is empty or contains whitespace")]
    InvalidToken(String),
}

impl ModelError {
    /// The input arc an error refers to, if any.
    pub fn arc(&self) -> Option<usize> {
        match self {
            ModelError::EmptyHeadSet { arc, .. }
            | ModelError::BadMultiplicity { arc, .. }
            | ModelError::InvalidHeads { arc, .. }
            | ModelError::MultipleParents { arc, .. }
            | ModelError::RootHasParent { arc, .. } => Some(*arc),
            ModelError::UnknownFeature { arc, .. } => *arc,
            _ => None,
        }
    }

    /// Stable machine-readable name of the error kind.
    pub fn kind_name(&self) -> &'static str {
        match self {
            ModelError::EmptyHeadSet { .. } => "EmptyHeadSet",
            ModelError::BadMultiplicity { .. } => "BadMultiplicity",
            ModelError::UnknownFeature { .. } => "UnknownFeature",
            ModelError::InvalidHeads { .. } => "InvalidHeads",
            ModelError::MultipleParents { .. } => "MultipleParents",
            ModelError::RootHasParent { .. } => "RootHasParent",
            ModelError::Cycle { .. } => "Cycle",
            ModelError::DisconnectedFeature { .. } => "DisconnectedFeature",
            ModelError::DuplicateFeature(_) => "DuplicateFeature",
            ModelError::DuplicateIndex(_) => "DuplicateIndex",
            ModelError::InvalidToken(_) => "InvalidToken",
        }
    }
}

/// A validated feature model. Immutable once built.
///
/// Features are kept in canonical order: indexed features by ascending
/// index, then unindexed ones by token. Positions in that order are the
/// `usize` handles used by the engine.
#[derive(Clone, Debug)]
pub struct FeatureModel {
    root: usize,
    features: Vec<Feature>,
    arcs: Vec<HyperArc>,
    lookup: HashMap<FeatureId, usize>,
    arc_tail: Vec<usize>,
    arc_heads: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    parent_arc: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl PartialEq for FeatureModel {
    fn eq(&self, other: &Self) -> bool {
        self.features[self.root].id == other.features[other.root].id
            && self.features == other.features
            && self.arcs == other.arcs
    }
}

impl Eq for FeatureModel {}

fn canonical_key(f: &Feature) -> (bool, u32, &str) {
    (f.index.is_none(), f.index.unwrap_or(0), f.id.as_str())
}

impl FeatureModel {
    /// Validates the parts and assembles a model rooted at `root`.
    pub fn build(features: Vec<Feature>, arcs: Vec<HyperArc>, root: FeatureId) -> Result<FeatureModel, ModelError> {
        let mut features = features;
        for f in &features {
            if !f.id.is_well_formed() {
                return Err(ModelError::InvalidToken(f.id.0.clone()));
            }
        }
        features.sort_by(|a, b| canonical_key(a).cmp(&canonical_key(b)));

        let mut lookup = HashMap::with_capacity(features.len());
        let mut seen_index = HashMap::new();
        for (pos, f) in features.iter().enumerate() {
            if lookup.insert(f.id.clone(), pos).is_some() {
                return Err(ModelError::DuplicateFeature(f.id.clone()));
            }
            if let Some(ix) = f.index {
                if seen_index.insert(ix, pos).is_some() {
                    return Err(ModelError::DuplicateIndex(ix));
                }
            }
        }
        let root_pos = *lookup.get(&root).ok_or(ModelError::UnknownFeature { feature: root.clone(), arc: None })?;

        let n = features.len();
        let mut parent = vec![None; n];
        let mut parent_arc_input = vec![None; n];
        let mut resolved = Vec::with_capacity(arcs.len());
        for (ai, arc) in arcs.iter().enumerate() {
            if arc.heads.is_empty() {
                return Err(ModelError::EmptyHeadSet { arc: ai, tail: arc.tail.clone() });
            }
            if ArcKind::classify(arc.mult, arc.heads.len()).is_none() {
                return Err(ModelError::BadMultiplicity {
                    arc: ai,
                    tail: arc.tail.clone(),
                    mult: arc.mult,
                    heads: arc.heads.len(),
                });
            }
            let resolve = |id: &FeatureId| {
                lookup.get(id).copied().ok_or(ModelError::UnknownFeature { feature: id.clone(), arc: Some(ai) })
            };
            let tail = resolve(&arc.tail)?;
            let heads = arc.heads.iter().map(resolve).collect::<Result<Vec<_>, _>>()?;
            let distinct: BTreeSet<usize> = heads.iter().copied().collect();
            if distinct.len() != heads.len() || distinct.contains(&tail) {
                return Err(ModelError::InvalidHeads { arc: ai, tail: arc.tail.clone() });
            }
            if arc.role == ArcRole::Tree {
                for &h in &heads {
                    if h == root_pos {
                        return Err(ModelError::RootHasParent { feature: features[h].id.clone(), arc: ai });
                    }
                    if parent[h].is_some() {
                        return Err(ModelError::MultipleParents { feature: features[h].id.clone(), arc: ai });
                    }
                    parent[h] = Some(tail);
                    parent_arc_input[h] = Some(ai);
                }
            }
            resolved.push((ai, tail, heads));
        }

        // Every feature must reach the root by following parents.
        // 0 = unvisited, 1 = on current walk, 2 = known to reach root.
        let mut state = vec![0u8; n];
        state[root_pos] = 2;
        for start in 0..n {
            let mut walk = Vec::new();
            let mut cur = start;
            while state[cur] == 0 {
                state[cur] = 1;
                walk.push(cur);
                match parent[cur] {
                    Some(p) => cur = p,
                    None => return Err(ModelError::DisconnectedFeature { feature: features[cur].id.clone() }),
                }
            }
            if state[cur] == 1 {
                return Err(ModelError::Cycle { feature: features[cur].id.clone() });
            }
            for w in walk {
                state[w] = 2;
            }
        }

        // Canonical arc order: tree arcs first, then by tail and head positions.
        resolved.sort_by(|a, b| {
            let ka = (arcs[a.0].role, a.1, &a.2, arcs[a.0].mult);
            let kb = (arcs[b.0].role, b.1, &b.2, arcs[b.0].mult);
            ka.cmp(&kb)
        });
        let mut new_pos = vec![0; arcs.len()];
        for (i, (ai, _, _)) in resolved.iter().enumerate() {
            new_pos[*ai] = i;
        }
        let ordered_arcs: Vec<HyperArc> = resolved.iter().map(|(ai, _, _)| arcs[*ai].clone()).collect();
        let arc_tail = resolved.iter().map(|r| r.1).collect();
        let arc_heads: Vec<Vec<usize>> = resolved.into_iter().map(|r| r.2).collect();
        let parent_arc = parent_arc_input.into_iter().map(|a| a.map(|ai| new_pos[ai])).collect();

        let mut children = vec![Vec::new(); n];
        for (pos, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(pos);
            }
        }

        Ok(FeatureModel {
            root: root_pos,
            features,
            arcs: ordered_arcs,
            lookup,
            arc_tail,
            arc_heads,
            parent,
            parent_arc,
            children,
        })
    }

    pub fn root(&self) -> &Feature {
        &self.features[self.root]
    }

    pub fn root_position(&self) -> usize {
        self.root
    }

    /// Features in canonical order.
    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    /// Arcs in canonical order (tree arcs first).
    pub fn arcs(&self) -> &[HyperArc] {
        &self.arcs
    }

    pub fn feature_count(&self) -> usize {
        self.features.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn position(&self, id: &FeatureId) -> Option<usize> {
        self.lookup.get(id).copied()
    }

    pub fn feature(&self, id: &FeatureId) -> Option<&Feature> {
        self.position(id).map(|p| &self.features[p])
    }

    pub fn feature_at(&self, pos: usize) -> &Feature {
        &self.features[pos]
    }

    pub fn contains(&self, id: &FeatureId) -> bool {
        self.lookup.contains_key(id)
    }

    /// Looks a feature up by token, falling back to a unique ASCII
    /// case-insensitive match.
    pub fn resolve(&self, token: &str) -> Option<&FeatureId> {
        if let Some(&p) = self.lookup.get(&FeatureId::new(token)) {
            return Some(&self.features[p].id);
        }
        let mut hits = self.features.iter().filter(|f| f.id.as_str().eq_ignore_ascii_case(token));
        match (hits.next(), hits.next()) {
            (Some(f), None) => Some(&f.id),
            _ => None,
        }
    }

    pub fn parent_of(&self, pos: usize) -> Option<usize> {
        self.parent[pos]
    }

    /// The tree arc whose heads include `pos`.
    pub fn parent_arc_of(&self, pos: usize) -> Option<usize> {
        self.parent_arc[pos]
    }

    pub fn children_of(&self, pos: usize) -> &[usize] {
        &self.children[pos]
    }

    pub fn arc_tail(&self, arc: usize) -> usize {
        self.arc_tail[arc]
    }

    pub fn arc_heads(&self, arc: usize) -> &[usize] {
        &self.arc_heads[arc]
    }

    /// Positions of `pos` and all its tree descendants, ascending.
    pub fn descendants(&self, pos: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![pos];
        while let Some(p) = stack.pop() {
            out.push(p);
            stack.extend(self.children[p].iter().copied());
        }
        out.sort_unstable();
        out
    }

    /// Arcs whose endpoints all lie in `members` (a mask over positions).
    pub fn arcs_within(&self, members: &[bool]) -> Vec<usize> {
        (0..self.arcs.len())
            .filter(|&a| members[self.arc_tail[a]] && self.arc_heads[a].iter().all(|&h| members[h]))
            .collect()
    }

    /// The sub-model induced by `scope_root` and its tree descendants.
    pub fn scope_subtree(&self, scope_root: &FeatureId) -> Result<FeatureModel, ModelError> {
        let pos =
            self.position(scope_root).ok_or(ModelError::UnknownFeature { feature: scope_root.clone(), arc: None })?;
        let mut members = vec![false; self.features.len()];
        let desc = self.descendants(pos);
        for &d in &desc {
            members[d] = true;
        }
        let features = desc.iter().map(|&d| self.features[d].clone()).collect();
        let arcs = self.arcs_within(&members).into_iter().map(|a| self.arcs[a].clone()).collect();
        Ok(FeatureModel::build(features, arcs, scope_root.clone())
            .expect("a subtree of a valid model is a valid model"))
    }

    /// Rebuilds the model with new level/layer tags, one entry per position.
    pub(crate) fn retagged(mut self, tags: Vec<(Option<Level>, Option<Layer>)>) -> FeatureModel {
        debug_assert_eq!(tags.len(), self.features.len());
        for (f, (level, layer)) in self.features.iter_mut().zip(tags) {
            f.level = level;
            f.layer = layer;
        }
        self
    }
}

/// A set of selected features.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Configuration {
    selected: BTreeSet<FeatureId>,
}

impl Configuration {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, id: &FeatureId) -> bool {
        self.selected.contains(id)
    }

    pub fn insert(&mut self, id: FeatureId) -> bool {
        self.selected.insert(id)
    }

    pub fn remove(&mut self, id: &FeatureId) -> bool {
        self.selected.remove(id)
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    /// Members in token order.
    pub fn iter(&self) -> impl Iterator<Item = &FeatureId> {
        self.selected.iter()
    }

    pub fn as_set(&self) -> &BTreeSet<FeatureId> {
        &self.selected
    }

    /// Parses the canonical line form: comma-separated tokens.
    pub fn parse_line(line: &str) -> Configuration {
        line.split(',').map(str::trim).filter(|t| !t.is_empty()).map(FeatureId::new).collect()
    }
}

impl FromIterator<FeatureId> for Configuration {
    fn from_iter<I: IntoIterator<Item = FeatureId>>(iter: I) -> Self {
        Configuration { selected: iter.into_iter().collect() }
    }
}

impl<'a> FromIterator<&'a str> for Configuration {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        iter.into_iter().map(FeatureId::new).collect()
    }
}

/// Canonical line: tokens sorted and comma-separated.
impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for id in &self.selected {
            if !first {
                f.write_str(",")?;
            }
            f.write_str(id.as_str())?;
            first = false;
        }
        Ok(())
    }
}
