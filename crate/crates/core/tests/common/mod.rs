#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scas::{ArcRole, Feature, FeatureId, FeatureModel, HyperArc, Multiplicity, SourceFormat};

pub const PROVIDER_ARCS: &str = include_str!("../../fixtures/provider.arcs");
pub const SAAS_APP_XML: &str = include_str!("../../fixtures/saas_app.xml");

/// (from, [min,max], to) exactly as tabulated.
pub const PROVIDER_TABLE: [(u32, u32, u32, &[u32]); 24] = [
    (0, 1, 1, &[1]),
    (1, 1, 1, &[2]),
    (1, 1, 1, &[3]),
    (1, 1, 1, &[4]),
    (1, 1, 1, &[5]),
    (2, 1, 1, &[6]),
    (2, 0, 1, &[7]),
    (2, 0, 1, &[8]),
    (3, 0, 1, &[9]),
    (3, 0, 1, &[10]),
    (4, 0, 1, &[11, 12]),
    (4, 1, 1, &[13]),
    (5, 1, 1, &[14]),
    (5, 1, 1, &[15]),
    (5, 1, 1, &[16]),
    (6, 0, 1, &[17, 18]),
    (7, 0, 1, &[19, 20]),
    (9, 0, 1, &[21, 22]),
    (10, 1, 1, &[23, 24, 25]),
    (13, 1, 1, &[26]),
    (13, 1, 1, &[27]),
    (13, 1, 1, &[28]),
    (14, 1, 1, &[29, 30, 31]),
    (16, 1, 1, &[32, 33]),
];

pub fn provider() -> FeatureModel {
    SourceFormat::ArcTable.parse(PROVIDER_ARCS).expect("provider fixture parses")
}

pub fn saas_app() -> FeatureModel {
    SourceFormat::Xml.parse(SAAS_APP_XML).expect("SaaS_APP fixture parses")
}

pub fn id(s: &str) -> FeatureId {
    FeatureId::new(s)
}

#[derive(Clone, Copy, Debug)]
pub struct GenOptions {
    pub max_features: usize,
    /// Restrict to shapes the XML dialect can express: no indices, no cross
    /// arcs, no mutex groups, OR groups spanning all heads, and each parent
    /// holding either one group or only singleton arcs.
    pub xml_safe: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions { max_features: 16, xml_safe: false }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random valid multiplicity over `heads` heads.
pub fn random_mult(rng: &mut impl Rng, heads: usize) -> Multiplicity {
    if heads == 1 {
        return if rng.gen_bool(0.5) { Multiplicity::MANDATORY } else { Multiplicity::OPTIONAL };
    }
    match rng.gen_range(0..3) {
        0 => Multiplicity::new(1, 1),
        1 => Multiplicity::new(0, 1),
        _ => {
            let max = rng.gen_range(2..=heads as u32);
            Multiplicity::new(rng.gen_range(1..=max), max)
        }
    }
}

fn singleton(rng: &mut impl Rng) -> Multiplicity {
    random_mult(rng, 1)
}

pub fn random_model(rng: &mut impl Rng, opts: GenOptions) -> FeatureModel {
    let n = rng.gen_range(1..=opts.max_features);
    let token = |i: usize| FeatureId::new(format!("f{i}"));
    let features: Vec<Feature> = (0..n)
        .map(|i| {
            let f = Feature::new(format!("f{i}"));
            if opts.xml_safe {
                f.set_abstract(rng.gen_bool(0.2))
            } else {
                f.with_index(i as u32)
            }
        })
        .collect();

    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 1..n {
        children[rng.gen_range(0..i)].push(i);
    }

    let mut arcs = Vec::new();
    for (p, kids) in children.iter_mut().enumerate() {
        if kids.is_empty() {
            continue;
        }
        kids.shuffle(rng);
        if opts.xml_safe {
            if kids.len() > 1 && rng.gen_bool(0.5) {
                let mult =
                    if rng.gen_bool(0.5) { Multiplicity::new(1, 1) } else { Multiplicity::new(1, kids.len() as u32) };
                arcs.push(HyperArc::tree(token(p), kids.iter().map(|&c| token(c)).collect(), mult));
            } else {
                for &c in kids.iter() {
                    arcs.push(HyperArc::tree(token(p), vec![token(c)], singleton(rng)));
                }
            }
            continue;
        }
        let mut rest = &kids[..];
        while !rest.is_empty() {
            let size = rng.gen_range(1..=rest.len().min(4));
            let (chunk, tail) = rest.split_at(size);
            arcs.push(HyperArc::tree(token(p), chunk.iter().map(|&c| token(c)).collect(), random_mult(rng, size)));
            rest = tail;
        }
    }

    if !opts.xml_safe && n > 2 {
        for _ in 0..rng.gen_range(0..=2) {
            let tail = rng.gen_range(0..n);
            let mut pool: Vec<usize> = (1..n).filter(|&i| i != tail).collect();
            pool.shuffle(rng);
            let size = rng.gen_range(1..=pool.len().min(3));
            let heads: Vec<FeatureId> = pool[..size].iter().map(|&i| token(i)).collect();
            arcs.push(HyperArc::cross(token(tail), heads, random_mult(rng, size)));
        }
    }

    FeatureModel::build(features, arcs, token(0)).expect("generated model is well formed")
}

/// Dialect-independent shape of a model: feature identities and tags plus
/// every arc by feature identity.
pub type Structure = (
    FeatureId,
    BTreeSet<(FeatureId, String, Option<scas::Level>, Option<scas::Layer>)>,
    BTreeSet<(FeatureId, Vec<FeatureId>, Multiplicity, ArcRole)>,
);

pub fn structure(m: &FeatureModel) -> Structure {
    let features = m.features().iter().map(|f| (f.id.clone(), f.name.clone(), f.level, f.layer)).collect();
    let arcs = m
        .arcs()
        .iter()
        .map(|a| {
            let mut heads = a.heads.clone();
            heads.sort();
            (a.tail.clone(), heads, a.mult, a.role)
        })
        .collect();
    (m.root().id.clone(), features, arcs)
}

/// Features reachable from `scope` through mandatory tree arcs only.
pub fn mandatory_chain(m: &FeatureModel, scope: &FeatureId) -> BTreeSet<FeatureId> {
    let mut out = BTreeSet::from([scope.clone()]);
    let mut stack = vec![scope.clone()];
    while let Some(f) = stack.pop() {
        for a in m.arcs() {
            if a.role == ArcRole::Tree && a.tail == f && a.heads.len() == 1 && a.mult == Multiplicity::MANDATORY {
                for h in &a.heads {
                    if out.insert(h.clone()) {
                        stack.push(h.clone());
                    }
                }
            }
        }
    }
    out
}

/// Number of valid configurations of the subtree at `f`, computed bottom-up
/// from the arc shapes. Only meaningful for models without cross arcs.
pub fn tree_count(m: &FeatureModel, f: &FeatureId) -> num_bigint::BigUint {
    use num_bigint::BigUint;
    let mut total = BigUint::from(1u32);
    for a in m.arcs().iter().filter(|a| a.role == ArcRole::Tree && &a.tail == f) {
        let counts: Vec<BigUint> = a.heads.iter().map(|h| tree_count(m, h)).collect();
        let mut by_size = vec![BigUint::from(0u32); counts.len() + 1];
        by_size[0] = BigUint::from(1u32);
        for c in &counts {
            for s in (1..by_size.len()).rev() {
                let add = &by_size[s - 1] * c;
                by_size[s] += add;
            }
        }
        let ways: BigUint = by_size[a.mult.min as usize..=a.mult.max as usize].iter().sum();
        total *= ways;
    }
    total
}
