//! The hyper-arc table dialect.
//!
//! ```text
//! # comment to end of line
//! {0(0.SaaS_APP); 1(1.Provider); 2(2.PGUI)}
//! 0 [1,1] {1}
//! 1 [1,1] {2}   1 [0,1] {3}
//! ```
//!
//! Arcs may be separated by any whitespace or `;`. An arc is a cross-tree
//! constraint when every head already has a parent from an earlier row (or
//! is the root); otherwise it is a tree arc. Two nodes may share a name:
//! their tokens then become `name@index`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use super::{tags, IngestError, Location};
use crate::model::{ArcRole, Feature, FeatureId, FeatureModel, HyperArc, ModelError, Multiplicity};

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    column: u32,
}

impl Cursor {
    fn new(text: &str) -> Self {
        Cursor { chars: text.chars().collect(), pos: 0, line: 1, column: 1 }
    }

    fn location(&self) -> Location {
        Location { line: self.line, column: self.column }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    /// Skips whitespace and `#` comments.
    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn error(&self, message: impl Into<String>) -> IngestError {
        IngestError::SyntaxError { message: message.into(), location: self.location() }
    }

    fn expect(&mut self, want: char) -> Result<(), IngestError> {
        self.skip_trivia();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.error(format!("expected `{want}`, found end of input"))),
        }
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_trivia();
        if self.peek() == Some(want) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<u32, IngestError> {
        self.skip_trivia();
        let start = self.location();
        let mut digits = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            digits.push(c);
            self.bump();
        }
        if digits.is_empty() {
            return Err(match self.peek() {
                Some(c) => self.error(format!("expected an integer, found `{c}`")),
                None => self.error("expected an integer, found end of input"),
            });
        }
        digits.parse().map_err(|_| IngestError::SyntaxError {
            message: format!("integer `{digits}` is too large"),
            location: start,
        })
    }

    fn name(&mut self) -> Result<String, IngestError> {
        self.skip_trivia();
        let mut name = String::new();
        while let Some(c) = self.peek().filter(|&c| !c.is_whitespace() && !is_reserved(c)) {
            name.push(c);
            self.bump();
        }
        if name.is_empty() {
            return Err(self.error("expected a node name"));
        }
        Ok(name)
    }
}

fn is_reserved(c: char) -> bool {
    matches!(c, '(' | ')' | '{' | '}' | '[' | ']' | ',' | ';' | '#')
}

struct RawArc {
    tail: u32,
    mult: Multiplicity,
    heads: Vec<(u32, Location)>,
    tail_location: Location,
}

/// Tokens for declared nodes: the name itself, or `name@index` when the
/// name is shared by several nodes.
fn derive_tokens(nodes: &BTreeMap<u32, String>) -> HashMap<u32, String> {
    let mut uses: HashMap<&str, usize> = HashMap::new();
    for name in nodes.values() {
        *uses.entry(name.as_str()).or_default() += 1;
    }
    nodes
        .iter()
        .map(|(&ix, name)| {
            let token = if uses[name.as_str()] > 1 { format!("{name}@{ix}") } else { name.clone() };
            (ix, token)
        })
        .collect()
}

pub fn parse_arc_table(text: &str) -> Result<FeatureModel, IngestError> {
    let mut cur = Cursor::new(text);
    let mut nodes: BTreeMap<u32, String> = BTreeMap::new();

    cur.skip_trivia();
    if cur.peek() == Some('{') {
        cur.bump();
        loop {
            cur.skip_trivia();
            if cur.eat('}') {
                break;
            }
            let at = cur.location();
            let outer = cur.int()?;
            cur.expect('(')?;
            let inner = cur.int()?;
            if inner != outer {
                return Err(IngestError::SyntaxError {
                    message: format!("node {outer} declares inner index {inner}"),
                    location: at,
                });
            }
            cur.expect('.')?;
            let name = cur.name()?;
            cur.expect(')')?;
            if nodes.insert(outer, name).is_some() {
                return Err(IngestError::SyntaxError {
                    message: format!("node index {outer} is declared twice"),
                    location: at,
                });
            }
            cur.eat(';');
        }
    }

    let mut raw = Vec::new();
    loop {
        cur.skip_trivia();
        while cur.eat(';') {}
        if cur.peek().is_none() {
            break;
        }
        let tail_location = cur.location();
        let tail = cur.int()?;
        cur.expect('[')?;
        let min = cur.int()?;
        cur.expect(',')?;
        let max = cur.int()?;
        cur.expect(']')?;
        cur.expect('{')?;
        let mut heads = Vec::new();
        if !cur.eat('}') {
            loop {
                cur.skip_trivia();
                let at = cur.location();
                heads.push((cur.int()?, at));
                if cur.eat('}') {
                    break;
                }
                cur.expect(',')?;
            }
        }
        raw.push(RawArc { tail, mult: Multiplicity::new(min, max), heads, tail_location });
    }

    let tokens = derive_tokens(&nodes);
    let token_of = |ix: u32, location: Location| {
        tokens.get(&ix).map(|t| FeatureId::new(t.clone())).ok_or(IngestError::UnknownIndex { index: ix, location })
    };

    let root = token_of(0, Location { line: 1, column: 1 })?;
    let mut parented: Vec<u32> = vec![0];
    let mut arcs = Vec::with_capacity(raw.len());
    let mut arc_locations = Vec::with_capacity(raw.len());
    for (ai, r) in raw.iter().enumerate() {
        let tail = token_of(r.tail, r.tail_location)?;
        if r.heads.is_empty() {
            return Err(IngestError::Model {
                source: ModelError::EmptyHeadSet { arc: ai, tail },
                location: Some(r.tail_location),
            });
        }
        let heads = r.heads.iter().map(|&(ix, at)| token_of(ix, at)).collect::<Result<Vec<_>, _>>()?;
        let role = if r.heads.iter().all(|(ix, _)| parented.contains(ix)) {
            ArcRole::Cross
        } else {
            parented.extend(r.heads.iter().map(|(ix, _)| *ix));
            ArcRole::Tree
        };
        arcs.push(HyperArc { tail, heads, mult: r.mult, role });
        arc_locations.push(r.tail_location);
    }

    let features = nodes
        .iter()
        .map(|(&ix, name)| Feature::new(tokens[&ix].clone()).with_index(ix).with_name(name.clone()))
        .collect();

    let model = FeatureModel::build(features, arcs, root).map_err(|source| {
        let location = source.arc().map(|a| arc_locations[a]);
        IngestError::Model { source, location }
    })?;
    Ok(tags::infer_tags(model))
}

pub fn serialize_arc_table(model: &FeatureModel) -> Result<String, IngestError> {
    let features = model.features();
    let root = model.root_position();

    // Keep the model's own indices when they already form a valid table.
    let keep = features.iter().all(|f| f.index.is_some()) && features[root].index == Some(0);
    let mut index = vec![0u32; features.len()];
    if keep {
        for (pos, f) in features.iter().enumerate() {
            index[pos] = f.index.unwrap_or_default();
        }
    } else {
        let mut next = 1;
        for (pos, slot) in index.iter_mut().enumerate() {
            if pos != root {
                *slot = next;
                next += 1;
            }
        }
    }

    let names: BTreeMap<u32, String> =
        (0..features.len()).map(|pos| (index[pos], features[pos].name.clone())).collect();
    let derived = derive_tokens(&names);
    let names_round_trip = (0..features.len()).all(|pos| derived[&index[pos]] == features[pos].id.as_str());
    let label = |pos: usize| -> Result<&str, IngestError> {
        let s = if names_round_trip { features[pos].name.as_str() } else { features[pos].id.as_str() };
        if s.is_empty() || s.chars().any(|c| c.is_whitespace() || is_reserved(c)) {
            return Err(IngestError::Unrepresentable {
                message: format!("node name `{s}` contains a reserved character"),
            });
        }
        Ok(s)
    };

    let mut order: Vec<usize> = (0..features.len()).collect();
    order.sort_by_key(|&pos| index[pos]);

    let mut out = String::new();
    out.push('{');
    for (i, &pos) in order.iter().enumerate() {
        if i > 0 {
            out.push_str(";\n ");
        }
        let _ = write!(out, "{ix}({ix}.{})", label(pos)?, ix = index[pos]);
    }
    out.push_str("}\n");

    // Tree arcs come first in canonical order, so every cross arc follows
    // the rows that parent its heads.
    for (ai, arc) in model.arcs().iter().enumerate() {
        let heads: Vec<String> = model.arc_heads(ai).iter().map(|&h| index[h].to_string()).collect();
        let _ =
            writeln!(out, "{} [{},{}] {{{}}}", index[model.arc_tail(ai)], arc.mult.min, arc.mult.max, heads.join(","));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ArcKind;

    const BLOCK: &str = "{0(0.Root); 1(1. a) ;2(2.b);3(3.c)}";

    #[test]
    fn parses_block_and_rows() {
        let text = format!("{BLOCK}\n0 [1,1] {{1}}  1[0,1]{{2, 3}} # trailing\n");
        let m = parse_arc_table(&text).unwrap();
        assert_eq!(m.feature_count(), 4);
        assert_eq!(m.arc_count(), 2);
        assert_eq!(m.root().name, "Root");
        assert_eq!(m.arcs()[1].kind(), ArcKind::MutexGroup);
        assert_eq!(m.feature(&"a".into()).unwrap().index, Some(1));
    }

    #[test]
    fn semicolon_separated_arcs() {
        let text = format!("{BLOCK};0 [1,1] {{1}}; 1 [1,2] {{2,3}};");
        let m = parse_arc_table(&text).unwrap();
        assert_eq!(m.arcs()[1].kind(), ArcKind::OrGroup);
    }

    #[test]
    fn unknown_index_has_location() {
        let text = format!("{BLOCK}\n0 [1,1] {{1}}\n99 [1,1] {{3}}\n");
        match parse_arc_table(&text).unwrap_err() {
            IngestError::UnknownIndex { index: 99, location } => assert_eq!(location, Location { line: 3, column: 1 }),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_heads_is_a_model_error() {
        let text = format!("{BLOCK}\n0 [1,1] {{1}}\n  1[0,1]{{}}\n");
        let err = parse_arc_table(&text).unwrap_err();
        assert_eq!(err.kind_name(), "EmptyHeadSet");
        assert_eq!(err.location(), Some(Location { line: 3, column: 3 }));
    }

    #[test]
    fn syntax_errors() {
        let err = parse_arc_table("{0(0.r)}\n0 [1 1] {1}").unwrap_err();
        assert!(matches!(err, IngestError::SyntaxError { location: Location { line: 2, column: 6 }, .. }));
        assert!(matches!(parse_arc_table("{0(1.r)}"), Err(IngestError::SyntaxError { .. })));
        assert!(matches!(parse_arc_table("{0(0.r)"), Err(IngestError::SyntaxError { .. })));
    }

    #[test]
    fn shared_names_get_indexed_tokens() {
        let m = parse_arc_table("{0(0.r);1(1.x);2(2.x)} 0 [0,1] {1} 0 [0,1] {2}").unwrap();
        let f = m.feature(&"x@2".into()).unwrap();
        assert_eq!(f.name, "x");
        assert!(m.resolve("x").is_none());
    }

    #[test]
    fn later_arcs_over_parented_heads_are_cross() {
        let m = parse_arc_table("{0(0.r);1(1.a);2(2.b)} 0 [0,1] {1} 0 [0,1] {2} 1 [1,1] {2}").unwrap();
        let roles: Vec<_> = m.arcs().iter().map(|a| a.role).collect();
        assert_eq!(roles, vec![ArcRole::Tree, ArcRole::Tree, ArcRole::Cross]);
        let back = parse_arc_table(&serialize_arc_table(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
