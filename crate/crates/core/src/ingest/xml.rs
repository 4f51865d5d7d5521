//! The XML feature-model dialect.
//!
//! Inside `<struct>`, `<and>` children attach through one singleton arc
//! each (`[1,1]` when the child says `mandatory="true"`, `[0,1]`
//! otherwise), `<or>` becomes one `[1,c]` arc over its `c` children,
//! `<alternative>` one `[1,1]` arc, and `<feature>` is a leaf. Elements
//! outside `<struct>` are ignored.

use std::collections::HashSet;
use std::fmt::Write as _;

use roxmltree::{Document, Node};

use super::{tags, IngestError, Location};
use crate::model::{ArcKind, ArcRole, Feature, FeatureId, FeatureModel, HyperArc, Multiplicity};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Group {
    And,
    Or,
    Alternative,
    Leaf,
}

fn group_of(tag: &str) -> Option<Group> {
    match tag {
        "and" => Some(Group::And),
        "or" => Some(Group::Or),
        "alternative" => Some(Group::Alternative),
        "feature" => Some(Group::Leaf),
        _ => None,
    }
}

struct Collector<'d> {
    doc: &'d Document<'d>,
    features: Vec<Feature>,
    arcs: Vec<HyperArc>,
    locations: Vec<Location>,
    seen: HashSet<String>,
}

impl<'d> Collector<'d> {
    fn location(&self, node: Node) -> Location {
        let pos = self.doc.text_pos_at(node.range().start);
        Location { line: pos.row, column: pos.col }
    }

    fn feature_children<'a>(&self, node: Node<'a, 'd>) -> Result<Vec<Node<'a, 'd>>, IngestError> {
        let mut out = Vec::new();
        for child in node.children().filter(Node::is_element) {
            let tag = child.tag_name().name();
            if group_of(tag).is_none() {
                return Err(IngestError::UnknownElement {
                    element: tag.to_string(),
                    location: Some(self.location(child)),
                });
            }
            out.push(child);
        }
        Ok(out)
    }

    fn visit(&mut self, node: Node<'_, 'd>) -> Result<FeatureId, IngestError> {
        let location = self.location(node);
        let name = node.attribute("name").ok_or_else(|| IngestError::MalformedDocument {
            message: format!("<{}> without a name attribute", node.tag_name().name()),
            location: Some(location),
        })?;
        if !self.seen.insert(name.to_string()) {
            return Err(IngestError::DuplicateFeatureName { name: name.to_string(), location: Some(location) });
        }
        let id = FeatureId::new(name);
        self.features.push(Feature::new(name).set_abstract(node.attribute("abstract") == Some("true")));

        let group = group_of(node.tag_name().name()).expect("checked by caller");
        let children = self.feature_children(node)?;
        if group == Group::Leaf && !children.is_empty() {
            return Err(IngestError::MalformedDocument {
                message: format!("<feature name=\"{name}\"> has child features"),
                location: Some(location),
            });
        }
        let mut heads = Vec::with_capacity(children.len());
        for child in &children {
            let head = self.visit(*child)?;
            if group == Group::And {
                let mult = if child.attribute("mandatory") == Some("true") {
                    Multiplicity::MANDATORY
                } else {
                    Multiplicity::OPTIONAL
                };
                self.arcs.push(HyperArc::tree(id.clone(), vec![head], mult));
                self.locations.push(self.location(*child));
            } else {
                heads.push(head);
            }
        }
        if !heads.is_empty() {
            let mult = match group {
                Group::Or => Multiplicity::new(1, heads.len() as u32),
                _ => Multiplicity::MANDATORY,
            };
            self.arcs.push(HyperArc::tree(id.clone(), heads, mult));
            self.locations.push(location);
        }
        Ok(id)
    }
}

pub fn parse_feature_xml(text: &str) -> Result<FeatureModel, IngestError> {
    let doc = Document::parse(text).map_err(|e| {
        let pos = e.pos();
        IngestError::MalformedDocument {
            message: e.to_string(),
            location: Some(Location { line: pos.row, column: pos.col }),
        }
    })?;
    let top = doc.root_element();
    if top.tag_name().name() != "featureModel" {
        return Err(IngestError::MalformedDocument {
            message: format!("expected <featureModel>, found <{}>", top.tag_name().name()),
            location: None,
        });
    }
    let structure = top
        .children()
        .find(|n| n.is_element() && n.tag_name().name() == "struct")
        .ok_or_else(|| IngestError::MalformedDocument { message: "missing <struct>".into(), location: None })?;

    let mut collector =
        Collector { doc: &doc, features: Vec::new(), arcs: Vec::new(), locations: Vec::new(), seen: HashSet::new() };
    let roots = collector.feature_children(structure)?;
    let [root] = roots.as_slice() else {
        return Err(IngestError::MalformedDocument {
            message: format!("<struct> must hold exactly one root feature, found {}", roots.len()),
            location: Some(collector.location(structure)),
        });
    };
    let root_id = collector.visit(*root)?;

    let Collector { features, arcs, locations, .. } = collector;
    let model = FeatureModel::build(features, arcs, root_id).map_err(|source| {
        let location = source.arc().map(|a| locations[a]);
        IngestError::Model { source, location }
    })?;
    Ok(tags::infer_tags(model))
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Writes the model as XML. Fails for cross arcs, `[0,1]` groups, OR
/// groups other than `[1,|heads|]`, and features mixing a group with
/// other child arcs.
pub fn serialize_xml(model: &FeatureModel) -> Result<String, IngestError> {
    let n = model.feature_count();
    let mut child_arcs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ai, arc) in model.arcs().iter().enumerate() {
        if arc.role == ArcRole::Cross {
            return Err(IngestError::Unrepresentable { message: format!("cross-tree arc from `{}`", arc.tail) });
        }
        child_arcs[model.arc_tail(ai)].push(ai);
    }

    let mut out =
        String::from("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n<featureModel>\n  <struct>\n");
    write_feature(model, &child_arcs, model.root_position(), false, 2, &mut out)?;
    out.push_str("  </struct>\n</featureModel>\n");
    Ok(out)
}

fn write_feature(
    model: &FeatureModel,
    child_arcs: &[Vec<usize>],
    pos: usize,
    mandatory: bool,
    depth: usize,
    out: &mut String,
) -> Result<(), IngestError> {
    let feature = model.feature_at(pos);
    let arcs = &child_arcs[pos];

    // (element, heads with their "mandatory" marker)
    let (tag, members): (&str, Vec<(usize, bool)>) = if arcs.is_empty() {
        ("feature", Vec::new())
    } else if arcs.iter().all(|&a| model.arc_heads(a).len() == 1) {
        let members =
            arcs.iter().map(|&a| (model.arc_heads(a)[0], model.arcs()[a].kind() == ArcKind::Mandatory)).collect();
        ("and", members)
    } else if let [a] = arcs.as_slice() {
        let arc = &model.arcs()[*a];
        let heads = model.arc_heads(*a);
        let tag = match arc.kind() {
            ArcKind::XorGroup => "alternative",
            ArcKind::OrGroup if arc.mult.min == 1 && arc.mult.max as usize == heads.len() => "or",
            _ => {
                return Err(IngestError::Unrepresentable {
                    message: format!("group {} over {} heads from `{}`", arc.mult, heads.len(), feature.id),
                })
            }
        };
        (tag, heads.iter().map(|&h| (h, false)).collect())
    } else {
        return Err(IngestError::Unrepresentable {
            message: format!("feature `{}` mixes a group with other child arcs", feature.id),
        });
    };

    let indent = "  ".repeat(depth);
    let _ = write!(out, "{indent}<{tag}");
    if feature.is_abstract {
        out.push_str(" abstract=\"true\"");
    }
    if mandatory {
        out.push_str(" mandatory=\"true\"");
    }
    let _ = write!(out, " name=\"{}\"", escape(feature.id.as_str()));
    if members.is_empty() {
        out.push_str("/>\n");
        return Ok(());
    }
    out.push_str(">\n");
    for (head, is_mandatory) in members {
        write_feature(model, child_arcs, head, is_mandatory, depth + 1, out)?;
    }
    let _ = writeln!(out, "{indent}</{tag}>");
    Ok(())
}
