//! Level/layer tags from well-known subtree names.
//!
//! Children of the root named `provider`, `tenant` or `user` (any case)
//! tag their subtree with that level. Inside a level subtree, children of
//! the level node named after a layer, optionally prefixed by the level's
//! initial (`PGUI`, `pBP`, `TS`, `UDB`, `GUI`, …), tag their subtree with
//! that layer. Everything else stays untagged.

use crate::model::{FeatureModel, Layer, Level};

pub fn level_for_name(name: &str) -> Option<Level> {
    match name.to_ascii_lowercase().as_str() {
        "provider" => Some(Level::Provider),
        "tenant" => Some(Level::Tenant),
        "user" => Some(Level::User),
        _ => None,
    }
}

pub fn layer_for_name(name: &str, level: Level) -> Option<Layer> {
    let lower = name.to_ascii_lowercase();
    let initial = &level.as_str()[..1];
    let bare = lower.strip_prefix(initial).filter(|rest| layer_word(rest).is_some());
    layer_word(bare.unwrap_or(&lower))
}

fn layer_word(word: &str) -> Option<Layer> {
    match word {
        "gui" => Some(Layer::Gui),
        "bp" => Some(Layer::BusinessProcess),
        "s" => Some(Layer::Service),
        "db" => Some(Layer::Database),
        _ => None,
    }
}

pub fn infer_tags(model: FeatureModel) -> FeatureModel {
    let mut tags = vec![(None, None); model.feature_count()];
    let root = model.root_position();
    for &level_node in model.children_of(root) {
        let Some(level) = level_for_name(&model.feature_at(level_node).name) else {
            continue;
        };
        for pos in model.descendants(level_node) {
            tags[pos].0 = Some(level);
        }
        for &layer_node in model.children_of(level_node) {
            if let Some(layer) = layer_for_name(&model.feature_at(layer_node).name, level) {
                for pos in model.descendants(layer_node) {
                    tags[pos].1 = Some(layer);
                }
            }
        }
    }
    model.retagged(tags)
}
