//! Reading and writing the two feature-model dialects.
//!
//! * `xml`: the FeatureIDE-style `<featureModel><struct>…` document.
//! * `arc_table`: a node block `{0(0.Root); 1(1.Child); …}` followed by
//!   hyper-arc rows `From [min,max] {h1,h2,…}` over node indices.
//!
//! Both parsers infer level/layer tags from well-known subtree names
//! (see [`tags`]).

pub mod arc_table;
pub mod tags;
pub mod xml;

use std::fmt;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::model::{FeatureModel, ModelError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SourceFormat {
    Xml,
    ArcTable,
}

impl SourceFormat {
    /// `.xml` → xml, `.arcs` → arc table.
    pub fn from_path(path: &Path) -> Option<SourceFormat> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "xml" => Some(SourceFormat::Xml),
            "arcs" => Some(SourceFormat::ArcTable),
            _ => None,
        }
    }

    pub fn parse(self, text: &str) -> Result<FeatureModel, IngestError> {
        match self {
            SourceFormat::Xml => xml::parse_feature_xml(text),
            SourceFormat::ArcTable => arc_table::parse_arc_table(text),
        }
    }

    pub fn serialize(self, model: &FeatureModel) -> Result<String, IngestError> {
        match self {
            SourceFormat::Xml => xml::serialize_xml(model),
            SourceFormat::ArcTable => arc_table::serialize_arc_table(model),
        }
    }
}

impl std::str::FromStr for SourceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "xml" => Ok(SourceFormat::Xml),
            "arcs" | "arc_table" | "arc-table" => Ok(SourceFormat::ArcTable),
            other => Err(format!("unknown format `{other}` (expected xml or arcs)")),
        }
    }
}

/// One-based line and column in the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Location {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("malformed document: {message}")]
    MalformedDocument { message: String, location: Option<Location> },
    #[error("feature name `{name}` is declared twice")]
    DuplicateFeatureName { name: String, location: Option<Location> },
    #[error("unknown element <{element}>")]
    UnknownElement { element: String, location: Option<Location> },
    #[error("syntax error: {message}")]
    SyntaxError { message: String, location: Location },
    #[error("node index {index} is not declared in the node block")]
    UnknownIndex { index: u32, location: Location },
    #[error("{source}")]
    Model { source: ModelError, location: Option<Location> },
    #[error("cannot be written in this format: {message}")]
    Unrepresentable { message: String },
}

impl IngestError {
    pub fn location(&self) -> Option<Location> {
        match self {
            IngestError::MalformedDocument { location, .. }
            | IngestError::DuplicateFeatureName { location, .. }
            | IngestError::UnknownElement { location, .. }
            | IngestError::Model { location, .. } => *location,
            IngestError::SyntaxError { location, .. } | IngestError::UnknownIndex { location, .. } => Some(*location),
            IngestError::Unrepresentable { .. } => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            IngestError::MalformedDocument { .. } => "MalformedDocument",
            IngestError::DuplicateFeatureName { .. } => "DuplicateFeatureName",
            IngestError::UnknownElement { .. } => "UnknownElement",
            IngestError::SyntaxError { .. } => "SyntaxError",
            IngestError::UnknownIndex { .. } => "UnknownIndex",
            IngestError::Model { source, .. } => source.kind_name(),
            IngestError::Unrepresentable { .. } => "Unrepresentable",
        }
    }
}

impl From<ModelError> for IngestError {
    fn from(source: ModelError) -> Self {
        IngestError::Model { source, location: None }
    }
}

pub use arc_table::{parse_arc_table, serialize_arc_table};
pub use xml::{parse_feature_xml, serialize_xml};
