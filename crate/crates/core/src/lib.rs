//! Feature-model configuration engine for multi-level SaaS applications.
//!
//! Models are directed hypergraphs ([`model`]) read from an XML or
//! arc-table dialect ([`ingest`]). The [`engine`] enumerates the valid
//! configurations of a scope and derives variability and commonality
//! metrics; [`selfconfig`] picks requirement-satisfying configurations and
//! minimal reconfiguration plans.

pub mod cli;
pub mod engine;
pub mod ingest;
pub mod model;
pub mod report;
pub mod selfconfig;

pub use engine::{EngineError, LayerMetrics, Violation, ViolationReason};
pub use ingest::{IngestError, SourceFormat};
pub use model::{
    ArcKind, ArcRole, Configuration, Feature, FeatureId, FeatureModel, HyperArc, Layer, Level, ModelError, Multiplicity,
};
pub use selfconfig::{ReconfigurationPlan, RequirementSet, SelfConfigError};
