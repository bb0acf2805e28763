//! Canonical scene-graph data model, dataset profiles, ingestion and validation.

mod document;
mod events;
mod profile;
mod types;
mod validate;

pub use document::{parse_scene_graph, read_scene_graph, to_document_json, SceneGraphDocument};
pub use events::{index_events, Event, EventKey};
pub use profile::{read_profile, DatasetProfile, ProfileError, TypeKind};
pub use types::{
    AttributeValue, EntityRef, EventTuple, PredicateValue, SceneGraph, SceneGraphError,
    TimeInterval,
};
pub use validate::{validate, Violation};
