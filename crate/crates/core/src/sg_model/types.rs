use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SceneGraphError {
    #[error("malformed scene-graph document: {0}")]
    MalformedDocument(String),
    #[error("tuple {tuple_id} references unknown entity {entity_id:?}")]
    DanglingEntityRef { tuple_id: String, entity_id: String },
    #[error("tuple {tuple_id}: interval [{start_s}, {end_s}] exceeds video duration {duration_s}")]
    IntervalOutOfRange {
        tuple_id: String,
        start_s: f64,
        end_s: f64,
        duration_s: f64,
    },
    #[error("tuple {tuple_id}: invalid interval [{start_s}, {end_s}]")]
    InvalidInterval {
        tuple_id: String,
        start_s: f64,
        end_s: f64,
    },
    #[error("entity id must be nonempty")]
    EmptyEntityId,
    #[error("duplicate entity id {0:?}")]
    DuplicateEntityId(String),
    #[error("duplicate tuple id {0:?}")]
    DuplicateTupleId(String),
    #[error("tuple {0}: an attribute-only tuple needs at least one subject attribute")]
    EmptyObservation(String),
    #[error("tuple {0}: object attributes given without an object")]
    OrphanObjectAttributes(String),
    #[error("invalid video duration {0}")]
    InvalidDuration(f64),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntityRef {
    pub entity_id: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entity_class: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AttributeValue {
    pub value: String,
    pub attr_type: String,
}

impl AttributeValue {
    pub fn new(value: impl Into<String>, attr_type: impl Into<String>) -> Self {
        Self {
            value: value.into(),
            attr_type: attr_type.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PredicateValue {
    pub value: String,
    pub pred_type: String,
}

impl PredicateValue {
    pub fn new(value: impl Into<String>, pred_type: impl Into<String>) -> Self {
        Self {
            value: value.into(),
            pred_type: pred_type.into(),
        }
    }
}

/// A closed interval in seconds. Point events have `start_s == end_s`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct TimeInterval {
    pub start_s: f64,
    pub end_s: f64,
}

impl TimeInterval {
    pub fn new(start_s: f64, end_s: f64) -> Self {
        Self { start_s, end_s }
    }

    pub fn is_valid(&self) -> bool {
        self.start_s.is_finite() && self.end_s.is_finite() && 0.0 <= self.start_s && self.start_s <= self.end_s
    }

    /// Total order by start, then end. Intervals are validated finite.
    pub fn chronological(&self, other: &Self) -> std::cmp::Ordering {
        self.start_s
            .total_cmp(&other.start_s)
            .then(self.end_s.total_cmp(&other.end_s))
    }
}

/// One event record: subject (with attributes), optional predicate and object, and when it holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventTuple {
    pub tuple_id: String,
    pub subject: EntityRef,
    #[serde(default)]
    pub subject_attrs: Vec<AttributeValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<PredicateValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<EntityRef>,
    #[serde(default)]
    pub object_attrs: Vec<AttributeValue>,
    pub time: TimeInterval,
}

impl EventTuple {
    pub fn subject_attrs_of<'a>(&'a self, attr_type: &'a str) -> impl Iterator<Item = &'a AttributeValue> {
        self.subject_attrs.iter().filter(move |a| a.attr_type == attr_type)
    }

    pub fn object_attrs_of<'a>(&'a self, attr_type: &'a str) -> impl Iterator<Item = &'a AttributeValue> {
        self.object_attrs.iter().filter(move |a| a.attr_type == attr_type)
    }

    pub fn pred_type(&self) -> Option<&str> {
        self.predicate.as_ref().map(|p| p.pred_type.as_str())
    }

    /// True when every field except `time` (and the id) coincides.
    pub fn same_key(&self, other: &Self) -> bool {
        self.subject == other.subject
            && self.subject_attrs == other.subject_attrs
            && self.predicate == other.predicate
            && self.object == other.object
            && self.object_attrs == other.object_attrs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneGraph {
    pub video_id: String,
    pub duration_s: f64,
    pub entities: Vec<EntityRef>,
    pub tuples: Vec<EventTuple>,
}

impl SceneGraph {
    pub fn entity(&self, entity_id: &str) -> Option<&EntityRef> {
        self.entities.iter().find(|e| e.entity_id == entity_id)
    }

    pub fn tuple(&self, tuple_id: &str) -> Option<&EventTuple> {
        self.tuples.iter().find(|t| t.tuple_id == tuple_id)
    }

    /// Every attribute value of `attr_type` ever attributed to the entity, as subject or object.
    pub fn attribute_values_of<'a>(&'a self, entity_id: &str, attr_type: &'a str) -> Vec<&'a str> {
        let mut out = Vec::new();
        for t in &self.tuples {
            if t.subject.entity_id == entity_id {
                out.extend(t.subject_attrs_of(attr_type).map(|a| a.value.as_str()));
            }
            if t.object.as_ref().is_some_and(|o| o.entity_id == entity_id) {
                out.extend(t.object_attrs_of(attr_type).map(|a| a.value.as_str()));
            }
        }
        out
    }

    /// Every predicate value of `pred_type` whose subject is the entity.
    pub fn predicate_values_of<'a>(&'a self, entity_id: &str, pred_type: &'a str) -> Vec<&'a str> {
        self.tuples
            .iter()
            .filter(|t| t.subject.entity_id == entity_id)
            .filter_map(|t| t.predicate.as_ref())
            .filter(|p| p.pred_type == pred_type)
            .map(|p| p.value.as_str())
            .collect()
    }
}
