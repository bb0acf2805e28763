//! JSON document form of a scene graph. Tuples reference entities by id.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::types::{
    AttributeValue, EntityRef, EventTuple, PredicateValue, SceneGraph, SceneGraphError,
    TimeInterval,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneGraphDocument {
    pub video_id: String,
    pub duration_s: f64,
    pub entities: Vec<EntityRef>,
    #[serde(default)]
    pub tuples: Vec<TupleDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleDocument {
    pub tuple_id: String,
    pub subject: String,
    #[serde(default)]
    pub subject_attrs: Vec<AttributeValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<PredicateValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
    #[serde(default)]
    pub object_attrs: Vec<AttributeValue>,
    pub time: TimeInterval,
}

/// Parses and checks a canonical scene-graph document.
pub fn parse_scene_graph(text: &str) -> Result<SceneGraph, SceneGraphError> {
    let doc: SceneGraphDocument =
        serde_json::from_str(text).map_err(|e| SceneGraphError::MalformedDocument(e.to_string()))?;
    SceneGraph::try_from(doc)
}

pub fn read_scene_graph(path: &Path) -> Result<SceneGraph, SceneGraphError> {
    let text = std::fs::read_to_string(path).map_err(|source| SceneGraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scene_graph(&text)
}

/// Serializes a graph back into its document form.
pub fn to_document_json(graph: &SceneGraph) -> String {
    serde_json::to_string(&SceneGraphDocument::from(graph)).expect("document serialization")
}

impl TryFrom<SceneGraphDocument> for SceneGraph {
    type Error = SceneGraphError;

    fn try_from(doc: SceneGraphDocument) -> Result<Self, Self::Error> {
        if !(doc.duration_s.is_finite() && doc.duration_s >= 0.0) {
            return Err(SceneGraphError::InvalidDuration(doc.duration_s));
        }
        let mut by_id: HashMap<&str, &EntityRef> = HashMap::new();
        for e in &doc.entities {
            if e.entity_id.is_empty() {
                return Err(SceneGraphError::EmptyEntityId);
            }
            if by_id.insert(e.entity_id.as_str(), e).is_some() {
                return Err(SceneGraphError::DuplicateEntityId(e.entity_id.clone()));
            }
        }
        let resolve = |tuple_id: &str, id: &str| {
            by_id
                .get(id)
                .map(|e| (*e).clone())
                .ok_or_else(|| SceneGraphError::DanglingEntityRef {
                    tuple_id: tuple_id.to_string(),
                    entity_id: id.to_string(),
                })
        };

        let mut seen = HashSet::new();
        let mut tuples = Vec::with_capacity(doc.tuples.len());
        for t in &doc.tuples {
            if !seen.insert(t.tuple_id.as_str()) {
                return Err(SceneGraphError::DuplicateTupleId(t.tuple_id.clone()));
            }
            let subject = resolve(&t.tuple_id, &t.subject)?;
            let object = t.object.as_deref().map(|o| resolve(&t.tuple_id, o)).transpose()?;
            if !t.time.is_valid() {
                return Err(SceneGraphError::InvalidInterval {
                    tuple_id: t.tuple_id.clone(),
                    start_s: t.time.start_s,
                    end_s: t.time.end_s,
                });
            }
            if t.time.end_s > doc.duration_s {
                return Err(SceneGraphError::IntervalOutOfRange {
                    tuple_id: t.tuple_id.clone(),
                    start_s: t.time.start_s,
                    end_s: t.time.end_s,
                    duration_s: doc.duration_s,
                });
            }
            if t.predicate.is_none() && t.subject_attrs.is_empty() {
                return Err(SceneGraphError::EmptyObservation(t.tuple_id.clone()));
            }
            if object.is_none() && !t.object_attrs.is_empty() {
                return Err(SceneGraphError::OrphanObjectAttributes(t.tuple_id.clone()));
            }
            tuples.push(EventTuple {
                tuple_id: t.tuple_id.clone(),
                subject,
                subject_attrs: t.subject_attrs.clone(),
                predicate: t.predicate.clone(),
                object,
                object_attrs: t.object_attrs.clone(),
                time: t.time,
            });
        }
        Ok(SceneGraph {
            video_id: doc.video_id,
            duration_s: doc.duration_s,
            entities: doc.entities,
            tuples,
        })
    }
}

impl From<&SceneGraph> for SceneGraphDocument {
    fn from(g: &SceneGraph) -> Self {
        SceneGraphDocument {
            video_id: g.video_id.clone(),
            duration_s: g.duration_s,
            entities: g.entities.clone(),
            tuples: g
                .tuples
                .iter()
                .map(|t| TupleDocument {
                    tuple_id: t.tuple_id.clone(),
                    subject: t.subject.entity_id.clone(),
                    subject_attrs: t.subject_attrs.clone(),
                    predicate: t.predicate.clone(),
                    object: t.object.as_ref().map(|o| o.entity_id.clone()),
                    object_attrs: t.object_attrs.clone(),
                    time: t.time,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"video_id":"v0","duration_s":10,"entities":[{"entity_id":"e1","name":"man"}],"tuples":[]}"#;

    #[test]
    fn minimal_document() {
        let g = parse_scene_graph(MINIMAL).unwrap();
        assert_eq!(g.entities.len(), 1);
        assert!(g.tuples.is_empty());
    }

    #[test]
    fn dangling_entity() {
        let doc = r#"{"video_id":"v0","duration_s":10,
            "entities":[{"entity_id":"e1","name":"man"}],
            "tuples":[{"tuple_id":"t1","subject":"e1","predicate":{"value":"holds","pred_type":"Contact"},
                       "object":"e9","time":{"start_s":0,"end_s":1}}]}"#;
        match parse_scene_graph(doc) {
            Err(SceneGraphError::DanglingEntityRef { entity_id, .. }) => assert_eq!(entity_id, "e9"),
            other => panic!("expected DanglingEntityRef, got {other:?}"),
        }
    }

    #[test]
    fn interval_beyond_duration() {
        let doc = r#"{"video_id":"v0","duration_s":5,
            "entities":[{"entity_id":"e1","name":"man"}],
            "tuples":[{"tuple_id":"t1","subject":"e1","predicate":{"value":"walks","pred_type":"Action"},
                       "time":{"start_s":4,"end_s":6}}]}"#;
        assert!(matches!(
            parse_scene_graph(doc),
            Err(SceneGraphError::IntervalOutOfRange { .. })
        ));
    }

    #[test]
    fn reversed_interval() {
        let doc = r#"{"video_id":"v0","duration_s":5,
            "entities":[{"entity_id":"e1","name":"man"}],
            "tuples":[{"tuple_id":"t1","subject":"e1","predicate":{"value":"walks","pred_type":"Action"},
                       "time":{"start_s":3,"end_s":2}}]}"#;
        assert!(matches!(
            parse_scene_graph(doc),
            Err(SceneGraphError::InvalidInterval { .. })
        ));
    }

    #[test]
    fn syntax_error_is_malformed() {
        assert!(matches!(
            parse_scene_graph("{\"video_id\": "),
            Err(SceneGraphError::MalformedDocument(_))
        ));
        // unknown keys are rejected too
        assert!(matches!(
            parse_scene_graph(r#"{"video_id":"v","duration_s":1,"entities":[],"frames":[]}"#),
            Err(SceneGraphError::MalformedDocument(_))
        ));
    }

    #[test]
    fn structural_invariants() {
        let dup = r#"{"video_id":"v","duration_s":1,"entities":[{"entity_id":"a","name":"x"},{"entity_id":"a","name":"y"}]}"#;
        assert!(matches!(parse_scene_graph(dup), Err(SceneGraphError::DuplicateEntityId(_))));
        let empty_id = r#"{"video_id":"v","duration_s":1,"entities":[{"entity_id":"","name":"x"}]}"#;
        assert!(matches!(parse_scene_graph(empty_id), Err(SceneGraphError::EmptyEntityId)));
        let bare = r#"{"video_id":"v","duration_s":1,"entities":[{"entity_id":"a","name":"x"}],
            "tuples":[{"tuple_id":"t","subject":"a","time":{"start_s":0,"end_s":1}}]}"#;
        assert!(matches!(parse_scene_graph(bare), Err(SceneGraphError::EmptyObservation(_))));
        let orphan = r#"{"video_id":"v","duration_s":1,"entities":[{"entity_id":"a","name":"x"}],
            "tuples":[{"tuple_id":"t","subject":"a","subject_attrs":[{"value":"red","attr_type":"Color"}],
            "object_attrs":[{"value":"red","attr_type":"Color"}],"time":{"start_s":0,"end_s":1}}]}"#;
        assert!(matches!(parse_scene_graph(orphan), Err(SceneGraphError::OrphanObjectAttributes(_))));
    }
}
