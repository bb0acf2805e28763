use serde::Serialize;

use super::profile::{DatasetProfile, TypeKind};
use super::types::{AttributeValue, SceneGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    UnknownPredicateType { tuple_id: String, pred_type: String },
    UnknownAttributeType { tuple_id: String, attr_type: String },
    OutOfVocabularyValue { tuple_id: String, type_name: String, value: String },
}

/// Lists every type or value in the graph that the profile does not license.
pub fn validate(graph: &SceneGraph, profile: &DatasetProfile) -> Vec<Violation> {
    let mut out = Vec::new();
    for t in &graph.tuples {
        if let Some(p) = &t.predicate {
            if profile.type_kind(&p.pred_type) != Some(TypeKind::Predicate) {
                out.push(Violation::UnknownPredicateType {
                    tuple_id: t.tuple_id.clone(),
                    pred_type: p.pred_type.clone(),
                });
            } else if !profile.licenses(&p.pred_type, &p.value) {
                out.push(Violation::OutOfVocabularyValue {
                    tuple_id: t.tuple_id.clone(),
                    type_name: p.pred_type.clone(),
                    value: p.value.clone(),
                });
            }
        }
        for a in t.subject_attrs.iter().chain(&t.object_attrs) {
            check_attribute(&t.tuple_id, a, profile, &mut out);
        }
    }
    out
}

fn check_attribute(tuple_id: &str, a: &AttributeValue, profile: &DatasetProfile, out: &mut Vec<Violation>) {
    if profile.type_kind(&a.attr_type) != Some(TypeKind::Attribute) {
        out.push(Violation::UnknownAttributeType {
            tuple_id: tuple_id.to_string(),
            attr_type: a.attr_type.clone(),
        });
    } else if !profile.licenses(&a.attr_type, &a.value) {
        out.push(Violation::OutOfVocabularyValue {
            tuple_id: tuple_id.to_string(),
            type_name: a.attr_type.clone(),
            value: a.value.clone(),
        });
    }
}
