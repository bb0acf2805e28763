use serde::{Deserialize, Serialize};

use super::category::{ManipulationCategory, Method, Target};
use super::ops::{
    neighborhood_attribute_swap_of_type, temporal_predicate_swap, Slot,
};
use super::pool::build_pool;
use crate::sg_model::{DatasetProfile, EventTuple, SceneGraph, TimeInterval};

/// One place in a graph where a category's operator applies.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Site {
    TemporalPredicate {
        first: String,
        second: String,
    },
    TemporalAttribute {
        first: String,
        second: String,
        attr_type: String,
        first_value: String,
        second_value: String,
    },
    Neighborhood {
        tuple_id: String,
        attr_type: String,
    },
    Counterfactual {
        tuple_id: String,
        slot: Slot,
        fine_type: String,
    },
}

impl Site {
    pub fn tuple_ids(&self) -> Vec<&str> {
        match self {
            Site::TemporalPredicate { first, second }
            | Site::TemporalAttribute { first, second, .. } => vec![first, second],
            Site::Neighborhood { tuple_id, .. } | Site::Counterfactual { tuple_id, .. } => {
                vec![tuple_id]
            }
        }
    }
}

/// Lists every site of `category` in the graph, sorted by tuple id.
pub fn enumerate_candidates(
    graph: &SceneGraph,
    profile: &DatasetProfile,
    category: &ManipulationCategory,
) -> Vec<Site> {
    let mut tuples: Vec<&EventTuple> = graph.tuples.iter().collect();
    tuples.sort_by(|a, b| a.tuple_id.cmp(&b.tuple_id));
    let fine = category.fine_type.as_str();

    let mut sites = match (category.method, category.target) {
        (Method::Temporal, Target::Predicate) => {
            let typed: Vec<&EventTuple> = tuples
                .iter()
                .copied()
                .filter(|t| t.pred_type() == Some(fine))
                .collect();
            let mut out = Vec::new();
            for (i, a) in typed.iter().enumerate() {
                for b in &typed[i + 1..] {
                    if temporal_predicate_swap(a, b).is_ok() {
                        out.push(Site::TemporalPredicate {
                            first: a.tuple_id.clone(),
                            second: b.tuple_id.clone(),
                        });
                    }
                }
            }
            out
        }
        (Method::Temporal, Target::Attribute) => temporal_attribute_sites(&tuples, fine),
        (Method::Neighborhood, _) => tuples
            .iter()
            .filter(|t| neighborhood_attribute_swap_of_type(t, fine).is_ok())
            .map(|t| Site::Neighborhood {
                tuple_id: t.tuple_id.clone(),
                attr_type: fine.to_string(),
            })
            .collect(),
        (Method::Counterfactual, target) => {
            let slot = match target {
                Target::Predicate => Slot::Predicate,
                Target::Attribute => Slot::SubjectAttribute,
            };
            tuples
                .iter()
                .filter(|t| match slot {
                    Slot::Predicate => t.pred_type() == Some(fine),
                    _ => t.subject_attrs_of(fine).next().is_some(),
                })
                .filter(|t| {
                    build_pool(graph, profile, slot, fine, &t.subject.entity_id)
                        .is_ok_and(|p| p.usable_count() > 0)
                })
                .map(|t| Site::Counterfactual {
                    tuple_id: t.tuple_id.clone(),
                    slot,
                    fine_type: fine.to_string(),
                })
                .collect()
        }
    };
    sites.sort();
    sites
}

struct Observation<'a> {
    tuple_id: &'a str,
    entity_id: &'a str,
    value: &'a str,
    time: TimeInterval,
}

fn temporal_attribute_sites(tuples: &[&EventTuple], attr_type: &str) -> Vec<Site> {
    let mut obs: Vec<Observation> = Vec::new();
    for t in tuples {
        for a in t.subject_attrs_of(attr_type) {
            let duplicate = obs.iter().any(|o| {
                o.entity_id == t.subject.entity_id && o.value == a.value && o.time == t.time
            });
            if !duplicate {
                obs.push(Observation {
                    tuple_id: &t.tuple_id,
                    entity_id: &t.subject.entity_id,
                    value: &a.value,
                    time: t.time,
                });
            }
        }
    }
    let mut out = Vec::new();
    for (i, a) in obs.iter().enumerate() {
        for b in &obs[i + 1..] {
            if a.entity_id == b.entity_id && a.value != b.value && a.time != b.time {
                out.push(Site::TemporalAttribute {
                    first: a.tuple_id.to_string(),
                    second: b.tuple_id.to_string(),
                    attr_type: attr_type.to_string(),
                    first_value: a.value.to_string(),
                    second_value: b.value.to_string(),
                });
            }
        }
    }
    out
}
