use std::collections::BTreeMap;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::category::ManipulationCategory;
use super::enumerate::{enumerate_candidates, Site};
use super::ops::{
    counterfactual_substitute, neighborhood_attribute_swap_of_type, temporal_attribute_swap,
    temporal_predicate_swap, AttributeObservation,
};
use super::pool::build_pool;
use crate::exec::Exec;
use crate::seed::{derive_seed, rng_from_seed};
use crate::sg_model::{DatasetProfile, EventTuple, SceneGraph};

/// A foil together with the facts it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManipulationRecord {
    pub record_id: String,
    pub category: ManipulationCategory,
    pub video_id: String,
    pub source_tuple_ids: Vec<String>,
    pub original: Vec<EventTuple>,
    pub manipulated: Vec<EventTuple>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_size: Option<usize>,
}

/// Per-category maximum record counts, keyed `method.target.fine_type`.
/// Categories without an entry are unbounded.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Quotas(pub BTreeMap<String, usize>);

impl Quotas {
    pub fn get(&self, category: &ManipulationCategory) -> Option<usize> {
        self.0.get(&category.key()).copied()
    }

    pub fn set(&mut self, category: &str, quota: usize) {
        self.0.insert(category.to_string(), quota);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SelectionRepr", into = "SelectionRepr")]
pub enum CategorySelection {
    #[default]
    AllFromProfile,
    Explicit(Vec<ManipulationCategory>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SelectionRepr {
    Tag(String),
    List(Vec<ManipulationCategory>),
}

const ALL_FROM_PROFILE: &str = "all-from-profile";

impl TryFrom<SelectionRepr> for CategorySelection {
    type Error = String;
    fn try_from(r: SelectionRepr) -> Result<Self, Self::Error> {
        match r {
            SelectionRepr::Tag(t) if t == ALL_FROM_PROFILE => Ok(CategorySelection::AllFromProfile),
            SelectionRepr::Tag(t) => Err(format!("unknown category selection {t:?}")),
            SelectionRepr::List(l) => Ok(CategorySelection::Explicit(l)),
        }
    }
}

impl From<CategorySelection> for SelectionRepr {
    fn from(s: CategorySelection) -> Self {
        match s {
            CategorySelection::AllFromProfile => SelectionRepr::Tag(ALL_FROM_PROFILE.into()),
            CategorySelection::Explicit(l) => SelectionRepr::List(l),
        }
    }
}

impl CategorySelection {
    pub fn resolve(&self, profile: &DatasetProfile) -> Vec<ManipulationCategory> {
        match self {
            CategorySelection::AllFromProfile => profile.categories.clone(),
            CategorySelection::Explicit(l) => l.clone(),
        }
    }
}

/// The manipulation stage's configuration document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManipulationConfig {
    pub seed: u64,
    #[serde(default)]
    pub quotas: Quotas,
    #[serde(default)]
    pub categories: CategorySelection,
}

/// Applies every profile category to one graph.
pub fn apply_all(
    graph: &SceneGraph,
    profile: &DatasetProfile,
    quotas: &Quotas,
    seed: u64,
) -> Vec<ManipulationRecord> {
    apply_all_corpus(
        std::slice::from_ref(graph),
        profile,
        &profile.categories,
        quotas,
        seed,
        Exec::default(),
    )
}

/// Applies the categories across a corpus. Quotas bound each category corpus-wide.
///
/// Output order is canonical: categories in the given order, then sites in (video id,
/// tuple id) order. Each category samples from its own stream seeded by
/// `derive_seed(seed, method, target, fine_type)`, and each record's seed is derived from the
/// category seed and the site ordinal.
pub fn apply_all_corpus(
    graphs: &[SceneGraph],
    profile: &DatasetProfile,
    categories: &[ManipulationCategory],
    quotas: &Quotas,
    seed: u64,
    exec: Exec,
) -> Vec<ManipulationRecord> {
    let mut order: Vec<&SceneGraph> = graphs.iter().collect();
    order.sort_by(|a, b| a.video_id.cmp(&b.video_id));

    let mut records = Vec::new();
    for category in categories {
        let per_video = exec.map_slice(&order, |g| enumerate_candidates(g, profile, category));
        let sites: Vec<(&SceneGraph, Site)> = order
            .iter()
            .zip(per_video)
            .flat_map(|(g, s)| s.into_iter().map(move |site| (*g, site)))
            .collect();

        let category_seed = category_seed(seed, category);
        let n = sites.len();
        let take = quotas.get(category).unwrap_or(n).min(n);
        let mut chosen: Vec<usize> = if take == n {
            (0..n).collect()
        } else {
            sample(&mut rng_from_seed(category_seed), n, take).into_vec()
        };
        chosen.sort_unstable();

        let built = exec.map_slice(&chosen, |&ordinal| {
            let (graph, site) = &sites[ordinal];
            let record_seed = derive_seed(category_seed, &[&(ordinal as u64).to_le_bytes()]);
            build_record(graph, profile, category, site, ordinal, record_seed)
        });
        records.extend(built);
    }
    records
}

pub(crate) fn category_seed(seed: u64, category: &ManipulationCategory) -> u64 {
    derive_seed(
        seed,
        &[
            category.method.as_str().as_bytes(),
            category.target.as_str().as_bytes(),
            category.fine_type.as_bytes(),
        ],
    )
}

fn build_record(
    graph: &SceneGraph,
    profile: &DatasetProfile,
    category: &ManipulationCategory,
    site: &Site,
    ordinal: usize,
    seed: u64,
) -> ManipulationRecord {
    let tuple = |id: &str| {
        graph
            .tuple(id)
            .unwrap_or_else(|| panic!("site references tuple {id} missing from {}", graph.video_id))
            .clone()
    };
    let applicable = "enumerated site must be applicable";
    let mut pool_size = None;
    let (original, manipulated) = match site {
        Site::TemporalPredicate { first, second } => {
            let (a, b) = (tuple(first), tuple(second));
            let (ma, mb) = temporal_predicate_swap(&a, &b).expect(applicable);
            (vec![a, b], vec![ma, mb])
        }
        Site::TemporalAttribute {
            first,
            second,
            attr_type,
            first_value,
            second_value,
        } => {
            let (a, b) = (tuple(first), tuple(second));
            let observe = |t: &EventTuple, value: &str| AttributeObservation {
                subject: t.subject.clone(),
                attr: crate::sg_model::AttributeValue::new(value, attr_type.as_str()),
                time: t.time,
            };
            let (oa, ob) =
                temporal_attribute_swap(&observe(&a, first_value), &observe(&b, second_value))
                    .expect(applicable);
            let ma = replace_subject_attr(&a, attr_type, first_value, &oa.attr.value);
            let mb = replace_subject_attr(&b, attr_type, second_value, &ob.attr.value);
            (vec![a, b], vec![ma, mb])
        }
        Site::Neighborhood { tuple_id, attr_type } => {
            let a = tuple(tuple_id);
            let m = neighborhood_attribute_swap_of_type(&a, attr_type).expect(applicable);
            (vec![a], vec![m])
        }
        Site::Counterfactual {
            tuple_id,
            slot,
            fine_type,
        } => {
            let a = tuple(tuple_id);
            let pool = build_pool(graph, profile, *slot, fine_type, &a.subject.entity_id)
                .expect(applicable);
            pool_size = Some(pool.usable_count());
            let m = counterfactual_substitute(&a, *slot, &pool, &mut rng_from_seed(seed))
                .expect(applicable);
            (vec![a], vec![m])
        }
    };
    ManipulationRecord {
        record_id: format!("{}:{}:{:06}", graph.video_id, category.key(), ordinal),
        category: category.clone(),
        video_id: graph.video_id.clone(),
        source_tuple_ids: site.tuple_ids().into_iter().map(str::to_string).collect(),
        original,
        manipulated,
        seed,
        pool_size,
    }
}

fn replace_subject_attr(t: &EventTuple, attr_type: &str, from: &str, to: &str) -> EventTuple {
    let mut out = t.clone();
    if let Some(a) = out
        .subject_attrs
        .iter_mut()
        .find(|a| a.attr_type == attr_type && a.value == from)
    {
        a.value = to.to_string();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_parses_both_forms() {
        let c: ManipulationConfig =
            serde_json::from_str(r#"{"seed":1,"categories":"all-from-profile"}"#).unwrap();
        assert_eq!(c.categories, CategorySelection::AllFromProfile);
        let c: ManipulationConfig = serde_json::from_str(
            r#"{"seed":1,"quotas":{"temporal.predicate.Action":2},"categories":["temporal.predicate.Action"]}"#,
        )
        .unwrap();
        assert!(matches!(c.categories, CategorySelection::Explicit(ref l) if l.len() == 1));
        assert!(serde_json::from_str::<ManipulationConfig>(r#"{"seed":1,"categories":"some"}"#).is_err());
    }

    #[test]
    fn empty_graph_yields_nothing() {
        let profile: DatasetProfile = serde_json::from_str(
            r#"{"name":"t","predicate_types":["Action"],"attribute_types":["Color"],
                "vocab":{"Action":["parks"],"Color":["red"]},
                "categories":["temporal.predicate.Action","counterfactual.attribute.Color"]}"#,
        )
        .unwrap();
        let g = SceneGraph {
            video_id: "v".into(),
            duration_s: 1.0,
            entities: vec![],
            tuples: vec![],
        };
        assert!(apply_all(&g, &profile, &Quotas::default(), 42).is_empty());
    }
}
