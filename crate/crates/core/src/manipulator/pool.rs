use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ops::{ManipulationError, Slot};
use crate::sg_model::{DatasetProfile, SceneGraph, TypeKind};

/// Counterfactual candidates of one fine-grained type, minus values known to be true.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatePool {
    pub fine_type: String,
    /// Profile vocabulary order.
    pub values: Vec<String>,
    pub exclusions: BTreeSet<String>,
}

impl CandidatePool {
    pub fn usable(&self) -> impl Iterator<Item = &String> {
        self.values.iter().filter(|v| !self.exclusions.contains(*v))
    }

    pub fn usable_count(&self) -> usize {
        self.usable().count()
    }
}

/// Builds the pool for `slot` on `entity_id`.
///
/// Exclusions are every value of `fine_type` the graph truthfully attributes to the entity:
/// its predicates (as subject) for the predicate slot, its attributes (as subject or object)
/// for attribute slots.
pub fn build_pool(
    graph: &SceneGraph,
    profile: &DatasetProfile,
    slot: Slot,
    fine_type: &str,
    entity_id: &str,
) -> Result<CandidatePool, ManipulationError> {
    let expected = match slot {
        Slot::Predicate => TypeKind::Predicate,
        Slot::SubjectAttribute | Slot::ObjectAttribute => TypeKind::Attribute,
    };
    if profile.type_kind(fine_type) != Some(expected) {
        return Err(ManipulationError::UnknownType(fine_type.to_string()));
    }
    let values = profile.vocabulary(fine_type).unwrap_or_default().to_vec();
    let truthful = match slot {
        Slot::Predicate => graph.predicate_values_of(entity_id, fine_type),
        _ => graph.attribute_values_of(entity_id, fine_type),
    };
    Ok(CandidatePool {
        fine_type: fine_type.to_string(),
        values,
        exclusions: truthful.into_iter().map(str::to_string).collect(),
    })
}
