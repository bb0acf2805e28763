//! The manipulation operators. All are pure functions of tuple contents.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::pool::CandidatePool;
use crate::sg_model::{AttributeValue, EntityRef, EventTuple, TimeInterval};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManipulationError {
    #[error("both events share the same interval")]
    SameTimestamp,
    #[error("type mismatch: {0:?} vs {1:?}")]
    TypeMismatch(String, String),
    #[error("events are identical apart from time, so swapping is vacuous")]
    IdenticalKeys,
    #[error("tuple {0} has no predicate")]
    MissingPredicate(String),
    #[error("observations concern different subjects ({0} vs {1})")]
    SubjectMismatch(String, String),
    #[error("swap leaves the values unchanged")]
    NoObservableChange,
    #[error("operator not applicable: {0}")]
    NotApplicable(String),
    #[error("no usable counterfactual candidate of type {0:?}")]
    EmptyPool(String),
    #[error("tuple has no {slot} of type {fine_type:?}")]
    SlotAbsent { slot: Slot, fine_type: String },
    #[error("type {0:?} is not defined by the profile")]
    UnknownType(String),
}

/// The tuple position a counterfactual substitution replaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Predicate,
    SubjectAttribute,
    ObjectAttribute,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slot::Predicate => "predicate",
            Slot::SubjectAttribute => "subject attribute",
            Slot::ObjectAttribute => "object attribute",
        })
    }
}

/// A single attribute of one subject holding over an interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeObservation {
    pub subject: EntityRef,
    pub attr: AttributeValue,
    pub time: TimeInterval,
}

/// Exchanges the intervals of two predicate events of the same predicate type.
pub fn temporal_predicate_swap(
    e1: &EventTuple,
    e2: &EventTuple,
) -> Result<(EventTuple, EventTuple), ManipulationError> {
    let p1 = e1
        .predicate
        .as_ref()
        .ok_or_else(|| ManipulationError::MissingPredicate(e1.tuple_id.clone()))?;
    let p2 = e2
        .predicate
        .as_ref()
        .ok_or_else(|| ManipulationError::MissingPredicate(e2.tuple_id.clone()))?;
    if p1.pred_type != p2.pred_type {
        return Err(ManipulationError::TypeMismatch(
            p1.pred_type.clone(),
            p2.pred_type.clone(),
        ));
    }
    if e1.time == e2.time {
        return Err(ManipulationError::SameTimestamp);
    }
    if e1.same_key(e2) {
        return Err(ManipulationError::IdenticalKeys);
    }
    let mut a = e1.clone();
    let mut b = e2.clone();
    std::mem::swap(&mut a.time, &mut b.time);
    Ok((a, b))
}

/// Exchanges the values of two same-type observations of one subject across their intervals.
pub fn temporal_attribute_swap(
    o1: &AttributeObservation,
    o2: &AttributeObservation,
) -> Result<(AttributeObservation, AttributeObservation), ManipulationError> {
    if o1.subject.entity_id != o2.subject.entity_id {
        return Err(ManipulationError::SubjectMismatch(
            o1.subject.entity_id.clone(),
            o2.subject.entity_id.clone(),
        ));
    }
    if o1.attr.attr_type != o2.attr.attr_type {
        return Err(ManipulationError::TypeMismatch(
            o1.attr.attr_type.clone(),
            o2.attr.attr_type.clone(),
        ));
    }
    if o1.attr.value == o2.attr.value {
        return Err(ManipulationError::NoObservableChange);
    }
    if o1.time == o2.time {
        return Err(ManipulationError::SameTimestamp);
    }
    let mut a = o1.clone();
    let mut b = o2.clone();
    std::mem::swap(&mut a.attr.value, &mut b.attr.value);
    Ok((a, b))
}

/// Exchanges subject and object attributes of the lexicographically first attribute type
/// on which they differ.
pub fn neighborhood_attribute_swap(e: &EventTuple) -> Result<EventTuple, ManipulationError> {
    if e.object.is_none() {
        return Err(ManipulationError::NotApplicable(format!(
            "tuple {} has no object",
            e.tuple_id
        )));
    }
    let mut shared: Vec<&str> = e
        .subject_attrs
        .iter()
        .map(|a| a.attr_type.as_str())
        .filter(|t| e.object_attrs.iter().any(|o| o.attr_type == *t))
        .collect();
    shared.sort_unstable();
    shared.dedup();
    if shared.is_empty() {
        return Err(ManipulationError::NotApplicable(format!(
            "tuple {} has no attribute type shared by subject and object",
            e.tuple_id
        )));
    }
    for t in &shared {
        match neighborhood_attribute_swap_of_type(e, t) {
            Err(ManipulationError::NoObservableChange) => continue,
            other => return other,
        }
    }
    Err(ManipulationError::NoObservableChange)
}

/// Neighborhood swap restricted to one attribute type.
///
/// The k-th subject attribute of `attr_type` is exchanged with the k-th object attribute of
/// that type, for every k below the shorter of the two counts. With one attribute per side
/// this is a plain pair exchange; in general it stays an involution.
pub fn neighborhood_attribute_swap_of_type(
    e: &EventTuple,
    attr_type: &str,
) -> Result<EventTuple, ManipulationError> {
    if e.object.is_none() {
        return Err(ManipulationError::NotApplicable(format!(
            "tuple {} has no object",
            e.tuple_id
        )));
    }
    let subj: Vec<usize> = positions(&e.subject_attrs, attr_type);
    let obj: Vec<usize> = positions(&e.object_attrs, attr_type);
    if subj.is_empty() || obj.is_empty() {
        return Err(ManipulationError::NotApplicable(format!(
            "tuple {} lacks a {attr_type} attribute on both subject and object",
            e.tuple_id
        )));
    }
    let pairs: Vec<(usize, usize)> = subj.into_iter().zip(obj).collect();
    if pairs
        .iter()
        .all(|&(s, o)| e.subject_attrs[s].value == e.object_attrs[o].value)
    {
        return Err(ManipulationError::NoObservableChange);
    }
    let mut out = e.clone();
    for (s, o) in pairs {
        std::mem::swap(&mut out.subject_attrs[s].value, &mut out.object_attrs[o].value);
    }
    Ok(out)
}

fn positions(attrs: &[AttributeValue], attr_type: &str) -> Vec<usize> {
    attrs
        .iter()
        .enumerate()
        .filter(|(_, a)| a.attr_type == attr_type)
        .map(|(i, _)| i)
        .collect()
}

/// Replaces the slot's value with a uniformly drawn usable candidate from `pool`.
///
/// For attribute slots the first attribute of `pool.fine_type` is replaced. The current
/// value is never drawn, even if the pool does not exclude it.
pub fn counterfactual_substitute<R: Rng + ?Sized>(
    e: &EventTuple,
    slot: Slot,
    pool: &CandidatePool,
    rng: &mut R,
) -> Result<EventTuple, ManipulationError> {
    let absent = || ManipulationError::SlotAbsent {
        slot,
        fine_type: pool.fine_type.clone(),
    };
    let mut out = e.clone();
    let target: &mut String = match slot {
        Slot::Predicate => {
            let p = out.predicate.as_mut().ok_or_else(absent)?;
            if p.pred_type != pool.fine_type {
                return Err(ManipulationError::TypeMismatch(
                    p.pred_type.clone(),
                    pool.fine_type.clone(),
                ));
            }
            &mut p.value
        }
        Slot::SubjectAttribute => {
            &mut out
                .subject_attrs
                .iter_mut()
                .find(|a| a.attr_type == pool.fine_type)
                .ok_or_else(absent)?
                .value
        }
        Slot::ObjectAttribute => {
            &mut out
                .object_attrs
                .iter_mut()
                .find(|a| a.attr_type == pool.fine_type)
                .ok_or_else(absent)?
                .value
        }
    };
    let usable: Vec<&String> = pool.usable().filter(|v| *v != target).collect();
    if usable.is_empty() {
        return Err(ManipulationError::EmptyPool(pool.fine_type.clone()));
    }
    let pick = usable[rng.random_range(0..usable.len())].clone();
    *target = pick;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use crate::sg_model::PredicateValue;
    use std::collections::BTreeSet;

    fn entity(id: &str) -> EntityRef {
        EntityRef {
            entity_id: id.into(),
            name: id.into(),
            entity_class: None,
        }
    }

    fn pred_tuple(id: &str, subj: &str, pred: &str, ptype: &str, start: f64, end: f64) -> EventTuple {
        EventTuple {
            tuple_id: id.into(),
            subject: entity(subj),
            subject_attrs: vec![],
            predicate: Some(PredicateValue::new(pred, ptype)),
            object: None,
            object_attrs: vec![],
            time: TimeInterval::new(start, end),
        }
    }

    fn obs(subj: &str, value: &str, start: f64, end: f64) -> AttributeObservation {
        AttributeObservation {
            subject: entity(subj),
            attr: AttributeValue::new(value, "Color"),
            time: TimeInterval::new(start, end),
        }
    }

    #[test]
    fn temporal_predicate_exchanges_times_only() {
        let knife = pred_tuple("t1", "knife", "sliding", "Action", 2.0, 4.0);
        let oven = pred_tuple("t2", "oven", "opened", "Action", 10.0, 12.0);
        let (a, b) = temporal_predicate_swap(&knife, &oven).unwrap();
        assert_eq!(a.time, oven.time);
        assert_eq!(b.time, knife.time);
        assert!(a.same_key(&knife) && b.same_key(&oven));
        assert_eq!((a.tuple_id.as_str(), b.tuple_id.as_str()), ("t1", "t2"));
    }

    #[test]
    fn temporal_predicate_errors() {
        let a = pred_tuple("t1", "a", "runs", "Action", 0.0, 5.0);
        let b = pred_tuple("t2", "b", "jumps", "Action", 0.0, 5.0);
        assert_eq!(temporal_predicate_swap(&a, &b), Err(ManipulationError::SameTimestamp));
        let c = pred_tuple("t3", "b", "holds", "Contact", 6.0, 7.0);
        assert!(matches!(
            temporal_predicate_swap(&a, &c),
            Err(ManipulationError::TypeMismatch(..))
        ));
        let d = pred_tuple("t4", "a", "runs", "Action", 8.0, 9.0);
        assert_eq!(temporal_predicate_swap(&a, &d), Err(ManipulationError::IdenticalKeys));
    }

    #[test]
    fn temporal_attribute_bike_turns_black() {
        let (a, b) = temporal_attribute_swap(&obs("bike", "yellow", 0.0, 5.0), &obs("bike", "black", 20.0, 25.0)).unwrap();
        assert_eq!(a, obs("bike", "black", 0.0, 5.0));
        assert_eq!(b, obs("bike", "yellow", 20.0, 25.0));
    }

    #[test]
    fn temporal_attribute_errors() {
        assert_eq!(
            temporal_attribute_swap(&obs("bike", "black", 0.0, 5.0), &obs("bike", "black", 20.0, 25.0)),
            Err(ManipulationError::NoObservableChange)
        );
        assert!(matches!(
            temporal_attribute_swap(&obs("bike", "black", 0.0, 5.0), &obs("car", "red", 20.0, 25.0)),
            Err(ManipulationError::SubjectMismatch(..))
        ));
    }

    fn smoke_ring(subj_attr: AttributeValue, obj_attr: AttributeValue) -> EventTuple {
        EventTuple {
            tuple_id: "t1".into(),
            subject: entity("smoke ring"),
            subject_attrs: vec![subj_attr],
            predicate: Some(PredicateValue::new("rises from", "SpatialRelationship")),
            object: Some(entity("pipe")),
            object_attrs: vec![obj_attr],
            time: TimeInterval::new(0.0, 3.0),
        }
    }

    #[test]
    fn neighborhood_smoke_ring_and_pipe() {
        let e = smoke_ring(AttributeValue::new("white", "Color"), AttributeValue::new("brown", "Color"));
        let out = neighborhood_attribute_swap(&e).unwrap();
        assert_eq!(out.subject_attrs, vec![AttributeValue::new("brown", "Color")]);
        assert_eq!(out.object_attrs, vec![AttributeValue::new("white", "Color")]);
        assert_eq!(out.predicate, e.predicate);
    }

    #[test]
    fn neighborhood_errors() {
        let mixed = smoke_ring(AttributeValue::new("white", "Color"), AttributeValue::new("wood", "Material"));
        assert!(matches!(neighborhood_attribute_swap(&mixed), Err(ManipulationError::NotApplicable(_))));
        let same = smoke_ring(AttributeValue::new("white", "Color"), AttributeValue::new("white", "Color"));
        assert_eq!(neighborhood_attribute_swap(&same), Err(ManipulationError::NoObservableChange));
        let mut no_obj = same.clone();
        no_obj.object = None;
        no_obj.object_attrs.clear();
        assert!(matches!(neighborhood_attribute_swap(&no_obj), Err(ManipulationError::NotApplicable(_))));
    }

    #[test]
    fn neighborhood_picks_first_differing_type() {
        let mut e = smoke_ring(AttributeValue::new("white", "Color"), AttributeValue::new("white", "Color"));
        e.subject_attrs.push(AttributeValue::new("wood", "Material"));
        e.object_attrs.push(AttributeValue::new("clay", "Material"));
        let out = neighborhood_attribute_swap(&e).unwrap();
        assert_eq!(out.subject_attrs[1].value, "clay");
        assert_eq!(out.subject_attrs[0].value, "white");
    }

    fn pool(values: &[&str], exclusions: &[&str]) -> CandidatePool {
        CandidatePool {
            fine_type: "Color".into(),
            values: values.iter().map(|v| v.to_string()).collect(),
            exclusions: exclusions.iter().map(|v| v.to_string()).collect::<BTreeSet<_>>(),
        }
    }

    #[test]
    fn counterfactual_is_deterministic_and_false() {
        let mut bike = pred_tuple("t1", "bike", "parked", "Action", 0.0, 5.0);
        bike.subject_attrs.push(AttributeValue::new("black", "Color"));
        let p = pool(&["black", "shiny", "red", "blue"], &["black"]);
        let a = counterfactual_substitute(&bike, Slot::SubjectAttribute, &p, &mut rng_from_seed(7)).unwrap();
        let b = counterfactual_substitute(&bike, Slot::SubjectAttribute, &p, &mut rng_from_seed(7)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.subject_attrs[0].value, "black");
        assert_eq!(a.subject_attrs[0].attr_type, "Color");
        assert_eq!(a.predicate, bike.predicate);
    }

    #[test]
    fn counterfactual_errors() {
        let mut bike = pred_tuple("t1", "bike", "parked", "Action", 0.0, 5.0);
        bike.subject_attrs.push(AttributeValue::new("black", "Color"));
        let all_excluded = pool(&["black", "red"], &["black", "red"]);
        assert_eq!(
            counterfactual_substitute(&bike, Slot::SubjectAttribute, &all_excluded, &mut rng_from_seed(1)),
            Err(ManipulationError::EmptyPool("Color".into()))
        );
        let p = pool(&["red"], &[]);
        assert!(matches!(
            counterfactual_substitute(&bike, Slot::ObjectAttribute, &p, &mut rng_from_seed(1)),
            Err(ManipulationError::SlotAbsent { .. })
        ));
        assert!(matches!(
            counterfactual_substitute(&bike, Slot::Predicate, &p, &mut rng_from_seed(1)),
            Err(ManipulationError::TypeMismatch(..))
        ));
    }
}
