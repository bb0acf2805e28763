//! Random scene graphs that are valid under [`profile`].

use std::collections::BTreeMap;

use foilbench_core::manipulator::AttributeObservation;
use foilbench_core::sg_model::{
    AttributeValue, DatasetProfile, EntityRef, EventTuple, PredicateValue, SceneGraph, TimeInterval,
};
use rand::seq::IndexedRandom;
use rand::Rng;

pub const PREDICATE_TYPES: [&str; 2] = ["Action", "Contact"];
pub const ATTRIBUTE_TYPES: [&str; 2] = ["Color", "Material"];

pub fn vocab(type_name: &str) -> &'static [&'static str] {
    match type_name {
        "Action" => &["runs", "sits", "jumps", "carries", "throws", "waves"],
        "Contact" => &["holds", "touches", "pushes", "hugs", "kicks"],
        "Color" => &["red", "blue", "black", "white", "yellow", "green"],
        "Material" => &["wooden", "metal", "plastic", "glass"],
        other => panic!("no vocabulary for {other}"),
    }
}

pub fn profile() -> DatasetProfile {
    let all = PREDICATE_TYPES.iter().chain(&ATTRIBUTE_TYPES);
    let vocab: BTreeMap<String, Vec<String>> = all
        .map(|t| (t.to_string(), vocab(t).iter().map(|v| v.to_string()).collect()))
        .collect();
    DatasetProfile::new(
        "random".into(),
        PREDICATE_TYPES.map(String::from).to_vec(),
        ATTRIBUTE_TYPES.map(String::from).to_vec(),
        vocab,
        vec![],
    )
    .unwrap()
}

pub fn entity(k: usize) -> EntityRef {
    EntityRef {
        entity_id: format!("e{k}"),
        name: format!("entity {k}"),
        entity_class: None,
    }
}

fn pick<R: Rng>(rng: &mut R, items: &[&'static str]) -> &'static str {
    items.choose(rng).unwrap()
}

pub fn attrs<R: Rng>(rng: &mut R, max: usize) -> Vec<AttributeValue> {
    (0..rng.random_range(0..=max))
        .map(|_| {
            let t = pick(rng, &ATTRIBUTE_TYPES);
            AttributeValue::new(pick(rng, vocab(t)), t)
        })
        .collect()
}

/// Interval with a fractional start in `[0, 60)` and positive length.
pub fn interval<R: Rng>(rng: &mut R) -> TimeInterval {
    let start = rng.random_range(0.0..60.0f64);
    TimeInterval::new(start, start + rng.random_range(0.1..10.0f64))
}

pub fn predicate<R: Rng>(rng: &mut R, pred_type: &'static str) -> PredicateValue {
    PredicateValue::new(pick(rng, vocab(pred_type)), pred_type)
}

pub fn tuple<R: Rng>(rng: &mut R, id: usize, entities: usize) -> EventTuple {
    let subject = rng.random_range(0..entities);
    let has_predicate = rng.random_bool(0.8);
    let predicate = has_predicate.then(|| {
        let t = pick(rng, &PREDICATE_TYPES);
        predicate(rng, t)
    });
    let object = (has_predicate && entities > 1 && rng.random_bool(0.7)).then(|| {
        let o = (subject + rng.random_range(1..entities)) % entities;
        entity(o)
    });
    let mut subject_attrs = attrs(rng, 2);
    if predicate.is_none() && subject_attrs.is_empty() {
        let t = pick(rng, &ATTRIBUTE_TYPES);
        subject_attrs.push(AttributeValue::new(pick(rng, vocab(t)), t));
    }
    let object_attrs = if object.is_some() { attrs(rng, 2) } else { vec![] };
    EventTuple {
        tuple_id: format!("t{id:03}"),
        subject: entity(subject),
        subject_attrs,
        predicate,
        object,
        object_attrs,
        time: interval(rng),
    }
}

pub fn graph<R: Rng>(rng: &mut R, video_id: &str) -> SceneGraph {
    let entities = rng.random_range(1..=5);
    let tuples = (0..rng.random_range(1..=12)).map(|i| tuple(rng, i, entities)).collect();
    SceneGraph {
        video_id: video_id.to_string(),
        duration_s: 80.0,
        entities: (0..entities).map(entity).collect(),
        tuples,
    }
}

/// Two tuples of one predicate type with distinct intervals and distinct keys.
pub fn temporal_predicate_pair<R: Rng>(rng: &mut R) -> (EventTuple, EventTuple) {
    loop {
        let t = pick(rng, &PREDICATE_TYPES);
        let mut a = tuple(rng, 0, 4);
        let mut b = tuple(rng, 1, 4);
        a.predicate = Some(predicate(rng, t));
        b.predicate = Some(predicate(rng, t));
        if a.time != b.time && !a.same_key(&b) {
            return (a, b);
        }
    }
}

/// Two observations of one subject, one attribute type, different values and intervals.
pub fn temporal_attribute_pair<R: Rng>(rng: &mut R) -> (AttributeObservation, AttributeObservation) {
    let subject = entity(rng.random_range(0..4));
    let t = pick(rng, &ATTRIBUTE_TYPES);
    let values = vocab(t);
    let i = rng.random_range(0..values.len());
    let j = (i + rng.random_range(1..values.len())) % values.len();
    let observe = |v: &str, time| AttributeObservation {
        subject: subject.clone(),
        attr: AttributeValue::new(v, t),
        time,
    };
    let (ta, mut tb) = (interval(rng), interval(rng));
    while tb == ta {
        tb = interval(rng);
    }
    (observe(values[i], ta), observe(values[j], tb))
}

/// A tuple with an object where subject and object differ on some shared attribute type.
pub fn neighborhood_tuple<R: Rng>(rng: &mut R) -> EventTuple {
    loop {
        let mut e = tuple(rng, 0, 3);
        if e.object.is_none() {
            e.predicate = Some(predicate(rng, "Contact"));
            e.object = Some(entity((e.subject.entity_id[1..].parse::<usize>().unwrap() + 1) % 3));
        }
        e.subject_attrs = attrs(rng, 3);
        e.object_attrs = attrs(rng, 3);
        // the k-th attribute of a type on one side pairs with the k-th on the other
        let differs = ATTRIBUTE_TYPES.iter().any(|t| {
            let s = e.subject_attrs.iter().filter(|a| a.attr_type == *t);
            let o = e.object_attrs.iter().filter(|a| a.attr_type == *t);
            s.zip(o).any(|(s, o)| s.value != o.value)
        });
        if differs {
            return e;
        }
    }
}
