use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::types::{AttributeValue, EntityRef, EventTuple, PredicateValue, SceneGraph, TimeInterval};

/// Tuple contents minus time; tuples sharing a key describe the same event.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EventKey {
    pub subject: EntityRef,
    pub subject_attrs: Vec<AttributeValue>,
    pub predicate: Option<PredicateValue>,
    pub object: Option<EntityRef>,
    pub object_attrs: Vec<AttributeValue>,
}

impl From<&EventTuple> for EventKey {
    fn from(t: &EventTuple) -> Self {
        EventKey {
            subject: t.subject.clone(),
            subject_attrs: t.subject_attrs.clone(),
            predicate: t.predicate.clone(),
            object: t.object.clone(),
            object_attrs: t.object_attrs.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub key: EventKey,
    /// Sorted by start, then end.
    pub intervals: Vec<TimeInterval>,
    pub tuple_ids: Vec<String>,
}

/// Groups tuples with identical keys into events, in order of first appearance.
pub fn index_events(graph: &SceneGraph) -> Vec<Event> {
    let mut slots: HashMap<EventKey, usize> = HashMap::new();
    let mut events: Vec<Event> = Vec::new();
    for t in &graph.tuples {
        let key = EventKey::from(t);
        let idx = *slots.entry(key.clone()).or_insert_with(|| {
            events.push(Event {
                key,
                intervals: Vec::new(),
                tuple_ids: Vec::new(),
            });
            events.len() - 1
        });
        events[idx].intervals.push(t.time);
        events[idx].tuple_ids.push(t.tuple_id.clone());
    }
    for e in &mut events {
        let mut paired: Vec<(TimeInterval, String)> =
            e.intervals.drain(..).zip(e.tuple_ids.drain(..)).collect();
        paired.sort_by(|a, b| a.0.chronological(&b.0).then_with(|| a.1.cmp(&b.1)));
        (e.intervals, e.tuple_ids) = paired.into_iter().unzip();
    }
    events
}
