use serde::{Deserialize, Serialize};

use super::template::{CompiledTemplate, Polarity, Segment, SlotName, TemplateTable};
use super::CaptionError;
use crate::exec::Exec;
use crate::manipulator::{ManipulationCategory, ManipulationRecord, Target};
use crate::sg_model::{AttributeValue, EventTuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Renderer {
    Template,
    Llm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caption {
    pub text: String,
    pub polarity: Polarity,
    pub record_id: String,
    pub renderer: Renderer,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template_id: Option<String>,
    /// Slot values that must survive any rewriting verbatim: the factual values in a
    /// positive caption and the manipulated ones in a negative caption.
    #[serde(default)]
    pub anchors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptionPair {
    pub pair_id: String,
    pub video_id: String,
    pub category: ManipulationCategory,
    pub positive: Caption,
    pub negative: Caption,
}

fn join_attrs<'a>(attrs: impl Iterator<Item = &'a AttributeValue>) -> Option<String> {
    let values: Vec<&str> = attrs.map(|a| a.value.as_str()).collect();
    (!values.is_empty()).then(|| values.join(" and "))
}

struct SlotSource<'a> {
    tuples: Vec<&'a EventTuple>,
    category: &'a ManipulationCategory,
    connective: Option<&'a str>,
}

impl SlotSource<'_> {
    /// Attribute slots read the category's fine type when it targets attributes.
    fn attrs(&self, attrs: &[AttributeValue]) -> Option<String> {
        let fine = self.category.fine_type.as_str();
        if self.category.target == Target::Attribute {
            join_attrs(attrs.iter().filter(|a| a.attr_type == fine))
        } else {
            join_attrs(attrs.iter())
        }
    }

    fn fill(&self, name: SlotName, index: usize) -> Option<String> {
        if name == SlotName::Connective {
            return self.connective.map(str::to_string);
        }
        let t = self.tuples.get(index)?;
        match name {
            SlotName::Subject => Some(t.subject.name.clone()),
            SlotName::SubjectAttr => self.attrs(&t.subject_attrs),
            SlotName::Predicate => t.predicate.as_ref().map(|p| p.value.clone()),
            SlotName::Object => t.object.as_ref().map(|o| o.name.clone()),
            SlotName::ObjectAttr => self.attrs(&t.object_attrs),
            SlotName::Connective => unreachable!(),
        }
    }

    /// Renders `segments`, or reports the first slot that cannot be filled.
    fn render(&self, segments: &[Segment], out: &mut String) -> Result<(), (SlotName, usize)> {
        for s in segments {
            match s {
                Segment::Text(t) => out.push_str(t),
                Segment::Slot { name, index } => {
                    out.push_str(&self.fill(*name, *index).ok_or((*name, *index))?)
                }
                Segment::Optional(inner) => {
                    let mut buf = String::new();
                    if self.render(inner, &mut buf).is_ok() {
                        out.push_str(&buf);
                    }
                }
            }
        }
        Ok(())
    }
}

fn chronological(tuples: &[EventTuple]) -> Vec<&EventTuple> {
    let mut out: Vec<&EventTuple> = tuples.iter().collect();
    out.sort_by(|a, b| a.time.chronological(&b.time));
    out
}

fn render_one(
    record: &ManipulationRecord,
    template: &CompiledTemplate,
    tuples: &[EventTuple],
) -> Result<String, CaptionError> {
    let source = SlotSource {
        tuples: chronological(tuples),
        category: &record.category,
        connective: template.spec.connective.as_deref(),
    };
    let mut text = String::new();
    source
        .render(&template.segments, &mut text)
        .map_err(|(slot, index)| CaptionError::TemplateSlotMissing {
            template_id: template.spec.template_id.clone(),
            record_id: record.record_id.clone(),
            slot: if index == 0 {
                slot.as_str().to_string()
            } else {
                format!("{}.{}", slot.as_str(), index + 1)
            },
        })?;
    Ok(text)
}

fn push_unique(out: &mut Vec<String>, v: &str) {
    if !out.iter().any(|x| x == v) {
        out.push(v.to_string());
    }
}

/// Values present on one side of the manipulation but not the other, per tuple and slot.
/// A pure time swap changes no value, so its anchors are the predicates of both events.
fn anchors(record: &ManipulationRecord) -> (Vec<String>, Vec<String>) {
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for (o, m) in record.original.iter().zip(&record.manipulated) {
        let po = o.predicate.as_ref().map(|p| p.value.as_str());
        let pm = m.predicate.as_ref().map(|p| p.value.as_str());
        if po != pm {
            po.into_iter().for_each(|v| push_unique(&mut pos, v));
            pm.into_iter().for_each(|v| push_unique(&mut neg, v));
        }
        for (ao, am) in [(&o.subject_attrs, &m.subject_attrs), (&o.object_attrs, &m.object_attrs)] {
            for (x, y) in ao.iter().zip(am.iter()) {
                if x.value != y.value {
                    push_unique(&mut pos, &x.value);
                    push_unique(&mut neg, &y.value);
                }
            }
        }
    }
    if pos.is_empty() && neg.is_empty() {
        for t in chronological(&record.original) {
            if let Some(p) = &t.predicate {
                push_unique(&mut pos, &p.value);
            }
        }
        for t in chronological(&record.manipulated) {
            if let Some(p) = &t.predicate {
                push_unique(&mut neg, &p.value);
            }
        }
    }
    (pos, neg)
}

/// Renders the positive caption from the original tuples and the negative caption from the
/// manipulated ones.
pub fn render_pair(record: &ManipulationRecord, templates: &TemplateTable) -> Result<CaptionPair, CaptionError> {
    let (pos_anchors, neg_anchors) = anchors(record);
    let caption = |polarity: Polarity, tuples: &[EventTuple], anchors: Vec<String>| {
        let template = templates.lookup(&record.category, polarity)?;
        let text = render_one(record, template, tuples)?;
        if let Some(missing) = anchors.iter().find(|a| !text.contains(a.as_str())) {
            return Err(CaptionError::AnchorNotRendered {
                template_id: template.spec.template_id.clone(),
                record_id: record.record_id.clone(),
                value: missing.clone(),
            });
        }
        Ok(Caption {
            text,
            polarity,
            record_id: record.record_id.clone(),
            renderer: Renderer::Template,
            template_id: Some(template.spec.template_id.clone()),
            anchors,
        })
    };
    let positive = caption(Polarity::Positive, &record.original, pos_anchors)?;
    let negative = caption(Polarity::Negative, &record.manipulated, neg_anchors)?;
    if positive.text == negative.text {
        return Err(CaptionError::IdenticalCaptions(record.record_id.clone()));
    }
    Ok(CaptionPair {
        pair_id: record.record_id.clone(),
        video_id: record.video_id.clone(),
        category: record.category.clone(),
        positive,
        negative,
    })
}

/// Renders every record, keeping input order. Fails on the first record (in order) that
/// cannot be rendered.
pub fn render_all(
    records: &[ManipulationRecord],
    templates: &TemplateTable,
    exec: Exec,
) -> Result<Vec<CaptionPair>, CaptionError> {
    exec.map_slice(records, |r| render_pair(r, templates)).into_iter().collect()
}
