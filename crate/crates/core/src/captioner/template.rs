use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CaptionError;
use crate::manipulator::ManipulationCategory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotName {
    Subject,
    SubjectAttr,
    Predicate,
    Object,
    ObjectAttr,
    Connective,
}

impl SlotName {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "subject" => SlotName::Subject,
            "subject_attr" => SlotName::SubjectAttr,
            "predicate" => SlotName::Predicate,
            "object" => SlotName::Object,
            "object_attr" => SlotName::ObjectAttr,
            "connective" => SlotName::Connective,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SlotName::Subject => "subject",
            SlotName::SubjectAttr => "subject_attr",
            SlotName::Predicate => "predicate",
            SlotName::Object => "object",
            SlotName::ObjectAttr => "object_attr",
            SlotName::Connective => "connective",
        }
    }
}

/// A parsed pattern piece. `{slot}` reads the first tuple and `{slot.2}` the second, tuples
/// being taken in chronological order. `[...]` is kept only when every slot inside it fills.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Segment {
    Text(String),
    Slot { name: SlotName, index: usize },
    Optional(Vec<Segment>),
}

fn parse_pattern(template_id: &str, pattern: &str) -> Result<Vec<Segment>, CaptionError> {
    let err = |message: String| CaptionError::TemplateSyntax {
        template_id: template_id.to_string(),
        message,
    };
    let chars: Vec<char> = pattern.chars().collect();
    let mut stack: Vec<Vec<Segment>> = vec![Vec::new()];
    let mut text = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if matches!(c, '{' | '[' | ']') && !text.is_empty() {
            stack.last_mut().unwrap().push(Segment::Text(std::mem::take(&mut text)));
        }
        match c {
            '{' => {
                let close = chars[i..]
                    .iter()
                    .position(|&c| c == '}')
                    .ok_or_else(|| err("unclosed '{'".into()))?;
                let body: String = chars[i + 1..i + close].iter().collect();
                let (name, index) = match body.split_once('.') {
                    Some((name, idx)) => match idx {
                        "1" => (name, 0),
                        "2" => (name, 1),
                        _ => return Err(err(format!("bad tuple index in {{{body}}}"))),
                    },
                    None => (body.as_str(), 0),
                };
                let name = SlotName::parse(name).ok_or_else(|| err(format!("unknown slot {{{body}}}")))?;
                stack.last_mut().unwrap().push(Segment::Slot { name, index });
                i += close;
            }
            '[' => stack.push(Vec::new()),
            ']' => {
                if stack.len() < 2 {
                    return Err(err("unbalanced ']'".into()));
                }
                let inner = stack.pop().unwrap();
                stack.last_mut().unwrap().push(Segment::Optional(inner));
            }
            '}' => return Err(err("stray '}'".into())),
            _ => text.push(c),
        }
        i += 1;
    }
    if stack.len() != 1 {
        return Err(err("unclosed '['".into()));
    }
    let mut top = stack.pop().unwrap();
    if !text.is_empty() {
        top.push(Segment::Text(text));
    }
    Ok(top)
}

fn visit_slots(segments: &[Segment], f: &mut impl FnMut(SlotName, usize)) {
    for s in segments {
        match s {
            Segment::Slot { name, index } => f(*name, *index),
            Segment::Optional(inner) => visit_slots(inner, f),
            Segment::Text(_) => {}
        }
    }
}

/// One row of the template table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateSpec {
    pub template_id: String,
    /// Category key `method.target.fine_type`; the fine type may be `*`.
    pub category: String,
    pub polarity: Polarity,
    pub pattern: String,
    /// Joins the two events of temporal patterns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connective: Option<String>,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledTemplate {
    pub spec: TemplateSpec,
    pub segments: Vec<Segment>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDocument {
    templates: Vec<TemplateSpec>,
}

/// A validated set of templates, looked up by category key and polarity.
#[derive(Debug, Clone)]
pub struct TemplateTable {
    templates: Vec<CompiledTemplate>,
}

const BUILTIN: &str = include_str!("../../data/templates.json");

impl TemplateTable {
    pub fn new(specs: Vec<TemplateSpec>) -> Result<Self, CaptionError> {
        let mut templates: Vec<CompiledTemplate> = Vec::with_capacity(specs.len());
        for spec in specs {
            if templates
                .iter()
                .any(|t| t.spec.category == spec.category && t.spec.polarity == spec.polarity)
            {
                return Err(CaptionError::DuplicateTemplate {
                    category: spec.category,
                    polarity: spec.polarity,
                });
            }
            let segments = parse_pattern(&spec.template_id, &spec.pattern)?;
            let mut needs_connective = false;
            visit_slots(&segments, &mut |name, _| needs_connective |= name == SlotName::Connective);
            if needs_connective && spec.connective.is_none() {
                return Err(CaptionError::TemplateSyntax {
                    template_id: spec.template_id,
                    message: "pattern uses {connective} but none is defined".into(),
                });
            }
            templates.push(CompiledTemplate { spec, segments });
        }
        Ok(Self { templates })
    }

    /// The table shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN).expect("builtin template table is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, CaptionError> {
        let doc: TableDocument =
            serde_json::from_str(text).map_err(|e| CaptionError::MalformedTemplates(e.to_string()))?;
        Self::new(doc.templates)
    }

    pub fn read(path: &Path) -> Result<Self, CaptionError> {
        let text = std::fs::read_to_string(path).map_err(|source| CaptionError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn specs(&self) -> impl Iterator<Item = &TemplateSpec> {
        self.templates.iter().map(|t| &t.spec)
    }

    /// Exact category key first, then the `method.target.*` wildcard.
    pub(crate) fn lookup(
        &self,
        category: &ManipulationCategory,
        polarity: Polarity,
    ) -> Result<&CompiledTemplate, CaptionError> {
        let key = category.key();
        let wildcard = format!("{}.{}.*", category.method.as_str(), category.target.as_str());
        let find = |k: &str| {
            self.templates
                .iter()
                .find(|t| t.spec.category == k && t.spec.polarity == polarity)
        };
        find(&key)
            .or_else(|| find(&wildcard))
            .ok_or(CaptionError::TemplateMissing { category: key, polarity })
    }
}
