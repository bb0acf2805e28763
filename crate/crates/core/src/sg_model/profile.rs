use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::manipulator::{ManipulationCategory, Target};

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("malformed profile document: {0}")]
    Malformed(String),
    #[error("vocabulary has no entry for type {0:?}")]
    MissingVocabulary(String),
    #[error("vocabulary entry {0:?} is not a declared predicate or attribute type")]
    UndeclaredVocabulary(String),
    #[error("type {0:?} has an empty vocabulary")]
    EmptyVocabulary(String),
    #[error("type {0:?} is declared as both a predicate and an attribute type")]
    AmbiguousType(String),
    #[error("profile declares no {0} types")]
    NoTypes(&'static str),
    #[error("category {category} names {fine_type:?}, which is not a {expected} type of this profile")]
    CategoryTypeMismatch {
        category: String,
        fine_type: String,
        expected: &'static str,
    },
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeKind {
    Predicate,
    Attribute,
}

/// Fine-grained predicate/attribute taxonomy of one dataset, with its vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct DatasetProfile {
    pub name: String,
    pub predicate_types: Vec<String>,
    pub attribute_types: Vec<String>,
    pub vocab: BTreeMap<String, Vec<String>>,
    pub categories: Vec<ManipulationCategory>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    name: String,
    predicate_types: Vec<String>,
    attribute_types: Vec<String>,
    vocab: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    categories: Vec<ManipulationCategory>,
}

impl TryFrom<RawProfile> for DatasetProfile {
    type Error = ProfileError;

    fn try_from(raw: RawProfile) -> Result<Self, Self::Error> {
        DatasetProfile::new(
            raw.name,
            raw.predicate_types,
            raw.attribute_types,
            raw.vocab,
            raw.categories,
        )
    }
}

impl From<DatasetProfile> for RawProfile {
    fn from(p: DatasetProfile) -> Self {
        RawProfile {
            name: p.name,
            predicate_types: p.predicate_types,
            attribute_types: p.attribute_types,
            vocab: p.vocab,
            categories: p.categories,
        }
    }
}

pub fn read_profile(path: &Path) -> Result<DatasetProfile, ProfileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ProfileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| ProfileError::Malformed(e.to_string()))
}

impl DatasetProfile {
    pub fn new(
        name: String,
        predicate_types: Vec<String>,
        attribute_types: Vec<String>,
        vocab: BTreeMap<String, Vec<String>>,
        categories: Vec<ManipulationCategory>,
    ) -> Result<Self, ProfileError> {
        if predicate_types.is_empty() {
            return Err(ProfileError::NoTypes("predicate"));
        }
        if attribute_types.is_empty() {
            return Err(ProfileError::NoTypes("attribute"));
        }
        let preds: BTreeSet<&String> = predicate_types.iter().collect();
        if let Some(t) = attribute_types.iter().find(|t| preds.contains(t)) {
            return Err(ProfileError::AmbiguousType(t.clone()));
        }
        for t in predicate_types.iter().chain(&attribute_types) {
            match vocab.get(t) {
                None => return Err(ProfileError::MissingVocabulary(t.clone())),
                Some(values) if values.is_empty() => {
                    return Err(ProfileError::EmptyVocabulary(t.clone()))
                }
                Some(_) => {}
            }
        }
        if let Some(k) = vocab
            .keys()
            .find(|k| !predicate_types.contains(k) && !attribute_types.contains(k))
        {
            return Err(ProfileError::UndeclaredVocabulary(k.clone()));
        }
        let profile = DatasetProfile {
            name,
            predicate_types,
            attribute_types,
            vocab,
            categories,
        };
        for c in &profile.categories {
            let (kind, expected) = match c.target {
                Target::Predicate => (TypeKind::Predicate, "predicate"),
                Target::Attribute => (TypeKind::Attribute, "attribute"),
            };
            if profile.type_kind(&c.fine_type) != Some(kind) {
                return Err(ProfileError::CategoryTypeMismatch {
                    category: c.key(),
                    fine_type: c.fine_type.clone(),
                    expected,
                });
            }
        }
        Ok(profile)
    }

    pub fn type_kind(&self, type_name: &str) -> Option<TypeKind> {
        if self.predicate_types.iter().any(|t| t == type_name) {
            Some(TypeKind::Predicate)
        } else if self.attribute_types.iter().any(|t| t == type_name) {
            Some(TypeKind::Attribute)
        } else {
            None
        }
    }

    pub fn vocabulary(&self, type_name: &str) -> Option<&[String]> {
        self.vocab.get(type_name).map(Vec::as_slice)
    }

    pub fn licenses(&self, type_name: &str, value: &str) -> bool {
        self.vocabulary(type_name)
            .is_some_and(|vs| vs.iter().any(|v| v == value))
    }
}
