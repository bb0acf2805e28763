use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Temporal,
    Neighborhood,
    Counterfactual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Predicate,
    Attribute,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Temporal => "temporal",
            Method::Neighborhood => "neighborhood",
            Method::Counterfactual => "counterfactual",
        }
    }
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::Predicate => "predicate",
            Target::Attribute => "attribute",
        }
    }
}

/// A (method, target, fine-grained type) triple, written `method.target.fine_type`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ManipulationCategory {
    pub method: Method,
    pub target: Target,
    pub fine_type: String,
}

impl ManipulationCategory {
    pub fn new(method: Method, target: Target, fine_type: impl Into<String>) -> Result<Self, String> {
        let fine_type = fine_type.into();
        if method == Method::Neighborhood && target != Target::Attribute {
            return Err("neighborhood manipulation only targets attributes".into());
        }
        if fine_type.is_empty() {
            return Err("category fine type must be nonempty".into());
        }
        Ok(Self {
            method,
            target,
            fine_type,
        })
    }

    pub fn key(&self) -> String {
        self.to_string()
    }

    pub fn is_temporal(&self) -> bool {
        self.method == Method::Temporal
    }
}

impl fmt::Display for ManipulationCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}", self.method.as_str(), self.target.as_str(), self.fine_type)
    }
}

impl FromStr for ManipulationCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.splitn(3, '.');
        let (Some(m), Some(t), Some(fine)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(format!("category key {s:?} is not method.target.fine_type"));
        };
        let method = match m {
            "temporal" => Method::Temporal,
            "neighborhood" => Method::Neighborhood,
            "counterfactual" => Method::Counterfactual,
            _ => return Err(format!("unknown manipulation method {m:?}")),
        };
        let target = match t {
            "predicate" => Target::Predicate,
            "attribute" => Target::Attribute,
            _ => return Err(format!("unknown manipulation target {t:?}")),
        };
        ManipulationCategory::new(method, target, fine)
    }
}

impl TryFrom<String> for ManipulationCategory {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ManipulationCategory> for String {
    fn from(c: ManipulationCategory) -> Self {
        c.key()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_roundtrip() {
        let c: ManipulationCategory = "counterfactual.predicate.SpatialRelationship".parse().unwrap();
        assert_eq!(c.method, Method::Counterfactual);
        assert_eq!(c.key(), "counterfactual.predicate.SpatialRelationship");
    }

    #[test]
    fn neighborhood_predicate_rejected() {
        assert!("neighborhood.predicate.Action".parse::<ManipulationCategory>().is_err());
        assert!("sideways.attribute.Color".parse::<ManipulationCategory>().is_err());
        assert!("temporal.attribute".parse::<ManipulationCategory>().is_err());
    }
}
