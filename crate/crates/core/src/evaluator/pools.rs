use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::score::GroundTruth;
use super::EvalError;
use crate::captioner::{BenchmarkLine, CaptionPair};

/// What pool construction needs from a benchmark pair.
pub trait PairTexts {
    fn pair_id(&self) -> &str;
    fn video_id(&self) -> &str;
    fn category_key(&self) -> String;
    fn positive_text(&self) -> &str;
    fn negative_text(&self) -> &str;
}

impl PairTexts for CaptionPair {
    fn pair_id(&self) -> &str {
        &self.pair_id
    }
    fn video_id(&self) -> &str {
        &self.video_id
    }
    fn category_key(&self) -> String {
        self.category.key()
    }
    fn positive_text(&self) -> &str {
        &self.positive.text
    }
    fn negative_text(&self) -> &str {
        &self.negative.text
    }
}

impl PairTexts for BenchmarkLine {
    fn pair_id(&self) -> &str {
        &self.pair_id
    }
    fn video_id(&self) -> &str {
        &self.video_id
    }
    fn category_key(&self) -> String {
        self.category.clone()
    }
    fn positive_text(&self) -> &str {
        &self.positive.text
    }
    fn negative_text(&self) -> &str {
        &self.negative.text
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolCaption {
    pub caption_id: String,
    pub video_id: String,
    pub text: String,
}

/// Retrieval candidates of one pool. Caption ids are pair ids, so a positive pool and its
/// control pool share ids and ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Pool {
    pub captions: Vec<PoolCaption>,
}

impl Pool {
    pub fn caption_ids(&self) -> Vec<String> {
        self.captions.iter().map(|c| c.caption_id.clone()).collect()
    }

    /// Videos in first-appearance order.
    pub fn video_ids(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.captions {
            if !out.contains(&c.video_id) {
                out.push(c.video_id.clone());
            }
        }
        out
    }

    pub fn ground_truth(&self) -> GroundTruth {
        GroundTruth::from_pairs(self.captions.iter().map(|c| (c.video_id.as_str(), c.caption_id.as_str())))
            .expect("pair ids are unique within a pool")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryPools {
    pub category: String,
    pub positive: Pool,
    pub control: Pool,
}

/// One (positive, control) pool per category, categories in key order. The control pool
/// swaps each positive caption for its negative.
pub fn build_control_pool<P: PairTexts>(pairs: &[P]) -> Result<Vec<CategoryPools>, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut seen = std::collections::HashSet::new();
    let mut by_category: BTreeMap<String, CategoryPools> = BTreeMap::new();
    for p in pairs {
        if !seen.insert(p.pair_id()) {
            return Err(EvalError::DuplicateId(p.pair_id().to_string()));
        }
        if p.negative_text().trim().is_empty() {
            return Err(EvalError::MissingNegative(p.pair_id().to_string()));
        }
        let key = p.category_key();
        let entry = by_category.entry(key.clone()).or_insert_with(|| CategoryPools {
            category: key,
            positive: Pool::default(),
            control: Pool::default(),
        });
        let caption = |text: &str| PoolCaption {
            caption_id: p.pair_id().to_string(),
            video_id: p.video_id().to_string(),
            text: text.to_string(),
        };
        entry.positive.captions.push(caption(p.positive_text()));
        entry.control.captions.push(caption(p.negative_text()));
    }
    Ok(by_category.into_values().collect())
}
