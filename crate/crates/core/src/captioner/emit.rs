use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::decorator::DecorateStats;
use super::render::{CaptionPair, Renderer};
use crate::jsonl::{self, JsonlError};
use crate::TOOL_VERSION;

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("nothing to emit")]
    EmptyInput,
    #[error("pair id {0} appears more than once")]
    DuplicatePairId(String),
    #[error(transparent)]
    Write(#[from] JsonlError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineCaption {
    pub text: String,
    pub renderer: Renderer,
}

/// One benchmark line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkLine {
    pub pair_id: String,
    pub video_id: String,
    pub category: String,
    pub positive: LineCaption,
    pub negative: LineCaption,
}

impl From<&CaptionPair> for BenchmarkLine {
    fn from(p: &CaptionPair) -> Self {
        Self {
            pair_id: p.pair_id.clone(),
            video_id: p.video_id.clone(),
            category: p.category.key(),
            positive: LineCaption {
                text: p.positive.text.clone(),
                renderer: p.positive.renderer,
            },
            negative: LineCaption {
                text: p.negative.text.clone(),
                renderer: p.negative.renderer,
            },
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct EmitMeta {
    pub global_seed: u64,
    pub profile_name: String,
    pub decorator: DecorateStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkManifest {
    pub tool_version: String,
    pub profile: String,
    pub global_seed: u64,
    pub total: usize,
    pub categories: BTreeMap<String, usize>,
    pub decorator: DecorateStats,
    /// SHA-256 of the benchmark file bytes.
    pub benchmark_sha256: String,
}

/// `bench.jsonl` -> `bench.manifest.json`.
pub fn manifest_path(out_path: &Path) -> PathBuf {
    out_path.with_extension("manifest.json")
}

/// Writes the benchmark JSONL (pairs in the given order) and its manifest next to it.
pub fn emit_benchmark(
    pairs: &[CaptionPair],
    out_path: &Path,
    meta: &EmitMeta,
    force: bool,
) -> Result<BenchmarkManifest, EmitError> {
    if pairs.is_empty() {
        return Err(EmitError::EmptyInput);
    }
    let mut seen = HashSet::new();
    for p in pairs {
        if !seen.insert(p.pair_id.as_str()) {
            return Err(EmitError::DuplicatePairId(p.pair_id.clone()));
        }
    }
    let manifest_file = manifest_path(out_path);
    if !force {
        for path in [out_path, manifest_file.as_path()] {
            if path.exists() {
                return Err(JsonlError::OutputExists(path.to_path_buf()).into());
            }
        }
    }

    let lines: Vec<BenchmarkLine> = pairs.iter().map(BenchmarkLine::from).collect();
    let bytes = jsonl::to_bytes(&lines)?;
    let mut categories = BTreeMap::new();
    for l in &lines {
        *categories.entry(l.category.clone()).or_insert(0) += 1;
    }
    let manifest = BenchmarkManifest {
        tool_version: TOOL_VERSION.to_string(),
        profile: meta.profile_name.clone(),
        global_seed: meta.global_seed,
        total: lines.len(),
        categories,
        decorator: meta.decorator,
        benchmark_sha256: hex::encode(Sha256::digest(&bytes)),
    };
    jsonl::write_bytes(out_path, &bytes, true)?;
    jsonl::write_json(&manifest_file, &manifest, true)?;
    Ok(manifest)
}
