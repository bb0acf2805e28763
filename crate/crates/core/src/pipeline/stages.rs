//! Stage functions shared by the end-to-end run and the standalone subcommands.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use super::PipelineError;
use crate::captioner::{
    decorate_all, render_all, CaptionPair, DecorateStats, DecoratorConfig, HttpNaturalizer, TemplateTable,
};
use crate::exec::Exec;
use crate::manipulator::{
    apply_all_corpus, enumerate_candidates, CategorySelection, ManipulationCategory, ManipulationRecord, Quotas,
    Target,
};
use crate::sg_model::{read_profile, read_scene_graph, validate, DatasetProfile, SceneGraph, TypeKind};

pub fn load_profile(path: &Path) -> Result<DatasetProfile, PipelineError> {
    if !path.is_file() {
        return Err(PipelineError::ProfileNotFound(path.to_path_buf()));
    }
    Ok(read_profile(path)?)
}

/// Files matching `pattern`, sorted.
pub fn expand_glob(pattern: &str) -> Result<Vec<PathBuf>, PipelineError> {
    let mut paths = glob::glob(pattern)
        .map_err(|e| PipelineError::Glob(format!("{pattern}: {e}")))?
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| PipelineError::Glob(e.to_string()))?;
    paths.retain(|p| p.is_file());
    paths.sort();
    if paths.is_empty() {
        return Err(PipelineError::NoInputs(pattern.to_string()));
    }
    Ok(paths)
}

/// Parses and validates every document. Graphs come back in path order.
pub fn ingest(paths: &[PathBuf], profile: &DatasetProfile, exec: Exec) -> Result<Vec<SceneGraph>, PipelineError> {
    let parsed = exec.map_slice(paths, |p| {
        let graph = read_scene_graph(p).map_err(|source| PipelineError::Graph {
            path: p.clone(),
            source,
        })?;
        let violations = validate(&graph, profile);
        if !violations.is_empty() {
            return Err(PipelineError::InvalidGraph {
                path: p.clone(),
                violations: violations.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join("; "),
            });
        }
        Ok(graph)
    });
    let graphs = parsed.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut seen = HashSet::new();
    for g in &graphs {
        if !seen.insert(g.video_id.as_str()) {
            return Err(PipelineError::DuplicateVideo(g.video_id.clone()));
        }
    }
    Ok(graphs)
}

/// Resolves the category selection and checks each fine type against the profile.
pub fn resolve_categories(
    selection: &CategorySelection,
    profile: &DatasetProfile,
) -> Result<Vec<ManipulationCategory>, PipelineError> {
    let categories = selection.resolve(profile);
    for c in &categories {
        let want = match c.target {
            Target::Predicate => TypeKind::Predicate,
            Target::Attribute => TypeKind::Attribute,
        };
        if profile.type_kind(&c.fine_type) != Some(want) {
            return Err(PipelineError::Category(format!(
                "{c}: {} is not a {} type of profile {}",
                c.fine_type,
                c.target.as_str(),
                profile.name
            )));
        }
    }
    Ok(categories)
}

/// Candidate sites per category before quotas.
pub fn site_counts(
    graphs: &[SceneGraph],
    profile: &DatasetProfile,
    categories: &[ManipulationCategory],
    exec: Exec,
) -> BTreeMap<String, usize> {
    categories
        .iter()
        .map(|c| {
            let n: usize = exec
                .map_slice(graphs, |g| enumerate_candidates(g, profile, c).len())
                .into_iter()
                .sum();
            (c.key(), n)
        })
        .collect()
}

pub fn probe(
    graphs: &[SceneGraph],
    profile: &DatasetProfile,
    categories: &[ManipulationCategory],
    quotas: &Quotas,
    seed: u64,
    exec: Exec,
) -> Vec<ManipulationRecord> {
    apply_all_corpus(graphs, profile, categories, quotas, seed, exec)
}

pub fn load_templates(path: Option<&Path>) -> Result<TemplateTable, PipelineError> {
    match path {
        Some(p) => Ok(TemplateTable::read(p)?),
        None => Ok(TemplateTable::builtin()),
    }
}

pub fn render(
    records: &[ManipulationRecord],
    templates: &TemplateTable,
    exec: Exec,
) -> Result<Vec<CaptionPair>, PipelineError> {
    Ok(render_all(records, templates, exec)?)
}

/// Runs the decorator when enabled. A disabled decorator never builds a client, so no
/// network traffic can happen.
pub fn decorate(pairs: Vec<CaptionPair>, config: &DecoratorConfig) -> Result<(Vec<CaptionPair>, DecorateStats), PipelineError> {
    if !config.enabled {
        return Ok((pairs, DecorateStats::default()));
    }
    let client = HttpNaturalizer::from_config(config).map_err(PipelineError::Decorator)?;
    Ok(decorate_all(&pairs, config, &client))
}
