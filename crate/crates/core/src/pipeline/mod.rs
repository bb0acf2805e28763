//! End-to-end run: ingest, manipulate, render, decorate, emit.

mod config;
mod stages;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{Overrides, PipelineConfig};
pub use stages::{
    decorate, expand_glob, ingest, load_profile, load_templates, probe, render, resolve_categories, site_counts,
};

use crate::captioner::{emit_benchmark, manifest_path, CaptionError, DecorateStats, DecoratorError, EmitError, EmitMeta};
use crate::evaluator::EvalError;
use crate::exec::Exec;
use crate::hn_loss::LossError;
use crate::jsonl::{self, JsonlError};
use crate::sg_model::{ProfileError, SceneGraphError};
use crate::TOOL_VERSION;

pub const RECORDS_FILE: &str = "records.jsonl";
pub const BENCHMARK_FILE: &str = "benchmark.jsonl";
pub const RUN_MANIFEST_FILE: &str = "run_manifest.json";
const STAGING_DIR: &str = ".staging";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("profile not found: {}", .0.display())]
    ProfileNotFound(PathBuf),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("no input files match {0}")]
    NoInputs(String),
    #[error("bad input pattern: {0}")]
    Glob(String),
    #[error("{}: {source}", path.display())]
    Graph {
        path: PathBuf,
        #[source]
        source: SceneGraphError,
    },
    #[error("{}: graph violates the profile: {violations}", path.display())]
    InvalidGraph { path: PathBuf, violations: String },
    #[error("video id {0} appears in more than one input")]
    DuplicateVideo(String),
    #[error("category: {0}")]
    Category(String),
    #[error(transparent)]
    Render(#[from] CaptionError),
    #[error("decorator: {0}")]
    Decorator(DecoratorError),
    #[error("{} exists (use --force to overwrite)", .0.display())]
    OutputExists(PathBuf),
    #[error(transparent)]
    Emit(EmitError),
    #[error(transparent)]
    File(JsonlError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Loss(#[from] LossError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<PipelineError>,
    },
}

impl From<JsonlError> for PipelineError {
    fn from(e: JsonlError) -> Self {
        match e {
            JsonlError::OutputExists(p) => PipelineError::OutputExists(p),
            other => PipelineError::File(other),
        }
    }
}

impl From<EmitError> for PipelineError {
    fn from(e: EmitError) -> Self {
        match e {
            EmitError::Write(j) => j.into(),
            other => PipelineError::Emit(other),
        }
    }
}

impl PipelineError {
    /// Process exit code. These values are part of the command-line contract.
    pub fn exit_code(&self) -> u8 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::ProfileNotFound(_) => 3,
            PipelineError::Profile(_) => 4,
            PipelineError::NoInputs(_)
            | PipelineError::Glob(_)
            | PipelineError::Graph { .. }
            | PipelineError::InvalidGraph { .. }
            | PipelineError::DuplicateVideo(_) => 5,
            PipelineError::Category(_) => 6,
            PipelineError::Render(_) => 7,
            PipelineError::Decorator(_) => 8,
            PipelineError::Emit(_) => 9,
            PipelineError::OutputExists(_) => 10,
            PipelineError::Eval(_) => 11,
            PipelineError::Loss(_) => 12,
            PipelineError::File(_) | PipelineError::Io { .. } => 13,
            PipelineError::Stage { source, .. } => source.exit_code(),
        }
    }

    fn in_stage(self, stage: &'static str) -> Self {
        match self {
            PipelineError::Stage { .. } => self,
            other => PipelineError::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub input_files: usize,
    pub videos: usize,
    pub tuples: usize,
    pub sites: usize,
    pub records: usize,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_digest: String,
    pub profile: String,
    pub global_seed: u64,
    pub stage_counts: StageCounts,
    pub site_counts: BTreeMap<String, usize>,
    /// Emitted pairs per selected category, zeros included.
    pub category_counts: BTreeMap<String, usize>,
    pub decorator: DecorateStats,
    pub decorator_failures: usize,
    pub benchmark_sha256: String,
    pub started_unix_s: u64,
    pub finished_unix_s: u64,
    /// SHA-256 of this manifest without the timestamps and without this field.
    pub digest: String,
}

impl RunManifest {
    pub fn compute_digest(&self) -> String {
        let mut value = serde_json::to_value(self).expect("manifest serializes");
        if let Some(map) = value.as_object_mut() {
            for key in ["started_unix_s", "finished_unix_s", "digest"] {
                map.remove(key);
            }
        }
        hex::encode(Sha256::digest(value.to_string().as_bytes()))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub force: bool,
    pub exec: Exec,
}

fn now_unix_s() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Scratch directory inside the output directory, removed on every exit path.
struct Staging {
    dir: PathBuf,
}

impl Drop for Staging {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.dir);
    }
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<RunManifest, PipelineError> {
    run_pipeline_with(config, RunOptions::default())
}

/// Runs every stage and writes records, benchmark, benchmark manifest and run manifest into
/// the output directory. Nothing is left behind in the output directory when a stage fails.
pub fn run_pipeline_with(config: &PipelineConfig, options: RunOptions) -> Result<RunManifest, PipelineError> {
    let started = now_unix_s();
    let exec = options.exec;
    config.validate()?;

    let out = &config.output_dir;
    let finals = [RECORDS_FILE, BENCHMARK_FILE, RUN_MANIFEST_FILE]
        .map(|f| out.join(f))
        .into_iter()
        .chain([manifest_path(&out.join(BENCHMARK_FILE))])
        .collect::<Vec<_>>();
    if !options.force {
        if let Some(existing) = finals.iter().find(|p| p.exists()) {
            return Err(PipelineError::OutputExists(existing.clone()));
        }
    }

    let profile = load_profile(&config.profile_path).map_err(|e| e.in_stage("ingest"))?;
    let paths = expand_glob(&config.input_glob).map_err(|e| e.in_stage("ingest"))?;
    let graphs = ingest(&paths, &profile, exec).map_err(|e| e.in_stage("ingest"))?;

    let categories = resolve_categories(&config.categories, &profile).map_err(|e| e.in_stage("probe"))?;
    let sites = site_counts(&graphs, &profile, &categories, exec);
    let records = probe(&graphs, &profile, &categories, &config.quotas, config.global_seed, exec);

    let templates = load_templates(config.templates_path.as_deref()).map_err(|e| e.in_stage("render"))?;
    let pairs = render(&records, &templates, exec).map_err(|e| e.in_stage("render"))?;
    let (pairs, decorator) = decorate(pairs, &config.decorator).map_err(|e| e.in_stage("decorate"))?;

    let staging = Staging {
        dir: out.join(STAGING_DIR),
    };
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| PipelineError::Io { path, source }
    };
    if staging.dir.exists() {
        std::fs::remove_dir_all(&staging.dir).map_err(io(&staging.dir))?;
    }
    std::fs::create_dir_all(&staging.dir).map_err(io(&staging.dir))?;

    let emit = || -> Result<RunManifest, PipelineError> {
        jsonl::write_jsonl(&staging.dir.join(RECORDS_FILE), &records, true)?;
        let meta = EmitMeta {
            global_seed: config.global_seed,
            profile_name: profile.name.clone(),
            decorator,
        };
        let bench = emit_benchmark(&pairs, &staging.dir.join(BENCHMARK_FILE), &meta, true)?;

        let mut category_counts: BTreeMap<String, usize> = categories.iter().map(|c| (c.key(), 0)).collect();
        category_counts.extend(bench.categories.clone());
        let mut manifest = RunManifest {
            tool_version: TOOL_VERSION.to_string(),
            config_digest: config.digest(),
            profile: profile.name.clone(),
            global_seed: config.global_seed,
            stage_counts: StageCounts {
                input_files: paths.len(),
                videos: graphs.len(),
                tuples: graphs.iter().map(|g| g.tuples.len()).sum(),
                sites: sites.values().sum(),
                records: records.len(),
                pairs: bench.total,
            },
            site_counts: sites.clone(),
            category_counts,
            decorator,
            decorator_failures: decorator.unavailable,
            benchmark_sha256: bench.benchmark_sha256,
            started_unix_s: started,
            finished_unix_s: now_unix_s(),
            digest: String::new(),
        };
        manifest.digest = manifest.compute_digest();
        jsonl::write_json(&staging.dir.join(RUN_MANIFEST_FILE), &manifest, true)?;
        Ok(manifest)
    };
    let manifest = emit().map_err(|e| e.in_stage("emit"))?;

    // the run manifest goes last so that its presence implies a complete run
    let mut staged: Vec<&PathBuf> = finals.iter().collect();
    staged.sort_by_key(|p| p.ends_with(RUN_MANIFEST_FILE));
    for target in staged {
        let name = target.file_name().expect("output file name");
        let from = staging.dir.join(name);
        std::fs::rename(&from, target).map_err(io(target))?;
    }
    drop(staging);
    Ok(manifest)
}
