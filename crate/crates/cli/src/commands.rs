use std::path::{Path, PathBuf};

use clap::Args;
use foilbench_core::captioner::{emit_benchmark, BenchmarkLine, CaptionPair, DecorateStats, EmitMeta, Renderer};
use foilbench_core::evaluator::{build_control_pool, gap_reports, summarize, GapReport, ScoreMatrix};
use foilbench_core::hn_loss::{run_selftest, SelfTestInput};
use foilbench_core::jsonl;
use foilbench_core::manipulator::ManipulationRecord;
use foilbench_core::pipeline::{self, PipelineConfig, PipelineError, RunOptions, BENCHMARK_FILE, RECORDS_FILE};
use foilbench_core::sg_model::{validate, SceneGraph, SceneGraphDocument};
use foilbench_core::Exec;

use crate::Global;

pub const GRAPHS_FILE: &str = "graphs.jsonl";
pub const PAIRS_FILE: &str = "pairs.jsonl";
pub const GAPS_FILE: &str = "gaps.json";
pub const REPORT_FILE: &str = "gap_report.csv";
pub const POOLS_DIR: &str = "pools";

pub struct Context {
    pub global: Global,
    pub exec: Exec,
}

type Result<T> = std::result::Result<T, PipelineError>;

impl Context {
    fn config(&self) -> Result<PipelineConfig> {
        let path = self
            .global
            .config
            .as_deref()
            .ok_or_else(|| PipelineError::Config("this command needs --config".into()))?;
        let mut config = PipelineConfig::read(path)?;
        config.apply(&pipeline::Overrides {
            seed: self.global.seed,
            output_dir: self.global.out.clone(),
        });
        config.validate()?;
        Ok(config)
    }

    fn optional_config(&self) -> Result<Option<PipelineConfig>> {
        self.global.config.as_ref().map(|_| self.config()).transpose()
    }

    /// `--out`, else the config's output directory, else the working directory.
    fn out_dir(&self, config: Option<&PipelineConfig>) -> PathBuf {
        self.global
            .out
            .clone()
            .or_else(|| config.map(|c| c.output_dir.clone()))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

fn read_graphs(path: &Path) -> Result<Vec<SceneGraph>> {
    let docs: Vec<SceneGraphDocument> = jsonl::read_jsonl(path)?;
    docs.into_iter()
        .map(|d| {
            SceneGraph::try_from(d).map_err(|source| PipelineError::Graph {
                path: path.to_path_buf(),
                source,
            })
        })
        .collect()
}

pub fn ingest(ctx: &Context) -> Result<()> {
    let config = ctx.config()?;
    let profile = pipeline::load_profile(&config.profile_path)?;
    let paths = pipeline::expand_glob(&config.input_glob)?;
    let graphs = pipeline::ingest(&paths, &profile, ctx.exec)?;
    let docs: Vec<SceneGraphDocument> = graphs.iter().map(SceneGraphDocument::from).collect();
    let out = ctx.out_dir(Some(&config)).join(GRAPHS_FILE);
    jsonl::write_jsonl(&out, &docs, ctx.global.force)?;
    let tuples: usize = graphs.iter().map(|g| g.tuples.len()).sum();
    println!("{} graphs, {tuples} tuples -> {}", graphs.len(), out.display());
    Ok(())
}

pub fn probe(ctx: &Context, graphs_path: Option<&Path>) -> Result<()> {
    let config = ctx.config()?;
    let profile = pipeline::load_profile(&config.profile_path)?;
    let graphs = match graphs_path {
        Some(p) => {
            let graphs = read_graphs(p)?;
            if let Some(g) = graphs.iter().find(|g| !validate(g, &profile).is_empty()) {
                return Err(PipelineError::InvalidGraph {
                    path: p.to_path_buf(),
                    violations: format!("{:?}", validate(g, &profile)),
                });
            }
            graphs
        }
        None => pipeline::ingest(&pipeline::expand_glob(&config.input_glob)?, &profile, ctx.exec)?,
    };
    let categories = pipeline::resolve_categories(&config.categories, &profile)?;
    let records = pipeline::probe(&graphs, &profile, &categories, &config.quotas, config.global_seed, ctx.exec);
    let out = ctx.out_dir(Some(&config)).join(RECORDS_FILE);
    jsonl::write_jsonl(&out, &records, ctx.global.force)?;
    println!("{} records -> {}", records.len(), out.display());
    Ok(())
}

pub fn render(ctx: &Context, records_path: &Path) -> Result<()> {
    let config = ctx.optional_config()?;
    let records: Vec<ManipulationRecord> = jsonl::read_jsonl(records_path)?;
    let templates = pipeline::load_templates(config.as_ref().and_then(|c| c.templates_path.as_deref()))?;
    let pairs = pipeline::render(&records, &templates, ctx.exec)?;
    let (pairs, stats) = match &config {
        Some(c) => pipeline::decorate(pairs, &c.decorator)?,
        None => (pairs, DecorateStats::default()),
    };
    let out = ctx.out_dir(config.as_ref()).join(PAIRS_FILE);
    jsonl::write_jsonl(&out, &pairs, ctx.global.force)?;
    println!(
        "{} pairs ({} decorated, {} filtered, {} unavailable) -> {}",
        pairs.len(),
        stats.decorated,
        stats.filtered,
        stats.unavailable,
        out.display()
    );
    Ok(())
}

pub fn emit(ctx: &Context, pairs_path: &Path) -> Result<()> {
    let config = ctx.config()?;
    let profile = pipeline::load_profile(&config.profile_path)?;
    let pairs: Vec<CaptionPair> = jsonl::read_jsonl(pairs_path)?;
    // only the rewritten pairs are visible from here; filter and failure counts stay with render
    let decorated = pairs.iter().filter(|p| p.positive.renderer == Renderer::Llm).count();
    let meta = EmitMeta {
        global_seed: config.global_seed,
        profile_name: profile.name,
        decorator: DecorateStats {
            decorated,
            ..DecorateStats::default()
        },
    };
    let out = ctx.out_dir(Some(&config)).join(BENCHMARK_FILE);
    let manifest = emit_benchmark(&pairs, &out, &meta, ctx.global.force)?;
    println!("{} pairs -> {}", manifest.total, out.display());
    Ok(())
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Benchmark JSONL from `emit`.
    #[arg(long)]
    benchmark: PathBuf,
    /// Directory of score matrices named `<category>.positive.csv` and `<category>.control.csv`.
    /// Without it, the retrieval pools are written out for scoring instead.
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Recall cutoffs.
    #[arg(long, value_delimiter = ',', default_value = "1,5,10")]
    k: Vec<usize>,
}

pub fn eval(ctx: &Context, args: &EvalArgs) -> Result<()> {
    let lines: Vec<BenchmarkLine> = jsonl::read_jsonl(&args.benchmark)?;
    let pools = build_control_pool(&lines)?;
    let out = ctx.out_dir(None);
    let Some(scores) = &args.scores else {
        let dir = out.join(POOLS_DIR);
        for p in &pools {
            jsonl::write_jsonl(&dir.join(format!("{}.positive.jsonl", p.category)), &p.positive.captions, ctx.global.force)?;
            jsonl::write_jsonl(&dir.join(format!("{}.control.jsonl", p.category)), &p.control.captions, ctx.global.force)?;
            jsonl::write_json(
                &dir.join(format!("{}.ground_truth.json", p.category)),
                &p.positive.ground_truth(),
                ctx.global.force,
            )?;
        }
        println!("{} category pools -> {}", pools.len(), dir.display());
        return Ok(());
    };

    let mut gaps: Vec<GapReport> = Vec::new();
    for p in &pools {
        let positive = scores.join(format!("{}.positive.csv", p.category));
        let control = scores.join(format!("{}.control.csv", p.category));
        if !positive.exists() && !control.exists() {
            log::warn!("no score matrices for {}; skipped", p.category);
            continue;
        }
        let gt = p.positive.ground_truth();
        gaps.extend(gap_reports(
            &p.category,
            &ScoreMatrix::read_csv(&positive)?,
            &ScoreMatrix::read_csv(&control)?,
            &gt,
            &args.k,
            ctx.exec,
        )?);
    }
    if gaps.is_empty() {
        return Err(PipelineError::NoInputs(format!("{}/<category>.positive.csv", scores.display())));
    }
    let path = out.join(GAPS_FILE);
    jsonl::write_json(&path, &gaps, ctx.global.force)?;
    println!("{} gap rows -> {}", gaps.len(), path.display());
    Ok(())
}

pub fn gap_report(ctx: &Context, files: &[PathBuf], model: &str) -> Result<()> {
    let mut gaps: Vec<GapReport> = Vec::new();
    for f in files {
        gaps.extend(jsonl::read_json::<Vec<GapReport>>(f)?);
    }
    let report = ctx.out_dir(None).join(REPORT_FILE);
    if !ctx.global.force && report.exists() {
        return Err(PipelineError::OutputExists(report));
    }
    let written = summarize(&gaps, &report, model)?;
    println!("{} -> {}, {}", gaps.len(), written.report.display(), written.scatter.display());
    Ok(())
}

pub fn loss_selftest(input: &Path, h: f64) -> Result<()> {
    let batch: SelfTestInput = jsonl::read_json(input)?;
    let output = run_selftest(&batch, h)?;
    println!("{}", serde_json::to_string(&output).expect("output serializes"));
    Ok(())
}

pub fn run(ctx: &Context) -> Result<()> {
    let config = ctx.config()?;
    let manifest = pipeline::run_pipeline_with(
        &config,
        RunOptions {
            force: ctx.global.force,
            exec: ctx.exec,
        },
    )?;
    println!(
        "{} records, {} pairs -> {} (digest {})",
        manifest.stage_counts.records,
        manifest.stage_counts.pairs,
        config.output_dir.display(),
        manifest.digest
    );
    Ok(())
}
