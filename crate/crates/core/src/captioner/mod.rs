//! Caption rendering: template table, caption pairs, the optional LLM decorator and
//! benchmark emission.

mod decorator;
mod emit;
mod render;
mod template;

use std::path::PathBuf;

use thiserror::Error;

pub use decorator::{
    decorate, decorate_all, DecorateOutcome, DecorateStats, DecoratorConfig, DecoratorError, HttpNaturalizer,
    Naturalizer,
};
pub use emit::{emit_benchmark, manifest_path, BenchmarkLine, BenchmarkManifest, EmitError, EmitMeta, LineCaption};
pub use render::{render_all, render_pair, Caption, CaptionPair, Renderer};
pub use template::{Polarity, SlotName, TemplateSpec, TemplateTable};

#[derive(Debug, Error)]
pub enum CaptionError {
    #[error("no {polarity} template for category {category}")]
    TemplateMissing { category: String, polarity: Polarity },
    #[error("template {template_id} needs slot {{{slot}}} which record {record_id} cannot fill")]
    TemplateSlotMissing {
        template_id: String,
        record_id: String,
        slot: String,
    },
    #[error("template {template_id}: {message}")]
    TemplateSyntax { template_id: String, message: String },
    #[error("two {polarity} templates for category {category}")]
    DuplicateTemplate { category: String, polarity: Polarity },
    #[error("malformed template table: {0}")]
    MalformedTemplates(String),
    #[error("template {template_id} does not show value {value:?} of record {record_id}")]
    AnchorNotRendered {
        template_id: String,
        record_id: String,
        value: String,
    },
    #[error("positive and negative captions of record {0} are identical")]
    IdenticalCaptions(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
