//! Toolchain for building event-level probing benchmarks from video scene graphs.
//!
//! The pipeline ingests normalized scene-graph documents ([`sg_model`]), derives foiled
//! event tuples with seeded manipulation operators ([`manipulator`]), renders them into
//! positive/negative caption pairs ([`captioner`]), and scores externally produced
//! similarity matrices into relative performance gaps ([`evaluator`]). [`hn_loss`] holds a
//! reference implementation of the hard-negative contrastive alignment loss with an
//! analytic gradient and a finite-difference verifier.

pub mod captioner;
pub mod evaluator;
pub mod exec;
pub mod hn_loss;
pub mod jsonl;
pub mod manipulator;
pub mod pipeline;
pub mod seed;
pub mod sg_model;

pub use exec::Exec;

/// Version string recorded in every manifest.
pub const TOOL_VERSION: &str = concat!("foilbench ", env!("CARGO_PKG_VERSION"));
