//! Seeded event-tuple manipulation: temporal swaps, neighborhood attribute swaps and
//! counterfactual substitution, plus site enumeration and quota sampling.

mod apply;
mod category;
mod enumerate;
mod ops;
mod pool;

pub use apply::{apply_all, apply_all_corpus, ManipulationConfig, ManipulationRecord, Quotas, CategorySelection};
pub use category::{ManipulationCategory, Method, Target};
pub use enumerate::{enumerate_candidates, Site};
pub use ops::{
    counterfactual_substitute, neighborhood_attribute_swap, neighborhood_attribute_swap_of_type,
    temporal_attribute_swap, temporal_predicate_swap, AttributeObservation, ManipulationError,
    Slot,
};
pub use pool::{build_pool, CandidatePool};
