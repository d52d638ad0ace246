//! Core algorithms for turning Claim-Argument-Evidence (CAE) assurance cases
//! into multi-hop NLI data and for measuring both the cases and the models
//! trained on them.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! filesystem, the network or a concrete serialization format lives in the
//! `acnli` companion crate.
//!
//! Module map:
//!
//! * [`cae`] - the typed argument tree, its construction checks and validation.
//! * [`flat`] - per-type element counts and their absolute differences.
//! * [`ged`] - graph edit distance between two cases (exact best-first search
//!   and a bipartite-assignment upper bound).
//! * [`agreement`] - intra-/inter-model aggregation of flat and GED metrics.
//! * [`pairgen`] - premise/hypothesis instance construction, negative sampling
//!   and requirement-level splits.
//! * [`faithfulness`] - comprehensiveness, sufficiency, AOPC and permutation
//!   testing over any black-box [`faithfulness::Scorer`].
//! * [`harness`] - prompt assembly, JSON candidate extraction and generation
//!   success accounting.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod agreement;
pub mod cae;
pub mod faithfulness;
pub mod flat;
pub mod ged;
pub mod harness;
pub mod pairgen;
pub mod rng;
pub mod stats;

pub use cae::{AssuranceCase, CaeNode, CaseError, CaseMeta, NodeType, ValidationReport};
pub use flat::{FlatDiff, TypeCounts};
pub use ged::{GedCostModel, GedResult};
pub use pairgen::{NliInstance, SamplerConfig, SplitSpec};
