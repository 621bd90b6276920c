//! Probe-dataset compiler for multiple-choice QA models.
//!
//! Expert lexical resources (WordNet-style taxonomies, dictionary lexicons)
//! are loaded into a typed triple graph ([`kb::KnowledgeGraph`]), from which
//! [`probe`] renders 5-way multiple-choice questions with controlled
//! distractor perturbations and semantic clusters. [`baselines`] provides
//! partial-input bias gates over the generated data, and [`eval`] scores
//! external model predictions (instance / strict cluster accuracy,
//! inoculation cost, best-aggregate model selection).
//!
//! The crate is `no_std` and only needs `alloc`; file formats, parallel
//! drivers and the command-line tool live in the `lexprobe` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod baselines;
pub mod eval;
pub mod kb;
pub mod lexicon;
pub mod probe;
pub mod rng;
pub mod taxonomy;
pub mod text;
pub mod wndb;

pub use kb::{ConceptId, GraphBuilder, KbError, KnowledgeGraph, NodeIx, PartOfSpeech, Relation, Target, TargetKind, Triple};
pub use probe::{BuildConfig, ProbeQuestion, ProbeType, SemanticCluster, Split, Strategy, StrategySpec};
