//! App-feature extraction from app reviews.
//!
//! The crate is organised along the processing pipeline:
//!
//! - [`corpus`]: annotated review corpora, JSONL/CoNLL I/O, BIO encoding,
//!   dataset statistics and stratified sampling
//! - [`guidelines`]: annotation-guideline changes simulated as
//!   corpus-to-corpus transformations with removal accounting
//! - [`tagger`]: a linear-chain CRF over B/I/O labels with hand-crafted and
//!   embedding features, trained with L-BFGS
//! - [`evaluation`]: exact/partial × token/type scoring, stemming, Dice
//!   agreement
//! - [`experiments`]: cross-category, per-category, stratified and
//!   externally augmented training procedures and their reports
//! - [`synth`]: deterministic synthetic corpora for demos and tests
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod experiments;
pub mod guidelines;
pub mod synth;
pub mod tagger;

pub use error::{Error, Result};
