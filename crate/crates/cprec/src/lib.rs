//! Recommendation models for platforms where the people who consume content
//! are the same people who create it.
//!
//! On user-generated-content platforms every item has a producer who is
//! also an account in the user table, so "who made this" is a signal the
//! recommender can exploit without any side information beyond an
//! item-to-author map. This crate implements that idea end to end:
//!
//! * [`data`]: ingest tab-separated interaction logs plus an item-to-producer
//!   attribution file, drop inactive users and items, build per-user
//!   leave-one-out splits, and summarize a corpus.
//! * [`model`]: five scorers behind one contract. Popularity ranking,
//!   biased matrix factorization, a factorization machine with the producer
//!   as a one-hot feature, a symmetric dual-embedding model, and CPRec,
//!   which stores a single core embedding per user and derives separate
//!   consumer and producer views of it through two learned projections.
//! * [`train`]: pairwise ranking loss over (user, positive, negative)
//!   triples, analytic gradients, Adam, early stopping on validation AUC,
//!   and a grid search over the regularization strength.
//! * [`eval`]: exact and sampled per-user AUC with all-user and cold-user
//!   slices, plus a sweep over embedding dimensionality.
//! * [`synth`]: a latent-factor corpus generator with a tunable
//!   producer-appreciation signal, used to validate the whole pipeline at
//!   desk scale.
//!
//! The `examples/` directory is the front door: each example is a runnable
//! walkthrough of one capability (`quickstart`, `ingest_and_stats`,
//! `gradient_check`, `train_and_checkpoint`, `compare_models`, `k_sweep`,
//! `synthetic_corpus`). A thin `cprec` binary wraps the same library calls
//! for shell pipelines; see the README for the subcommand reference.
//!
//! Everything is deterministic given the seeds in the public configs:
//! corpora, splits, initial parameters, triple sampling, and sampled
//! evaluation all derive from explicit seed values, so any run can be
//! replayed bit for bit.

pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod manifest;
pub mod model;
pub mod synth;
pub mod train;

pub use error::Error;

/// Dense user index. Users are consumers and producers under one id space.
pub type UserId = usize;
/// Dense item index.
pub type ItemId = usize;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
