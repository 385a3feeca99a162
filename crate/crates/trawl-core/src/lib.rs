//! Hybrid sparse+dense document retrieval with a trec_eval-compatible
//! evaluation lab.
//!
//! The crate covers the full non-neural pipeline:
//!
//! * [`corpus`]: line-delimited corpora and topics, sentence splitting,
//!   sliding-window segmentation, script-aware tokenization.
//! * [`sparse`]: inverted index, BM25 and BM25+RM3 retrieval, versioned
//!   binary persistence.
//! * [`dense`]: exact inner-product search over segment embeddings and
//!   top-m aggregation to document scores; encoders stay external and plug
//!   in through vector files (a deterministic hashing encoder is built in).
//! * [`fusion`]: linear interpolation `S_doc = α·S_term + (1−α)·S_dense`
//!   with cross-validated selection of α.
//! * [`eval`]: AP / P@20 / nDCG@20 in trec_eval's formulations, TREC run
//!   and qrels files, and a paired randomization significance test.
//! * [`weaksup`]: weakly-supervised training-example synthesis from
//!   article titles.
//!
//! Compiled with the `parallel` feature (the default) the data-parallel
//! loops fan out over rayon; without it everything runs sequentially.
//! Results are identical in both lanes.

pub mod corpus;
pub mod dense;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod hit;
pub mod par;
pub mod rng;
pub mod sparse;
pub mod weaksup;

mod binio;

pub use error::{Error, ErrorCategory, Result};
pub use hit::{rank_hits, rank_hits_top_k, ScoredHit};
