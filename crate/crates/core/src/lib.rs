//! Text detoxification toolkit: lexicon, retrieval and language-model based
//! rewriting of toxic sentences into neutral ones, plus the automatic
//! evaluation suite (style accuracy, word overlap, BLEU, content similarity,
//! perplexity and their geometric-mean aggregate).
//!
//! The numeric core is generic over the scalar type through [`num::Real`];
//! the `*64` aliases below pin the `f64` instantiations used by the CLI.

pub mod baselines;
pub mod condbert;
pub mod data_io;
pub mod embeddings;
pub mod error;
pub mod metrics;
pub mod ngram;
pub mod num;
pub mod promptgen;
pub mod rng;
pub mod text;
pub mod toxicity;

pub use error::{Error, Result};

/// `f64` toxicity classifier.
pub type ToxicityModel64 = toxicity::ToxicityModel<f64>;
/// `f64` toxic-word list with per-word weights.
pub type ToxicityLexicon64 = toxicity::ToxicityLexicon<f64>;
/// `f64` word-embedding table.
pub type EmbeddingTable64 = embeddings::EmbeddingTable<f64>;
/// `f64` retrieval index over a neutral corpus.
pub type RetrieveIndex64 = embeddings::RetrieveIndex<f64>;
/// `f64` masked-fill candidate distribution.
pub type CandidateDistribution64 = ngram::CandidateDistribution<f64>;
/// `f64` masked-substitution configuration.
pub type CondBertConfig64 = condbert::CondBertConfig<f64>;
/// `f64` per-pair metric bundle.
pub type PairScores64 = metrics::PairScores<f64>;
/// `f64` aggregated evaluation row.
pub type EvalReport64 = metrics::EvalReport<f64>;
