//! Monolingually derived phrase-table scores.
//!
//! `monophrase` re-estimates the four feature scores of a phrase-based
//! translation table from monolingual embedding spaces. Linear projections
//! learned from a small seed dictionary (words) or a few short parallel
//! sentences (phrases) carry source vectors into the target space, where
//! cosine similarity stands in for translation probability:
//!
//! - [`vecspace`]: embedding spaces, the word2vec text format, phrase
//!   vectorization and cosine similarity.
//! - [`embedtrain`]: a small skipgram/CBOW negative-sampling trainer and
//!   paragraph-vector inference.
//! - [`xmap`]: projection learning (exact ridge solve and SGD), projection,
//!   and bilingual lexicon induction.
//! - [`phrasetable`]: Moses phrase tables and lexical tables.
//! - [`scoring`]: word/phrase similarities, lexical weighting and streaming
//!   table rescoring in replace or append mode.
//! - [`synthetic`]: rotated toy worlds with known answers.
//! - [`cli`]: the batch command line behind the `monophrase` binary.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod cli;
pub mod config;
pub mod embedtrain;
pub mod error;
pub mod numfmt;
pub mod phrasetable;
pub mod scoring;
pub mod synthetic;
pub mod vecspace;
pub mod xmap;

pub use error::{Error, Result};
pub use phrasetable::{LexiconEntry, PhrasePair};
pub use scoring::{Feature, FeatureSet, Mode, OovPolicy, ScoreConfig, WordSimTable};
pub use vecspace::{PhraseVectorizer, VectorSpace};
pub use xmap::{Direction, Level, ProjectionMatrix, SeedPairs};
