//! Semi-supervised decision-list word sense disambiguation.
//!
//! The crate covers the whole experimental pipeline: corpus ingestion and
//! content-word filtering ([`corpus`]), the frequency-truncated lexicon and
//! count vectors ([`lexicon`]), the bootstrapping decision-list learner
//! ([`learner`]), pseudo-word evaluation with baseline and random
//! comparators ([`eval`]), and a k-means clustering comparator
//! ([`cluster`]).

pub mod cluster;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod io;
pub mod learner;
pub mod lexicon;
pub mod manifest;
pub mod synth;

pub use error::{Error, Result};
