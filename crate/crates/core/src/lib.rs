//! Keyword-seeded bi-gram networks and homogeneity blockmodeling for
//! archival text corpora.
//!
//! The crate is organised as the batch pipeline it implements:
//!
//! - [`preprocess`]: raw document text to lemma sequences
//! - [`ngram`]: bag-of-words matrix and weighted bi-gram network
//! - [`subnet`]: keyword seeds, neighbourhood extraction, size reduction, time series
//! - [`blockmodel`]: null/complete homogeneity blockmodeling with restart local search
//! - [`pipeline`]: configuration, staged on-disk artifacts and the run manifest

pub mod blockmodel;
pub mod error;
pub mod matrix;
pub mod ngram;
pub mod pipeline;
pub mod preprocess;
pub mod subnet;

pub use error::{Error, Result};
pub use matrix::SquareMatrix;
