//! Alternative surname spelling generation and evaluation.

pub mod alignment;
pub mod cli;
pub mod corpus;
pub mod decoder;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod io;
pub mod langmodel;
pub mod dataprep;
pub mod phonetic;
pub mod ranking;
pub mod similarity;
pub mod synthbench;

pub use corpus::{normalize, FrequencyUniverse, Name, NamePairRecord, RankedCandidate};
pub use error::{Error, Result};
