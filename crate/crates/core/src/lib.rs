//! Topic modeling for short texts such as tweets.
//!
//! The crate covers the whole workflow: preprocessing raw messages into a
//! vocabulary-indexed [`corpus::Corpus`], training LDA by collapsed Gibbs
//! sampling ([`lda::train`]), scoring models by normalized mutual
//! information and document co-occurrence coherence ([`eval`]), and running
//! parameter sweeps that produce NMI and coherence tables ([`report`]).

pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod lda;
pub mod report;
pub mod synthetic;

pub use error::{Error, Result};
