//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degenerate lattice")]
    Degenerate,
    #[error("lattice is not integral")]
    NonIntegral,
    #[error("lattice is not of full type")]
    NotFullType,
    #[error("enumeration budget exceeded: {needed} candidates required, limit {limit}")]
    Budget { needed: String, limit: String },
    #[error("no stabilization up to depth {depth}: trace {trace}")]
    NoStabilization { depth: u32, trace: String },
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
