use thiserror::Error;

use crate::sim::Trajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected: {0}")]
    Disconnected(String),

    #[error("spanning tree enumeration exceeded the limit of {limit} trees")]
    TreeLimitExceeded { limit: usize },

    #[error("graph is not regular (vertex {vertex} has degree {degree}, expected {expected})")]
    NotRegular {
        vertex: usize,
        degree: usize,
        expected: usize,
    },

    #[error("graph has no lattice coordinates")]
    MissingCoordinates,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("repeated reinforcement rates: f({i}) = f({j}) = {value}")]
    DegenerateRates { i: u64, j: u64, value: f64 },

    #[error("numerical overflow in {0}")]
    Overflow(&'static str),

    #[error("{what} did not converge (residual {residual:e})")]
    NonConvergence { what: &'static str, residual: f64 },

    #[error("invalid local-time query: {0}")]
    InvalidQuery(String),

    #[error("stopping rule cannot be met: {0}")]
    Unreachable(String),

    #[error("run capped after {cap} events")]
    Capped {
        cap: u64,
        partial: Box<Trajectory>,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
