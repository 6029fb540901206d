use thiserror::Error;

use crate::graph::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph violates the weighted graph axioms: {}", format_violations(.0))]
    InvalidGraph(Vec<Violation>),

    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("vertex {0} lies outside the addressable vertex universe of the family")]
    OutsideUniverse(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("enumeration over {size} vertices exceeds the cap of {cap}")]
    EnumerationCap { size: usize, cap: usize },

    #[error("section of size {size} exceeds the dense solver cap of {cap}")]
    TooLarge { size: usize, cap: usize },

    #[error("numerical solver failure: {0}")]
    Solver(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("enclosure too small: neighbor {neighbor} of support vertex {vertex} is missing")]
    EnclosureTooSmall { vertex: usize, neighbor: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of numerical routines as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Solver(_) | Error::Quadrature(_))
    }
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
