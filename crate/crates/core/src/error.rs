use thiserror::Error;

use crate::graph::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("invalid network: {}", join(.0))]
    InvalidNetwork(Vec<Violation>),

    #[error("network is not connected; components: {}", format_components(.0))]
    Disconnected(Vec<Vec<String>>),

    #[error("function has {found} values but the network has {expected} vertices")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("invalid conductance pair: {0}")]
    InvalidPair(String),

    #[error("harmonic subspaces must be one-dimensional (b: {dim_b}, c: {dim_c})")]
    HarmonicDimension { dim_b: usize, dim_c: usize },

    #[error("escape probability needs distinct start and target, got `{0}` twice")]
    SameVertex(String),

    #[error("vertex `{0}` has no neighbors")]
    IsolatedVertex(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("linear algebra failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

fn format_components(components: &[Vec<String>]) -> String {
    components
        .iter()
        .map(|c| format!("{{{}}}", c.join(", ")))
        .collect::<Vec<_>>()
        .join(" ")
}
