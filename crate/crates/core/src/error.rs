use thiserror::Error;

/// Errors raised by the construction and analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("triangulation is not closed ({0} unglued faces)")]
    NotClosed(usize),
    #[error("invalid triangulation: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("move precondition failed: {0}")]
    Precondition(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("vector violates the constraint equalities (residual {0:e})")]
    Infeasible(f64),
    #[error("direction is not tangent to the polytope (residual {0:e})")]
    NotTangent(f64),
    #[error("angles on the boundary of the polytope: {0}")]
    Boundary(String),
    #[error("newton iteration cap of {0} exceeded")]
    IterationCap(usize),
    #[error("the closed angle polytope is empty: {0}")]
    EmptyPolytope(String),
    #[error("cusp {0} is not a torus (euler characteristic {1})")]
    NotTorus(usize, i64),
}

pub type Result<T> = std::result::Result<T, Error>;
