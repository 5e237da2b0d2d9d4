//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors reported by graph construction, algebra operations and parsers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An id was declared twice in the same namespace.
    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    /// An edge endpoint refers to a vertex that was never declared.
    #[error("edge `{edge}` refers to unknown vertex `{vertex}`")]
    UnknownEndpoint { edge: String, vertex: String },

    /// Both endpoints of an edge name the same vertex.
    #[error("edge `{0}` is a loop; loops are not allowed")]
    LoopEdge(String),

    /// An endpoint multiplicity was zero.
    #[error("edge `{0}` has a zero multiplicity; multiplicities must be positive")]
    ZeroMultiplicity(String),

    /// A vertex id was looked up but does not exist.
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    /// An edge id was looked up but does not exist.
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    /// A polynomial mentions a variable outside the edge set in play.
    #[error("unknown variable `u_{0}`")]
    UnknownVariable(String),

    /// A matrix row has two entries of the same sign, so it cannot be the
    /// row of an incidence matrix.
    #[error("matrix row `{0}` has two entries of the same sign")]
    BadMatrixRow(String),

    /// A matrix row count or column count disagrees with its labels.
    #[error("matrix shape mismatch: {0}")]
    BadMatrixShape(String),

    /// The total-degree guard tripped; the computation was aborted before
    /// exhausting memory.
    #[error("degree guard exceeded: total degree {degree} is over the cap {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },

    /// Input text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// No total order on the vertices realizes the requested parity
    /// function; the listed vertices form a directed constraint cycle.
    #[error("no order realizes the parity function: constraint cycle through {0:?}")]
    CyclePresent(Vec<String>),

    /// A structural cap was hit (order enumeration, ad-power bound, ...).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Two independent computations of the same quantity disagreed.
    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),
}
