use thiserror::Error;

/// Everything that can go wrong when validating operators and states or when a
/// mathematical precondition of an analysis routine is not met.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not a projector (defect {defect:.3e})")]
    NotProjector { defect: f64 },

    #[error("operator is not positive semidefinite (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace:.12}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("state vector has norm {norm:.12}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("operation needs a bipartite state but no subsystem dimensions are attached")]
    MissingBipartiteDims,

    #[error("subsystem dimensions {d1}x{d2} do not factor total dimension {dim}")]
    BadBipartiteDims { d1: usize, d2: usize, dim: usize },

    #[error("projectors are not mutually orthogonal (overlap {overlap:.3e})")]
    NotOrthogonal { overlap: f64 },

    #[error("projector family is not certain on the state (probability deficit {deficit:.3e})")]
    NotCertain { deficit: f64 },

    #[error("observable is not discrete in relation to the state (probability deficit {deficit:.3e})")]
    NotDiscrete { deficit: f64 },

    #[error("eigenvalue labels are not pairwise distinct")]
    DuplicateEigenvalues,

    #[error("the observables are not comparable by refinement on this state")]
    NotRefinement,

    #[error("mixture components are not biorthogonal (worst residual {residual:.3e})")]
    NotBiorthogonal { residual: f64 },

    #[error("invalid probability distribution: {reason}")]
    InvalidProbability { reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
