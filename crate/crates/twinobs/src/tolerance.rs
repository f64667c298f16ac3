//! Default numerical thresholds, in one place so every module and the CLI
//! agree on them. Operations that take an explicit tolerance parameter state
//! which of these they default to.

/// General-purpose comparison tolerance: hermiticity and trace checks,
/// residual verdicts, CLI `--tol` default.
pub const GENERAL: f64 = 1e-8;

/// Eigenvalues of a state at or below this count as zero: rank decisions,
/// positivity slack, range projectors.
pub const RANK: f64 = 1e-10;

/// Branch probabilities above this count as detectable.
pub const DETECT: f64 = 1e-10;

/// Allowed deficit in `sum_i tr(P_i rho) = 1` when an observable must be
/// discrete in relation to a state.
pub const DISCRETENESS: f64 = 1e-8;

/// Relative eigenvalue-clustering width (times the spectral norm of the
/// operator) for grouping near-degenerate eigenvalues into one branch.
pub const CLUSTER_REL: f64 = 1e-8;

/// Relative commutator threshold (times the spectral norm of the state) for
/// classifying branches as commuting.
pub const COMMUTATOR_REL: f64 = 1e-8;

/// Negative eigenvalues beyond this magnitude trigger a warning when clamped
/// in entropy computations.
pub const ENTROPY_CLAMP_WARN: f64 = 1e-12;

/// Schmidt coefficients at or below this are dropped. Chosen in coefficient
/// space: a true zero eigenvalue of a reduced state carries numerical noise
/// up to ~1e-14, i.e. ~1e-7 for the coefficient, so the cutoff sits safely
/// above the noise floor and far below any physically intended coefficient.
pub const SCHMIDT: f64 = 1e-6;
