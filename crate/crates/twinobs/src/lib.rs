//! Analysis of observables against quantum states on finite-dimensional
//! Hilbert spaces.
//!
//! The crate answers questions of this shape: given a (possibly degenerate,
//! possibly partly specified) Hermitian observable `A = sum_l a_l P_l` and a
//! density operator `rho`,
//!
//! * how much of the measurement entropy of `A` is due to coherences that the
//!   measurement destroys (the *coherence entropy*
//!   `E_C = S(sum_i P_i rho P_i) - S(rho)`), and how does the entropy ledger
//!   `S(A, rho) = E_C + [S(rho) - sum_i p_i S(rho_i)]` balance;
//! * which spectral branches of `A` are detectable in `rho`, which commute
//!   with it (strong) and which do not (weak), and how the analysis reduces
//!   to the weak part;
//! * when do two observables on the factors of a bipartite system act as
//!   *twin observables* — equal-probability, branch-by-branch equivalent
//!   measurements on either side — and how the mutual information then splits
//!   into a quasi-classical part and a quantum discord equal to the coherence
//!   entropy.
//!
//! Modules build on each other in that order:
//!
//! * [`operator`] — validated matrices, projectors, spectral forms, partial
//!   traces, certainty criteria;
//! * [`entropy`] — von Neumann and measurement entropies, the entropy ledger,
//!   mutual information;
//! * [`relation`] — detectable/weak/strong classification, refinement partial
//!   order, completeness;
//! * [`twins`] — Schmidt decomposition, twin verification and construction,
//!   discord ledger, biorthogonal mixtures.
//!
//! Everything is dense `nalgebra` linear algebra over `Complex<f64>`, sized
//! for desk-scale systems (dimensions up to a few dozen), with explicit,
//! centrally documented tolerances in [`tolerance`].

pub mod entropy;
pub mod error;
pub mod operator;
pub mod relation;
pub mod tolerance;
pub mod twins;

pub use error::{Error, Result};
pub use operator::{
    CMatrix, CVector, DensityOperator, HermitianOperator, Projector, SpectralBranch,
    SpectralForm, Subsystem, C64,
};
