//! Operators on finite-dimensional Hilbert spaces.
//!
//! The building blocks everything else works with: validated Hermitian
//! operators, density operators (optionally carrying a bipartite tensor
//! structure), projectors, and spectral forms `A = sum_l a_l P_l (+ remainder)`
//! with pairwise-distinct eigenvalues and mutually orthogonal eigenprojectors.
//!
//! Composite indices follow the row-major convention: the basis vector
//! `|i1>|i2>` of a `d1 x d2` system sits at index `i1 * d2 + i2`, so subsystem
//! one is the slow (left) tensor factor.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::tolerance;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Which tensor factor of a bipartite system an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    One,
    Two,
}

impl Subsystem {
    pub fn other(self) -> Subsystem {
        match self {
            Subsystem::One => Subsystem::Two,
            Subsystem::Two => Subsystem::One,
        }
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn check_square_finite(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Largest entrywise deviation of `m` from its own adjoint.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let adj = m.adjoint();
    (m - adj)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Is `m` Hermitian within `tol` (entrywise)? Errors on non-square or
/// non-finite input rather than guessing.
pub fn hermitian_check(m: &CMatrix, tol: f64) -> Result<bool> {
    check_square_finite(m)?;
    Ok(hermiticity_defect(m) <= tol)
}

/// Frobenius (Hilbert-Schmidt) norm.
pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.norm()
}

/// Spectral norm (largest singular value), computed as
/// `sqrt(lambda_max(M^H M))`. Dense and exact enough for desk-scale matrices.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    let eigs = gram.symmetric_eigen().eigenvalues;
    eigs.iter().cloned().fold(0.0, f64::max).max(0.0).sqrt()
}

/// `AB - BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_square_finite(a)?;
    check_square_finite(b)?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(a * b - b * a)
}

/// Spectral norm of the commutator `AB - BA`.
pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    Ok(spectral_norm(&commutator(a, b)?))
}

/// Kronecker product with subsystem one as the left (slow) factor.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Embed a single-subsystem operator into the composite space:
/// `M (x) I` for subsystem one, `I (x) M` for subsystem two.
pub fn embed(m: &CMatrix, side: Subsystem, other_dim: usize) -> CMatrix {
    let id = CMatrix::identity(other_dim, other_dim);
    match side {
        Subsystem::One => tensor_product(m, &id),
        Subsystem::Two => tensor_product(&id, m),
    }
}

/// A validated Hermitian operator. Construction symmetrizes the matrix
/// (`(M + M^H)/2`) after the tolerance check so downstream eigensolves see an
/// exactly Hermitian input.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tol(matrix, tolerance::GENERAL)
    }

    pub fn with_tol(matrix: CMatrix, tol: f64) -> Result<Self> {
        if !hermitian_check(&matrix, tol)? {
            return Err(Error::NotHermitian {
                defect: hermiticity_defect(&matrix),
            });
        }
        let sym = (&matrix + matrix.adjoint()) * real(0.5);
        Ok(Self { matrix: sym })
    }

    /// For matrices Hermitian by construction (sums of `v v^H`, symmetrized
    /// products, ...). Still symmetrizes to scrub roundoff.
    pub(crate) fn trusted(matrix: CMatrix) -> Self {
        let sym = (&matrix + matrix.adjoint()) * real(0.5);
        Self { matrix: sym }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// A density operator: Hermitian, positive semidefinite (eigenvalues above
/// `-tolerance::RANK`), unit trace. May carry bipartite dimensions `(d1, d2)`
/// with `d1 * d2 == dim`, which partial traces and mutual information need.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: CMatrix,
    bipartite: Option<(usize, usize)>,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let herm = HermitianOperator::new(matrix)?;
        let trace = herm.matrix().trace();
        if (trace.re - 1.0).abs() > tolerance::GENERAL || trace.im.abs() > tolerance::GENERAL {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        let min_eig = herm
            .matrix()
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -tolerance::RANK {
            return Err(Error::NotPositive {
                min_eigenvalue: min_eig,
            });
        }
        Ok(Self {
            matrix: herm.into_matrix(),
            bipartite: None,
        })
    }

    /// A density operator on a composite `d1 x d2` space.
    pub fn bipartite(matrix: CMatrix, d1: usize, d2: usize) -> Result<Self> {
        Self::new(matrix)?.with_bipartite_dims(d1, d2)
    }

    /// Attach (or replace) the tensor-factor dimensions.
    pub fn with_bipartite_dims(mut self, d1: usize, d2: usize) -> Result<Self> {
        if d1 * d2 != self.dim() || d1 == 0 || d2 == 0 {
            return Err(Error::BadBipartiteDims {
                d1,
                d2,
                dim: self.dim(),
            });
        }
        self.bipartite = Some((d1, d2));
        Ok(self)
    }

    /// `|psi><psi|` from a state vector; the norm must be 1 within the general
    /// tolerance and is then normalized away exactly.
    pub fn from_pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > tolerance::GENERAL {
            return Err(Error::NotNormalized { norm });
        }
        let normalized = psi / real(norm);
        Ok(Self {
            matrix: &normalized * normalized.adjoint(),
            bipartite: None,
        })
    }

    pub fn bipartite_from_pure(psi: &CVector, d1: usize, d2: usize) -> Result<Self> {
        Self::from_pure(psi)?.with_bipartite_dims(d1, d2)
    }

    /// Internal constructor for states valid by construction (partial traces,
    /// normalized projections of valid states). Symmetrizes and renormalizes
    /// the trace exactly; positivity is inherited from the construction.
    pub(crate) fn trusted(matrix: CMatrix, bipartite: Option<(usize, usize)>) -> Self {
        let sym = (&matrix + matrix.adjoint()) * real(0.5);
        let trace = sym.trace().re;
        Self {
            matrix: sym / real(trace),
            bipartite,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn bipartite_dims(&self) -> Option<(usize, usize)> {
        self.bipartite
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut eigs: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
        eigs
    }
}

/// An orthogonal projector with its rank.
#[derive(Debug, Clone)]
pub struct Projector {
    matrix: CMatrix,
    rank: usize,
}

impl Projector {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tol(matrix, tolerance::GENERAL)
    }

    pub fn with_tol(matrix: CMatrix, tol: f64) -> Result<Self> {
        let herm = HermitianOperator::with_tol(matrix, tol)?;
        let m = herm.into_matrix();
        let idem = frobenius_norm(&(&m * &m - &m));
        if idem > tol {
            return Err(Error::NotProjector { defect: idem });
        }
        let trace = m.trace().re;
        let rank = trace.round();
        if (trace - rank).abs() > tol * m.nrows() as f64 || rank < 0.0 {
            return Err(Error::NotProjector {
                defect: (trace - rank).abs(),
            });
        }
        Ok(Self {
            matrix: m,
            rank: rank as usize,
        })
    }

    /// `sum_k v_k v_k^H` over an orthonormal family.
    pub fn from_orthonormal_basis(columns: &[CVector]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidInput(
                "projector needs at least one basis vector".into(),
            ));
        }
        let dim = columns[0].len();
        let mut m = CMatrix::zeros(dim, dim);
        for (i, v) in columns.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            for (j, w) in columns.iter().enumerate() {
                let overlap = (v.adjoint() * w)[(0, 0)];
                let target = if i == j { 1.0 } else { 0.0 };
                if (overlap - real(target)).norm() > tolerance::GENERAL {
                    return Err(Error::NotOrthogonal {
                        overlap: (overlap - real(target)).norm(),
                    });
                }
            }
            m += v * v.adjoint();
        }
        Ok(Self::trusted(m, columns.len()))
    }

    /// Internal constructor for projectors exact by construction (sums of
    /// `v v^H` over orthonormal eigenvectors, complements, embeddings).
    pub(crate) fn trusted(matrix: CMatrix, rank: usize) -> Self {
        let sym = (&matrix + matrix.adjoint()) * real(0.5);
        Self { matrix: sym, rank }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
            rank: dim,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `I - P`.
    pub fn complement(&self) -> Projector {
        let id = CMatrix::identity(self.dim(), self.dim());
        Projector::trusted(id - &self.matrix, self.dim() - self.rank)
    }

    /// `P (x) I` or `I (x) P`.
    pub fn embed(&self, side: Subsystem, other_dim: usize) -> Projector {
        Projector::trusted(embed(&self.matrix, side, other_dim), self.rank * other_dim)
    }

    /// Expectation `tr(P rho)` as a real number.
    pub fn probability(&self, rho: &DensityOperator) -> f64 {
        (&self.matrix * rho.matrix()).trace().re
    }
}

/// One eigenvalue with its eigenprojector.
#[derive(Debug, Clone)]
pub struct SpectralBranch {
    pub eigenvalue: f64,
    pub projector: Projector,
}

/// A (partly) spectral form `A = sum_l a_l P_l + R`: pairwise-distinct
/// eigenvalues, mutually orthogonal projectors, and an optional Hermitian
/// remainder `R` supported on the orthocomplement of all branches. A full
/// eigendecomposition has no remainder and its projectors resolve the
/// identity.
#[derive(Debug, Clone)]
pub struct SpectralForm {
    branches: Vec<SpectralBranch>,
    remainder: Option<HermitianOperator>,
    dim: usize,
}

impl SpectralForm {
    pub fn new(
        branches: Vec<SpectralBranch>,
        remainder: Option<HermitianOperator>,
    ) -> Result<Self> {
        let dim = match (branches.first(), &remainder) {
            (Some(b), _) => b.projector.dim(),
            (None, Some(r)) => r.dim(),
            (None, None) => {
                return Err(Error::InvalidInput(
                    "spectral form needs at least one branch or a remainder".into(),
                ))
            }
        };
        for b in &branches {
            if b.projector.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: b.projector.dim(),
                });
            }
            if !b.eigenvalue.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        if let Some(r) = &remainder {
            if r.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.dim(),
                });
            }
        }
        for (i, a) in branches.iter().enumerate() {
            for b in branches.iter().skip(i + 1) {
                if a.eigenvalue == b.eigenvalue {
                    return Err(Error::DuplicateEigenvalues);
                }
                let overlap = frobenius_norm(&(a.projector.matrix() * b.projector.matrix()));
                if overlap > tolerance::GENERAL {
                    return Err(Error::NotOrthogonal { overlap });
                }
            }
            if let Some(r) = &remainder {
                let overlap = frobenius_norm(&(a.projector.matrix() * r.matrix()));
                if overlap > tolerance::GENERAL {
                    return Err(Error::NotOrthogonal { overlap });
                }
            }
        }
        let total_rank: usize = branches.iter().map(|b| b.projector.rank()).sum();
        if total_rank > dim {
            return Err(Error::InvalidInput(format!(
                "branch ranks sum to {total_rank}, exceeding dimension {dim}"
            )));
        }
        Ok(Self {
            branches,
            remainder,
            dim,
        })
    }

    pub fn branches(&self) -> &[SpectralBranch] {
        &self.branches
    }

    pub fn remainder(&self) -> Option<&HermitianOperator> {
        self.remainder.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Reassemble `sum_l a_l P_l + R`.
    pub fn to_operator(&self) -> HermitianOperator {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for b in &self.branches {
            m += b.projector.matrix() * real(b.eigenvalue);
        }
        if let Some(r) = &self.remainder {
            m += r.matrix();
        }
        HermitianOperator::trusted(m)
    }

    /// The same observable acting on one factor of a composite space.
    pub fn embed(&self, side: Subsystem, other_dim: usize) -> SpectralForm {
        let branches = self
            .branches
            .iter()
            .map(|b| SpectralBranch {
                eigenvalue: b.eigenvalue,
                projector: b.projector.embed(side, other_dim),
            })
            .collect();
        let remainder = self
            .remainder
            .as_ref()
            .map(|r| HermitianOperator::trusted(embed(r.matrix(), side, other_dim)));
        SpectralForm {
            branches,
            remainder,
            dim: self.dim * other_dim,
        }
    }

    /// `tr(P_l rho)` for every branch, in branch order.
    pub fn branch_probabilities(&self, rho: &DensityOperator) -> Vec<f64> {
        self.branches
            .iter()
            .map(|b| b.projector.probability(rho))
            .collect()
    }
}

/// Default eigenvalue-clustering width for [`spectral_decompose`]:
/// `tolerance::CLUSTER_REL` times the spectral norm of the operator.
pub fn default_cluster_tol(h: &HermitianOperator) -> f64 {
    tolerance::CLUSTER_REL * spectral_norm(h.matrix())
}

/// Default commutation threshold for weak/strong classification:
/// `tolerance::COMMUTATOR_REL` times the spectral norm of the state.
pub fn default_comm_tol(rho: &DensityOperator) -> f64 {
    tolerance::COMMUTATOR_REL * spectral_norm(rho.matrix())
}

/// Full spectral decomposition with eigenvalue clustering: eigenvalues closer
/// than `cluster_tol` (single-link on the sorted spectrum) are treated as one
/// degenerate branch whose eigenvalue is the cluster mean. The result has no
/// remainder and its projectors resolve the identity.
pub fn spectral_decompose(h: &HermitianOperator, cluster_tol: f64) -> Result<SpectralForm> {
    let dim = h.dim();
    let eig = nalgebra::linalg::SymmetricEigen::try_new(h.matrix().clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("eigenvalues are finite")
    });

    let mut branches: Vec<SpectralBranch> = Vec::new();
    let mut cluster: Vec<usize> = Vec::new();
    let flush = |cluster: &mut Vec<usize>, branches: &mut Vec<SpectralBranch>| {
        if cluster.is_empty() {
            return;
        }
        let mean: f64 =
            cluster.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / cluster.len() as f64;
        let mut p = CMatrix::zeros(dim, dim);
        for &k in cluster.iter() {
            let v = eig.eigenvectors.column(k);
            p += v * v.adjoint();
        }
        branches.push(SpectralBranch {
            eigenvalue: mean,
            projector: Projector::trusted(p, cluster.len()),
        });
        cluster.clear();
    };

    for &k in &order {
        if let Some(&last) = cluster.last() {
            if eig.eigenvalues[k] - eig.eigenvalues[last] > cluster_tol {
                flush(&mut cluster, &mut branches);
            }
        }
        cluster.push(k);
    }
    flush(&mut cluster, &mut branches);

    let form = SpectralForm::new(branches, None)?;

    let residual = spectral_norm(&(form.to_operator().matrix() - h.matrix()));
    let h_norm = spectral_norm(h.matrix());
    let bound = (1e-10 * h_norm.max(1.0)).max(2.0 * cluster_tol);
    if residual > bound {
        return Err(Error::Numerical(format!(
            "spectral reconstruction residual {residual:.3e} exceeds {bound:.3e}"
        )));
    }
    Ok(form)
}

/// Trace out one subsystem of a bipartite state, keeping `keep`.
pub fn partial_trace(rho: &DensityOperator, keep: Subsystem) -> Result<DensityOperator> {
    let (d1, d2) = rho.bipartite_dims().ok_or(Error::MissingBipartiteDims)?;
    let m = rho.matrix();
    let reduced = match keep {
        Subsystem::One => {
            let mut out = CMatrix::zeros(d1, d1);
            for i1 in 0..d1 {
                for j1 in 0..d1 {
                    let mut acc = C64::default();
                    for i2 in 0..d2 {
                        acc += m[(i1 * d2 + i2, j1 * d2 + i2)];
                    }
                    out[(i1, j1)] = acc;
                }
            }
            out
        }
        Subsystem::Two => {
            let mut out = CMatrix::zeros(d2, d2);
            for i2 in 0..d2 {
                for j2 in 0..d2 {
                    let mut acc = C64::default();
                    for i1 in 0..d1 {
                        acc += m[(i1 * d2 + i2, i1 * d2 + j2)];
                    }
                    out[(i2, j2)] = acc;
                }
            }
            out
        }
    };
    Ok(DensityOperator::trusted(reduced, None))
}

/// Projector onto the range (support) of a state: eigenvectors with
/// eigenvalue above `rank_tol`.
pub fn range_projector(rho: &DensityOperator, rank_tol: f64) -> Projector {
    let eig = rho.matrix().clone().symmetric_eigen();
    let dim = rho.dim();
    let mut p = CMatrix::zeros(dim, dim);
    let mut rank = 0;
    for k in 0..dim {
        if eig.eigenvalues[k] > rank_tol {
            let v = eig.eigenvectors.column(k);
            p += v * v.adjoint();
            rank += 1;
        }
    }
    Projector::trusted(p, rank)
}

/// The three equivalent faces of "the event P is certain in the state rho":
/// unit probability, `P rho = rho`, and `P Q = Q` for the range projector `Q`.
/// `certain` reflects the probability criterion; the residuals let callers
/// confirm that all three agree.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CertaintyReport {
    pub probability: f64,
    pub algebraic_residual: f64,
    pub range_residual: f64,
    pub certain: bool,
}

impl CertaintyReport {
    /// Do the three criteria give the same verdict at this tolerance?
    /// Random instances sit far from the boundary in all three measures, so a
    /// shared threshold is meaningful.
    pub fn criteria_agree(&self, tol: f64) -> bool {
        let by_probability = 1.0 - self.probability <= tol;
        let by_algebra = self.algebraic_residual <= tol;
        let by_range = self.range_residual <= tol;
        by_probability == by_algebra && by_algebra == by_range
    }
}

/// Evaluate all three certainty criteria for the event `p` in the state `rho`.
pub fn is_certain_event(p: &Projector, rho: &DensityOperator, tol: f64) -> CertaintyReport {
    let probability = p.probability(rho);
    let algebraic_residual = spectral_norm(&(p.matrix() * rho.matrix() - rho.matrix()));
    let q = range_projector(rho, tolerance::RANK);
    let range_residual = spectral_norm(&(p.matrix() * q.matrix() - q.matrix()));
    CertaintyReport {
        probability,
        algebraic_residual,
        range_residual,
        certain: probability >= 1.0 - tol,
    }
}
