//! Twin observables on bipartite states and the information ledger they
//! induce.
//!
//! Two subsystem observables are *physical twins* on a state when their
//! detectable eigenvalues pair up one-to-one such that measuring either
//! member of a pair acts identically on the state: `(P1 ⊗ I) rho = (I ⊗ P2) rho`
//! for every matched pair of spectral projectors. Every bipartite pure state
//! carries a canonical pair of twins read off its Schmidt decomposition;
//! mixed states may or may not admit them.
//!
//! When twins exist, the von Neumann mutual information splits into the
//! measurement entropy shared by both sides, the coherence entropy of the
//! twins, and the information still buried in the measurement components.
//! When the twins are additionally *complete* (every component pure), the
//! split collapses into a quasi-classical part and a purely quantum
//! remainder — the discord.

use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::entropy::{
    luders_state, mutual_information, shannon_raw, von_neumann_entropy, ProbabilityVector,
};
use crate::error::{Error, Result};
use crate::operator::{
    commutator_norm, embed, partial_trace, spectral_norm, tensor_product, CMatrix, CVector,
    DensityOperator, Projector, SpectralBranch, SpectralForm, Subsystem, C64,
};
use crate::relation::{detectable_split, is_complete, DetectableSplit};
use crate::tolerance;

/// A bipartite pure state written as `sum_k c_k |u_k>|w_k>` with positive
/// coefficients in descending order and orthonormal bases on both sides.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    coefficients: Vec<f64>,
    left_basis: Vec<CVector>,
    right_basis: Vec<CVector>,
    dims: (usize, usize),
}

impl SchmidtForm {
    /// The positive coefficients, descending. Their squares sum to one.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn left_basis(&self) -> &[CVector] {
        &self.left_basis
    }

    pub fn right_basis(&self) -> &[CVector] {
        &self.right_basis
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    /// Number of terms — the rank of either reduced state.
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// Reassemble the state vector (row-major composite index
    /// `i1 * d2 + i2`).
    pub fn reconstruct(&self) -> CVector {
        let (d1, d2) = self.dims;
        let mut v = CVector::zeros(d1 * d2);
        for ((c, u), w) in self
            .coefficients
            .iter()
            .zip(&self.left_basis)
            .zip(&self.right_basis)
        {
            let c = C64::new(*c, 0.0);
            for i1 in 0..d1 {
                for i2 in 0..d2 {
                    v[i1 * d2 + i2] += c * u[i1] * w[i2];
                }
            }
        }
        v
    }
}

/// Schmidt-decompose a normalized bipartite vector, keeping coefficients
/// above `tol` (use [`tolerance::SCHMIDT`] unless you have a reason not to:
/// discarded squares of that size sit at the noise floor of the underlying
/// eigensolve).
///
/// Works through the eigendecomposition of the left reduced state: if
/// `phi` has coefficient matrix `C` (so `rho_1 = C C^dagger`), each retained
/// eigenpair `(c_k^2, u_k)` yields the right-side partner
/// `w_k = (u_k^dagger C)^T / c_k`, orthonormal automatically.
pub fn schmidt_decompose(phi: &CVector, dims: (usize, usize), tol: f64) -> Result<SchmidtForm> {
    let (d1, d2) = dims;
    if d1 == 0 || d2 == 0 || phi.len() != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            found: phi.len(),
        });
    }
    if phi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let norm = phi.norm();
    if (norm - 1.0).abs() > tolerance::GENERAL {
        return Err(Error::NotNormalized { norm });
    }
    let psi = phi / C64::new(norm, 0.0);

    let c_mat = CMatrix::from_fn(d1, d2, |i1, i2| psi[i1 * d2 + i2]);
    let rho1 = &c_mat * c_mat.adjoint();
    let eigen = SymmetricEigen::try_new(rho1, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("eigendecomposition did not converge".into()))?;

    let mut order: Vec<usize> = (0..eigen.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b]
            .partial_cmp(&eigen.eigenvalues[a])
            .expect("eigenvalues are finite")
    });

    let mut coefficients = Vec::new();
    let mut left_basis = Vec::new();
    let mut right_basis = Vec::new();
    for k in order {
        let lambda = eigen.eigenvalues[k].max(0.0);
        let c = lambda.sqrt();
        if c <= tol {
            continue;
        }
        let u: CVector = eigen.eigenvectors.column(k).into_owned();
        let w = CVector::from_fn(d2, |i2, _| {
            (0..d1).map(|i1| u[i1].conj() * c_mat[(i1, i2)]).sum::<C64>() / C64::new(c, 0.0)
        });
        coefficients.push(c);
        left_basis.push(u);
        right_basis.push(w);
    }

    Ok(SchmidtForm {
        coefficients,
        left_basis,
        right_basis,
        dims,
    })
}

fn twin_side(basis: &[CVector], labels: &[f64], dim: usize) -> Result<SpectralForm> {
    let mut branches = Vec::with_capacity(basis.len() + 1);
    let mut sum = CMatrix::zeros(dim, dim);
    for (u, &label) in basis.iter().zip(labels) {
        let p = Projector::from_orthonormal_basis(std::slice::from_ref(u))?;
        sum += p.matrix();
        branches.push(SpectralBranch {
            eigenvalue: label,
            projector: p,
        });
    }
    if basis.len() < dim {
        let complement = Projector::trusted(sum, basis.len()).complement();
        branches.push(SpectralBranch {
            eigenvalue: 0.0,
            projector: complement,
        });
    }
    SpectralForm::new(branches, None)
}

/// The canonical twins of a bipartite pure state: on each side, one rank-one
/// branch per Schmidt term, labeled `1, 2, ...` in descending coefficient
/// order, plus (where the Schmidt rank is deficient) an eigenvalue-zero
/// branch on the orthogonal complement.
pub fn pure_state_twins(phi: &CVector, dims: (usize, usize)) -> Result<(SpectralForm, SpectralForm)> {
    let schmidt = schmidt_decompose(phi, dims, tolerance::SCHMIDT)?;
    let labels: Vec<f64> = (1..=schmidt.rank()).map(|k| k as f64).collect();
    twins_from_schmidt(&schmidt, &labels)
}

/// Like [`pure_state_twins`] but with caller-chosen eigenvalue labels, one
/// per Schmidt term. Labels must be finite, distinct, and non-zero (zero is
/// reserved for the orthogonal complement).
pub fn pure_state_twins_labeled(
    phi: &CVector,
    dims: (usize, usize),
    labels: &[f64],
) -> Result<(SpectralForm, SpectralForm)> {
    let schmidt = schmidt_decompose(phi, dims, tolerance::SCHMIDT)?;
    if labels.len() != schmidt.rank() {
        return Err(Error::DimensionMismatch {
            expected: schmidt.rank(),
            found: labels.len(),
        });
    }
    if labels.iter().any(|l| !l.is_finite() || *l == 0.0) {
        return Err(Error::InvalidInput(
            "twin labels must be finite and non-zero".into(),
        ));
    }
    for (i, a) in labels.iter().enumerate() {
        if labels[i + 1..].contains(a) {
            return Err(Error::DuplicateEigenvalues);
        }
    }
    twins_from_schmidt(&schmidt, labels)
}

fn twins_from_schmidt(
    schmidt: &SchmidtForm,
    labels: &[f64],
) -> Result<(SpectralForm, SpectralForm)> {
    let (d1, d2) = schmidt.dims();
    let a1 = twin_side(schmidt.left_basis(), labels, d1)?;
    let a2 = twin_side(schmidt.right_basis(), labels, d2)?;
    Ok((a1, a2))
}

/// One matched pair of detectable eigenvalues in a twin verification.
#[derive(Debug, Clone, Serialize)]
pub struct PtoPair {
    pub eigenvalue_1: f64,
    pub eigenvalue_2: f64,
    /// Probability of the pair (evaluated on side 1).
    pub probability: f64,
    /// `||(P1 ⊗ I) rho - (I ⊗ P2) rho||` — the defining twin condition.
    pub algebraic_residual: f64,
    /// `||(P1 ⊗ I) rho (P1 ⊗ I) - (I ⊗ P2) rho (I ⊗ P2)||` — the matched
    /// branches select the same measurement component.
    pub measurement_residual: f64,
}

/// Full verdict on whether two subsystem observables are physical twins on a
/// state.
#[derive(Debug, Clone, Serialize)]
pub struct PtoReport {
    /// The greedily matched pairs (empty when the detectable counts differ).
    pub pairs: Vec<PtoPair>,
    /// Total detectable probability of each side; both must reach one for a
    /// valid twin pair.
    pub total_probability_1: f64,
    pub total_probability_2: f64,
    /// `||[A_s, rho_s]||` for each reduced state. Twins always commute with
    /// their reduced states — this is derived, never assumed, so the values
    /// are reported as evidence rather than checked as a precondition.
    pub derived_compatibility: (f64, f64),
    /// `||(A1 ⊗ I) rho - (I ⊗ A2) rho||` for the full operators, which also
    /// weighs the eigenvalue labels.
    pub algebraic_twin_residual: f64,
    pub is_pto: bool,
    pub is_algebraic_twin: bool,
    /// First reason the twin check failed, when it did.
    pub diagnostic: Option<String>,
}

/// Decide whether `a1` and `a2` are physical twins on `rho12`: both sides
/// must expose the same number of detectable eigenvalues with total
/// probability one, and the detectable branches must match one-to-one with
/// `||(P1 ⊗ I) rho - (I ⊗ P2) rho||` at most `tol`, unambiguously (the
/// runner-up candidate for each branch must exceed `tol`).
pub fn verify_pto(
    a1: &SpectralForm,
    a2: &SpectralForm,
    rho12: &DensityOperator,
    tol: f64,
) -> Result<PtoReport> {
    let (d1, d2) = rho12.bipartite_dims().ok_or(Error::MissingBipartiteDims)?;
    if a1.dim() != d1 {
        return Err(Error::DimensionMismatch {
            expected: d1,
            found: a1.dim(),
        });
    }
    if a2.dim() != d2 {
        return Err(Error::DimensionMismatch {
            expected: d2,
            found: a2.dim(),
        });
    }

    let split1 = detectable_split(&a1.embed(Subsystem::One, d2), rho12, tolerance::DETECT);
    let split2 = detectable_split(&a2.embed(Subsystem::Two, d1), rho12, tolerance::DETECT);
    let total_probability_1 = 1.0 - split1.probability_deficit();
    let total_probability_2 = 1.0 - split2.probability_deficit();

    let rho1 = partial_trace(rho12, Subsystem::One)?;
    let rho2 = partial_trace(rho12, Subsystem::Two)?;
    let derived_compatibility = (
        commutator_norm(a1.to_operator().matrix(), rho1.matrix())?,
        commutator_norm(a2.to_operator().matrix(), rho2.matrix())?,
    );

    let algebraic_twin_residual = spectral_norm(
        &(embed(a1.to_operator().matrix(), Subsystem::One, d2) * rho12.matrix()
            - embed(a2.to_operator().matrix(), Subsystem::Two, d1) * rho12.matrix()),
    );

    let mut is_pto = true;
    let mut diagnostic = None;
    let mut note = |ok: bool, message: &dyn Fn() -> String| {
        if !ok && is_pto {
            is_pto = false;
            diagnostic = Some(message());
        }
    };

    note(
        split1.probability_deficit() <= tolerance::DISCRETENESS,
        &|| {
            format!(
                "side 1 leaves probability {:.3e} outside its detectable branches",
                split1.probability_deficit()
            )
        },
    );
    note(
        split2.probability_deficit() <= tolerance::DISCRETENESS,
        &|| {
            format!(
                "side 2 leaves probability {:.3e} outside its detectable branches",
                split2.probability_deficit()
            )
        },
    );

    let n1 = split1.detectable.len();
    let n2 = split2.detectable.len();
    let mut pairs = Vec::new();
    if n1 != n2 {
        note(false, &|| {
            format!("sides expose {n1} versus {n2} detectable eigenvalues")
        });
    } else {
        // The defining residuals. Frobenius (cheap, an upper bound on the
        // spectral norm) ranks the candidates; the reported and thresholded
        // values for the chosen pair and its runner-up are spectral.
        let x: Vec<CMatrix> = split1
            .detectable
            .iter()
            .map(|b| b.projector.matrix() * rho12.matrix())
            .collect();
        let y: Vec<CMatrix> = split2
            .detectable
            .iter()
            .map(|b| b.projector.matrix() * rho12.matrix())
            .collect();

        let mut used = vec![false; n2];
        for (i, b1) in split1.detectable.iter().enumerate() {
            let mut ranked: Vec<(usize, f64)> = (0..n2)
                .map(|j| (j, crate::operator::frobenius_norm(&(&x[i] - &y[j]))))
                .collect();
            ranked.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("residuals are finite"));
            let best = ranked[0].0;
            let best_residual = spectral_norm(&(&x[i] - &y[best]));

            let b2 = &split2.detectable[best];
            let p1m = b1.projector.matrix();
            let p2m = b2.projector.matrix();
            let measurement_residual =
                spectral_norm(&(p1m * rho12.matrix() * p1m - p2m * rho12.matrix() * p2m));
            pairs.push(PtoPair {
                eigenvalue_1: b1.eigenvalue,
                eigenvalue_2: b2.eigenvalue,
                probability: b1.probability,
                algebraic_residual: best_residual,
                measurement_residual,
            });

            note(best_residual <= tol, &|| {
                format!(
                    "eigenvalue {} on side 1 has no twin within tolerance (best residual {:.3e})",
                    b1.eigenvalue, best_residual
                )
            });
            if best_residual <= tol && n2 >= 2 {
                let runner_up = spectral_norm(&(&x[i] - &y[ranked[1].0]));
                note(runner_up > tol, &|| {
                    format!(
                        "eigenvalue {} on side 1 matches two eigenvalues on side 2 (residuals {:.3e}, {:.3e})",
                        b1.eigenvalue, best_residual, runner_up
                    )
                });
            }
            note(!used[best], &|| {
                format!(
                    "eigenvalues {} and earlier on side 1 both match eigenvalue {} on side 2",
                    b1.eigenvalue, b2.eigenvalue
                )
            });
            used[best] = true;
        }
    }

    Ok(PtoReport {
        pairs,
        total_probability_1,
        total_probability_2,
        derived_compatibility,
        algebraic_twin_residual,
        is_pto,
        is_algebraic_twin: algebraic_twin_residual <= tol,
        diagnostic,
    })
}

/// Build the mixture `sum_k w_k |phi_k><phi_k|` of pure states sharing the
/// computational basis as their Schmidt bases (`|phi_k> = sum_i sqrt(r_i^k)
/// |e_i>|e_i>`), together with the basis observables that are twins on it by
/// construction. All spectra must have the same number of strictly positive
/// entries `L <= min(d1, d2)`; branch `i` carries eigenvalue `i + 1`, and an
/// eigenvalue-zero branch covers the unused directions.
pub fn common_schmidt_ensemble(
    spectra: &[ProbabilityVector],
    weights: &ProbabilityVector,
    dims: (usize, usize),
) -> Result<(DensityOperator, SpectralForm, SpectralForm)> {
    let (d1, d2) = dims;
    if spectra.is_empty() || weights.len() != spectra.len() {
        return Err(Error::DimensionMismatch {
            expected: spectra.len().max(1),
            found: weights.len(),
        });
    }
    let levels = spectra[0].len();
    if levels == 0 || levels > d1.min(d2) {
        return Err(Error::InvalidInput(format!(
            "need between 1 and min(d1, d2) = {} common levels, got {levels}",
            d1.min(d2)
        )));
    }
    for s in spectra {
        if s.len() != levels {
            return Err(Error::DimensionMismatch {
                expected: levels,
                found: s.len(),
            });
        }
        if s.weights().iter().any(|&r| r <= 0.0) {
            return Err(Error::InvalidProbability {
                reason: "every component spectrum entry must be strictly positive".into(),
            });
        }
    }
    if weights.weights().iter().any(|&w| w <= 0.0) {
        return Err(Error::InvalidProbability {
            reason: "every mixing weight must be strictly positive".into(),
        });
    }

    let dim = d1 * d2;
    let mut m = CMatrix::zeros(dim, dim);
    for (spectrum, &w) in spectra.iter().zip(weights.weights()) {
        let mut phi = CVector::zeros(dim);
        for (i, &r) in spectrum.weights().iter().enumerate() {
            phi[i * d2 + i] = C64::new(r.sqrt(), 0.0);
        }
        m += &phi * phi.adjoint() * C64::new(w, 0.0);
    }
    let rho = DensityOperator::bipartite(m, d1, d2)?;

    let basis_slice = |dim: usize| -> Result<SpectralForm> {
        let basis: Vec<CVector> = (0..levels)
            .map(|i| {
                let mut v = CVector::zeros(dim);
                v[i] = C64::new(1.0, 0.0);
                v
            })
            .collect();
        let labels: Vec<f64> = (1..=levels).map(|k| k as f64).collect();
        twin_side(&basis, &labels, dim)
    };
    Ok((rho, basis_slice(d1)?, basis_slice(d2)?))
}

/// Commutation evidence that correlation, not the reduced states, obstructs
/// a measurement: the observable commutes with its own subsystem's reduced
/// state while its embedding fails to commute with the composite state.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationsIncompatibility {
    /// `||[A, rho_s]||` on the observable's own side.
    pub reduced_residual: f64,
    /// `||[A ⊗ I, rho_12]||` (or the mirror embedding).
    pub composite_residual: f64,
    /// Compatible alone, incompatible together.
    pub holds: bool,
}

/// Check whether `a` (acting on `side`) commutes with its reduced state yet
/// not with the composite state, using `tol` as the compatibility threshold.
/// Requires `a` discrete in relation to the reduced state.
pub fn correlations_incompatibility(
    a: &SpectralForm,
    rho12: &DensityOperator,
    side: Subsystem,
    tol: f64,
) -> Result<CorrelationsIncompatibility> {
    let (d1, d2) = rho12.bipartite_dims().ok_or(Error::MissingBipartiteDims)?;
    let rho_s = partial_trace(rho12, side)?;
    if a.dim() != rho_s.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho_s.dim(),
            found: a.dim(),
        });
    }
    let split = detectable_split(a, &rho_s, tolerance::DETECT);
    let deficit = split.probability_deficit();
    if deficit > tolerance::DISCRETENESS {
        return Err(Error::NotDiscrete { deficit });
    }
    let reduced_residual = commutator_norm(a.to_operator().matrix(), rho_s.matrix())?;
    let other_dim = match side {
        Subsystem::One => d2,
        Subsystem::Two => d1,
    };
    let embedded = embed(a.to_operator().matrix(), side, other_dim);
    let composite_residual = commutator_norm(&embedded, rho12.matrix())?;
    Ok(CorrelationsIncompatibility {
        reduced_residual,
        composite_residual,
        holds: reduced_residual <= tol && composite_residual > tol,
    })
}

/// Why the quasi-classical/discord split of a ledger is absent.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum DiscordWithheld {
    /// The observables are not physical twins on the state.
    NotTwins { diagnostic: String },
    /// They are twins, but some measurement component is mixed, so the
    /// quasi-classical reading of the measurement entropy is unjustified.
    IncompleteTwins {
        side1_complete: bool,
        side2_complete: bool,
    },
}

/// The mutual-information ledger of a twin measurement.
///
/// Always present: the mutual information, the coherence entropy of the
/// (side-1) measurement, and the mutual information surviving in the
/// measured state. These satisfy `mutual = coherence + luders` exactly when
/// the observable commutes with its own reduced state — a condition twins
/// always meet (their compatibility is derived, see
/// [`PtoReport::derived_compatibility`]), and the interesting non-twin case,
/// an observable obstructed only by correlations, meets by definition. The
/// remaining fields need twins (`observable`, `residual`) or complete twins
/// (`quasi_classical`, `discord`); when absent, `withheld` says why.
#[derive(Debug, Clone, Serialize)]
pub struct DiscordLedger {
    /// `I(rho_12) = S(rho_1) + S(rho_2) - S(rho_12)`.
    pub mutual_information: f64,
    /// Coherence entropy of the embedded side-1 observable.
    pub coherence_entropy: f64,
    /// Mutual information of the measured (dephased) state.
    pub luders_information: f64,
    /// Shannon entropy of the twin measurement statistics.
    pub observable_entropy: Option<f64>,
    /// `sum_i p_i I(component_i)` — information inside the components.
    pub residual_information: Option<f64>,
    /// The classically extractable part; equals `observable_entropy` for
    /// complete twins.
    pub quasi_classical_information: Option<f64>,
    /// `mutual - quasi_classical`: what no classical record of the twin
    /// measurement can capture.
    pub discord: Option<f64>,
    /// Largest discrepancy between side-1 and side-2 evaluations of the
    /// shared quantities (twins only).
    pub side_asymmetry: Option<f64>,
    pub withheld: Option<DiscordWithheld>,
}

impl DiscordLedger {
    /// `|mutual - coherence - luders|` — zero in exact arithmetic.
    pub fn coherence_identity_defect(&self) -> f64 {
        (self.mutual_information - self.coherence_entropy - self.luders_information).abs()
    }

    /// `|mutual - observable - coherence - residual|` for twins — zero in
    /// exact arithmetic; `None` before the twin fields exist.
    pub fn decomposition_defect(&self) -> Option<f64> {
        let observable = self.observable_entropy?;
        let residual = self.residual_information?;
        Some(
            (self.mutual_information - observable - self.coherence_entropy - residual).abs(),
        )
    }
}

/// Everything [`discord_decomposition`] establishes about one
/// (state, observable pair) triple.
#[derive(Debug, Clone, Serialize)]
pub struct DiscordAnalysis {
    pub pto: PtoReport,
    pub ledger: DiscordLedger,
}

struct SideQuantities {
    observable_entropy: f64,
    coherence_entropy: f64,
    luders_information: f64,
    residual_information: f64,
}

fn side_quantities(
    split: &DetectableSplit,
    rho12: &DensityOperator,
    state_entropy: f64,
) -> Result<SideQuantities> {
    let observable_entropy = shannon_raw(split.detectable.iter().map(|b| b.probability));
    let projectors: Vec<Projector> = split
        .detectable
        .iter()
        .map(|b| b.projector.clone())
        .collect();
    let luders = luders_state(rho12, &projectors)?;
    let coherence_entropy = von_neumann_entropy(&luders) - state_entropy;
    let luders_information = mutual_information(&luders)?;
    let mut residual_information = 0.0;
    for b in &split.detectable {
        let component = DensityOperator::trusted(
            b.projector.matrix() * rho12.matrix() * b.projector.matrix(),
            rho12.bipartite_dims(),
        );
        residual_information += b.probability * mutual_information(&component)?;
    }
    Ok(SideQuantities {
        observable_entropy,
        coherence_entropy,
        luders_information,
        residual_information,
    })
}

/// Split the mutual information of `rho12` along the twin measurement
/// `(a1, a2)`.
///
/// The side-1 observable must be discrete in relation to the state (that
/// grounds the always-present ledger entries); beyond that, failure to be
/// twins or to be complete withholds ledger entries rather than erroring.
/// The discord is reported as `mutual - observable_entropy`, so its
/// agreement with the coherence entropy is a checkable consequence, not a
/// definition.
pub fn discord_decomposition(
    rho12: &DensityOperator,
    a1: &SpectralForm,
    a2: &SpectralForm,
    tol: f64,
) -> Result<DiscordAnalysis> {
    let pto = verify_pto(a1, a2, rho12, tol)?;
    let (d1, d2) = rho12.bipartite_dims().expect("checked by verify_pto");

    let mutual = mutual_information(rho12)?;
    let state_entropy = von_neumann_entropy(rho12);
    let split1 = detectable_split(&a1.embed(Subsystem::One, d2), rho12, tolerance::DETECT);
    let deficit = split1.probability_deficit();
    if deficit > tolerance::DISCRETENESS {
        return Err(Error::NotDiscrete { deficit });
    }
    let q1 = side_quantities(&split1, rho12, state_entropy)?;

    let mut ledger = DiscordLedger {
        mutual_information: mutual,
        coherence_entropy: q1.coherence_entropy,
        luders_information: q1.luders_information,
        observable_entropy: None,
        residual_information: None,
        quasi_classical_information: None,
        discord: None,
        side_asymmetry: None,
        withheld: None,
    };

    if !pto.is_pto {
        ledger.withheld = Some(DiscordWithheld::NotTwins {
            diagnostic: pto
                .diagnostic
                .clone()
                .unwrap_or_else(|| "twin check failed".into()),
        });
        return Ok(DiscordAnalysis { pto, ledger });
    }

    let split2 = detectable_split(&a2.embed(Subsystem::Two, d1), rho12, tolerance::DETECT);
    let q2 = side_quantities(&split2, rho12, state_entropy)?;
    ledger.observable_entropy = Some(q1.observable_entropy);
    ledger.residual_information = Some(q1.residual_information);
    ledger.side_asymmetry = Some(
        [
            q1.observable_entropy - q2.observable_entropy,
            q1.coherence_entropy - q2.coherence_entropy,
            q1.luders_information - q2.luders_information,
            q1.residual_information - q2.residual_information,
        ]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max),
    );

    let side1_complete = is_complete(a1, &partial_trace(rho12, Subsystem::One)?);
    let side2_complete = is_complete(a2, &partial_trace(rho12, Subsystem::Two)?);
    if side1_complete && side2_complete {
        ledger.quasi_classical_information = Some(q1.observable_entropy);
        ledger.discord = Some(mutual - q1.observable_entropy);
    } else {
        ledger.withheld = Some(DiscordWithheld::IncompleteTwins {
            side1_complete,
            side2_complete,
        });
    }

    Ok(DiscordAnalysis { pto, ledger })
}

/// Both sides of the mixing identity for biorthogonal decompositions: for
/// components confined to mutually orthogonal blocks on *both* subsystems,
/// mutual information mixes additively,
/// `I(sum_k w_k rho_k) = H(w) + sum_k w_k I(rho_k)`.
///
/// `p1_set[k]` and `q2_set[k]` are the subsystem blocks supporting component
/// `k`; each set must be pairwise orthogonal, and every component must
/// satisfy `rho_k = (P1_k ⊗ I) rho_k (I ⊗ Q2_k)` up to `tol` (otherwise
/// [`Error::NotBiorthogonal`]). Returns `(lhs, rhs)` of the identity.
pub fn biorthogonal_mixture_info(
    components: &[(f64, DensityOperator)],
    p1_set: &[Projector],
    q2_set: &[Projector],
    tol: f64,
) -> Result<(f64, f64)> {
    if components.is_empty() {
        return Err(Error::InvalidInput("no components given".into()));
    }
    if p1_set.len() != components.len() || q2_set.len() != components.len() {
        return Err(Error::DimensionMismatch {
            expected: components.len(),
            found: p1_set.len().min(q2_set.len()),
        });
    }
    let (d1, d2) = components[0]
        .1
        .bipartite_dims()
        .ok_or(Error::MissingBipartiteDims)?;
    for (_, rho) in components {
        if rho.bipartite_dims() != Some((d1, d2)) {
            return Err(Error::DimensionMismatch {
                expected: d1 * d2,
                found: rho.dim(),
            });
        }
    }
    let weights: Vec<f64> = components.iter().map(|(w, _)| *w).collect();
    if weights.iter().any(|&w| w <= 0.0 || !w.is_finite()) {
        return Err(Error::InvalidProbability {
            reason: "mixing weights must be strictly positive".into(),
        });
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidProbability {
            reason: format!("mixing weights sum to {total}, not 1"),
        });
    }
    for (set, dim) in [(p1_set, d1), (q2_set, d2)] {
        for (i, p) in set.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            for q in &set[i + 1..] {
                let overlap = crate::operator::frobenius_norm(&(p.matrix() * q.matrix()));
                if overlap > tolerance::GENERAL {
                    return Err(Error::NotOrthogonal { overlap });
                }
            }
        }
    }
    let mut worst = 0.0_f64;
    for (k, (_, rho)) in components.iter().enumerate() {
        let left = p1_set[k].embed(Subsystem::One, d2);
        let right = q2_set[k].embed(Subsystem::Two, d1);
        let projected = left.matrix() * rho.matrix() * right.matrix();
        worst = worst.max(spectral_norm(&(rho.matrix() - projected)));
    }
    if worst > tol {
        return Err(Error::NotBiorthogonal { residual: worst });
    }

    let dim = d1 * d2;
    let mut mixture = CMatrix::zeros(dim, dim);
    let mut rhs = shannon_raw(weights.iter().copied());
    for (w, rho) in components {
        mixture += rho.matrix() * C64::new(*w, 0.0);
        rhs += w * mutual_information(rho)?;
    }
    let lhs = mutual_information(&DensityOperator::trusted(mixture, Some((d1, d2))))?;
    Ok((lhs, rhs))
}

/// Joint outcome statistics of measuring one observable on each subsystem.
#[derive(Debug, Clone, Serialize)]
pub struct JointDistribution {
    pub eigenvalues_1: Vec<f64>,
    pub eigenvalues_2: Vec<f64>,
    /// `p[i][j] = tr(rho (P1_i ⊗ P2_j))` over the detectable branches.
    pub matrix: Vec<Vec<f64>>,
    pub marginal_1: Vec<f64>,
    pub marginal_2: Vec<f64>,
    /// Shannon mutual information of the table. For twins the table is
    /// diagonal and this equals the full entropy of either marginal.
    pub classical_mutual_information: f64,
}

/// Tabulate the joint distribution of the detectable outcomes of `a1` and
/// `a2` measured on the two subsystems of `rho12`.
pub fn joint_measurement_distribution(
    a1: &SpectralForm,
    a2: &SpectralForm,
    rho12: &DensityOperator,
) -> Result<JointDistribution> {
    let (d1, d2) = rho12.bipartite_dims().ok_or(Error::MissingBipartiteDims)?;
    if a1.dim() != d1 {
        return Err(Error::DimensionMismatch {
            expected: d1,
            found: a1.dim(),
        });
    }
    if a2.dim() != d2 {
        return Err(Error::DimensionMismatch {
            expected: d2,
            found: a2.dim(),
        });
    }
    let rho1 = partial_trace(rho12, Subsystem::One)?;
    let rho2 = partial_trace(rho12, Subsystem::Two)?;
    let split1 = detectable_split(a1, &rho1, tolerance::DETECT);
    let split2 = detectable_split(a2, &rho2, tolerance::DETECT);

    let mut matrix = Vec::with_capacity(split1.detectable.len());
    for b1 in &split1.detectable {
        let mut row = Vec::with_capacity(split2.detectable.len());
        for b2 in &split2.detectable {
            let joint = tensor_product(b1.projector.matrix(), b2.projector.matrix());
            let p = (rho12.matrix() * joint).trace().re.max(0.0);
            row.push(p);
        }
        matrix.push(row);
    }
    let marginal_1: Vec<f64> = matrix.iter().map(|row| row.iter().sum()).collect();
    let marginal_2: Vec<f64> = (0..split2.detectable.len())
        .map(|j| matrix.iter().map(|row| row[j]).sum())
        .collect();
    let classical_mutual_information = shannon_raw(marginal_1.iter().copied())
        + shannon_raw(marginal_2.iter().copied())
        - shannon_raw(matrix.iter().flatten().copied());

    Ok(JointDistribution {
        eigenvalues_1: split1.detectable.iter().map(|b| b.eigenvalue).collect(),
        eigenvalues_2: split2.detectable.iter().map(|b| b.eigenvalue).collect(),
        matrix,
        marginal_1,
        marginal_2,
        classical_mutual_information,
    })
}

#[cfg(test)]
// Index arithmetic like `0 * 3 + 0` is kept literal to show the row-major
// (row, column) structure of composite-space indices.
#[allow(clippy::identity_op, clippy::erasing_op)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn bell_phi_plus() -> CVector {
        let inv = 1.0 / 2.0_f64.sqrt();
        CVector::from_vec(vec![c(inv, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(inv, 0.0)])
    }

    const TWO_LN_2: f64 = 1.386_294_361_119_890_6;
    const H_07: f64 = 0.610_864_302_054_893_5;

    #[test]
    fn schmidt_of_bell_state() {
        let schmidt = schmidt_decompose(&bell_phi_plus(), (2, 2), tolerance::SCHMIDT).unwrap();
        assert_eq!(schmidt.rank(), 2);
        let inv = 1.0 / 2.0_f64.sqrt();
        for &coefficient in schmidt.coefficients() {
            assert!((coefficient - inv).abs() < 1e-12);
        }
        let defect = (schmidt.reconstruct() - bell_phi_plus()).norm();
        assert!(defect < 1e-12, "reconstruction defect {defect}");
        for basis in [schmidt.left_basis(), schmidt.right_basis()] {
            for (i, u) in basis.iter().enumerate() {
                assert!((u.norm() - 1.0).abs() < 1e-12);
                for v in &basis[i + 1..] {
                    assert!(u.dotc(v).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn schmidt_of_product_state_has_rank_one() {
        // |+> ⊗ |1>
        let inv = 1.0 / 2.0_f64.sqrt();
        let phi = CVector::from_vec(vec![c(0.0, 0.0), c(inv, 0.0), c(0.0, 0.0), c(inv, 0.0)]);
        let schmidt = schmidt_decompose(&phi, (2, 2), tolerance::SCHMIDT).unwrap();
        assert_eq!(schmidt.rank(), 1);
        assert!((schmidt.coefficients()[0] - 1.0).abs() < 1e-12);
        assert!((schmidt.reconstruct() - phi).norm() < 1e-12);
    }

    #[test]
    fn schmidt_handles_unequal_dimensions_and_complex_phases() {
        // rank-2 vector in 2 x 3 with a complex phase on the second term
        let a = 0.8_f64;
        let b = 0.6_f64;
        let mut phi = CVector::zeros(6);
        phi[0 * 3 + 0] = c(a, 0.0);
        phi[1 * 3 + 2] = c(0.0, b);
        let schmidt = schmidt_decompose(&phi, (2, 3), tolerance::SCHMIDT).unwrap();
        assert_eq!(schmidt.rank(), 2);
        assert!((schmidt.coefficients()[0] - a).abs() < 1e-12);
        assert!((schmidt.coefficients()[1] - b).abs() < 1e-12);
        assert!((schmidt.reconstruct() - phi).norm() < 1e-12);
    }

    #[test]
    fn schmidt_rejects_unnormalized_vectors() {
        let phi = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            schmidt_decompose(&phi, (2, 2), tolerance::SCHMIDT),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn bell_twins_verify_as_physical_and_algebraic_twins() {
        let rho = DensityOperator::bipartite_from_pure(&bell_phi_plus(), 2, 2).unwrap();
        let (a1, a2) = pure_state_twins(&bell_phi_plus(), (2, 2)).unwrap();
        let report = verify_pto(&a1, &a2, &rho, tolerance::GENERAL).unwrap();
        assert!(report.is_pto, "diagnostic: {:?}", report.diagnostic);
        assert!(report.is_algebraic_twin);
        assert_eq!(report.pairs.len(), 2);
        for pair in &report.pairs {
            assert!((pair.probability - 0.5).abs() < 1e-12);
            assert!(pair.algebraic_residual < 1e-12);
            assert!(pair.measurement_residual < 1e-12);
        }
        assert!(report.derived_compatibility.0 < 1e-12);
        assert!(report.derived_compatibility.1 < 1e-12);
    }

    #[test]
    fn rank_deficient_twins_get_zero_branches() {
        let a = 0.8_f64;
        let b = 0.6_f64;
        let mut phi = CVector::zeros(6);
        phi[0] = c(a, 0.0);
        phi[1 * 3 + 1] = c(b, 0.0);
        let (a1, a2) = pure_state_twins(&phi, (2, 3)).unwrap();
        assert_eq!(a1.branches().len(), 2); // rank 2 fills side 1
        assert_eq!(a2.branches().len(), 3); // side 2 needs the zero branch
        assert!(a2.branches().iter().any(|br| br.eigenvalue == 0.0));
        let rho = DensityOperator::bipartite_from_pure(&phi, 2, 3).unwrap();
        let report = verify_pto(&a1, &a2, &rho, tolerance::GENERAL).unwrap();
        assert!(report.is_pto, "diagnostic: {:?}", report.diagnostic);
        assert_eq!(report.pairs.len(), 2);
    }

    #[test]
    fn labeled_twins_validate_their_labels() {
        let phi = bell_phi_plus();
        assert!(pure_state_twins_labeled(&phi, (2, 2), &[5.0, -3.0]).is_ok());
        assert!(matches!(
            pure_state_twins_labeled(&phi, (2, 2), &[5.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            pure_state_twins_labeled(&phi, (2, 2), &[5.0, 5.0]),
            Err(Error::DuplicateEigenvalues)
        ));
        assert!(matches!(
            pure_state_twins_labeled(&phi, (2, 2), &[5.0, 0.0]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn mismatched_bases_are_not_twins() {
        let rho = DensityOperator::bipartite_from_pure(&bell_phi_plus(), 2, 2).unwrap();
        let (a1, _) = pure_state_twins(&bell_phi_plus(), (2, 2)).unwrap();
        // side 2 measured in the Hadamard basis instead of its twin basis
        let inv = 1.0 / 2.0_f64.sqrt();
        let plus = CVector::from_vec(vec![c(inv, 0.0), c(inv, 0.0)]);
        let minus = CVector::from_vec(vec![c(inv, 0.0), c(-inv, 0.0)]);
        let bad = SpectralForm::new(
            vec![
                SpectralBranch {
                    eigenvalue: 1.0,
                    projector: Projector::from_orthonormal_basis(&[plus]).unwrap(),
                },
                SpectralBranch {
                    eigenvalue: 2.0,
                    projector: Projector::from_orthonormal_basis(&[minus]).unwrap(),
                },
            ],
            None,
        )
        .unwrap();
        let report = verify_pto(&a1, &bad, &rho, tolerance::GENERAL).unwrap();
        assert!(!report.is_pto);
        assert!(report.diagnostic.is_some());
    }

    #[test]
    fn isotropic_noise_destroys_twins() {
        // 0.8 |bell><bell| + 0.2 I/4: the noise acts on each side separately,
        // so the branch actions differ by (0.2 / 4) ||P ⊗ I - I ⊗ P|| = 0.05.
        let bell = DensityOperator::bipartite_from_pure(&bell_phi_plus(), 2, 2).unwrap();
        let m = bell.matrix() * c(0.8, 0.0) + CMatrix::identity(4, 4) * c(0.05, 0.0);
        let rho = DensityOperator::bipartite(m, 2, 2).unwrap();
        let (a1, a2) = pure_state_twins(&bell_phi_plus(), (2, 2)).unwrap();
        let report = verify_pto(&a1, &a2, &rho, tolerance::GENERAL).unwrap();
        assert!(!report.is_pto);
        let worst = report
            .pairs
            .iter()
            .map(|p| p.algebraic_residual)
            .fold(0.0, f64::max);
        assert!((worst - 0.05).abs() < 1e-10, "worst residual {worst}");
    }

    #[test]
    fn shared_basis_mixture_is_a_complete_twin_pair_with_discord_equal_to_coherence() {
        let spectra = vec![
            ProbabilityVector::new(vec![0.7, 0.3]).unwrap(),
            ProbabilityVector::new(vec![0.5, 0.5]).unwrap(),
        ];
        let weights = ProbabilityVector::new(vec![0.6, 0.4]).unwrap();
        let (rho, a1, a2) = common_schmidt_ensemble(&spectra, &weights, (2, 2)).unwrap();
        let analysis = discord_decomposition(&rho, &a1, &a2, tolerance::GENERAL).unwrap();
        assert!(analysis.pto.is_pto, "diagnostic: {:?}", analysis.pto.diagnostic);
        let ledger = &analysis.ledger;
        assert!(ledger.withheld.is_none());
        assert!(ledger.coherence_identity_defect() < 1e-10);
        assert!(ledger.decomposition_defect().unwrap() < 1e-10);
        assert!(ledger.residual_information.unwrap() < 1e-10);
        let discord = ledger.discord.unwrap();
        assert!((discord - ledger.coherence_entropy).abs() < 1e-10);
        assert!(ledger.side_asymmetry.unwrap() < 1e-10);
        // the measured statistics mix the two spectra
        let p0: f64 = 0.6 * 0.7 + 0.4 * 0.5;
        let expected = -(p0 * p0.ln() + (1.0 - p0) * (1.0 - p0).ln());
        assert!((ledger.observable_entropy.unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn product_state_ledger_is_all_zero() {
        let rho1 = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.7, 0.0), c(0.3, 0.0)]));
        let rho2 = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.6, 0.0), c(0.4, 0.0)]));
        let rho = DensityOperator::bipartite(tensor_product(&rho1, &rho2), 2, 2).unwrap();
        let basis: Vec<CVector> = (0..2)
            .map(|i| {
                let mut v = CVector::zeros(2);
                v[i] = c(1.0, 0.0);
                v
            })
            .collect();
        let a1 = super::twin_side(&basis, &[1.0, 2.0], 2).unwrap();
        let analysis = discord_decomposition(&rho, &a1.clone(), &a1, tolerance::GENERAL).unwrap();
        let ledger = &analysis.ledger;
        assert!(ledger.mutual_information.abs() < 1e-10);
        assert!(ledger.coherence_entropy.abs() < 1e-10);
        assert!(ledger.luders_information.abs() < 1e-10);
        if let Some(d) = ledger.discord {
            assert!(d.abs() < 1e-10);
        }
    }

    #[test]
    fn bell_ledger_splits_two_bits_into_entropy_and_discord() {
        let rho = DensityOperator::bipartite_from_pure(&bell_phi_plus(), 2, 2).unwrap();
        let (a1, a2) = pure_state_twins(&bell_phi_plus(), (2, 2)).unwrap();
        let analysis = discord_decomposition(&rho, &a1, &a2, tolerance::GENERAL).unwrap();
        let ledger = &analysis.ledger;
        assert!((ledger.mutual_information - TWO_LN_2).abs() < 1e-10);
        assert!((ledger.observable_entropy.unwrap() - TWO_LN_2 / 2.0).abs() < 1e-10);
        assert!((ledger.coherence_entropy - TWO_LN_2 / 2.0).abs() < 1e-10);
        assert!((ledger.discord.unwrap() - TWO_LN_2 / 2.0).abs() < 1e-10);
        assert!((ledger.luders_information - TWO_LN_2 / 2.0).abs() < 1e-10);
        assert!(ledger.residual_information.unwrap() < 1e-10);
    }

    #[test]
    fn biorthogonal_blocks_mix_additively() {
        // d = 3 on both sides; component 1 is a Bell pair on {e0, e1}, the
        // component 2 is the pure product |e2 e2>.
        let inv = 1.0 / 2.0_f64.sqrt();
        let mut bell = CVector::zeros(9);
        bell[0 * 3 + 0] = c(inv, 0.0);
        bell[1 * 3 + 1] = c(inv, 0.0);
        let comp1 = DensityOperator::bipartite_from_pure(&bell, 3, 3).unwrap();
        let mut product = CVector::zeros(9);
        product[2 * 3 + 2] = c(1.0, 0.0);
        let comp2 = DensityOperator::bipartite_from_pure(&product, 3, 3).unwrap();

        let block01 = Projector::new(CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
        ])))
        .unwrap();
        let block2 = block01.complement();

        let (lhs, rhs) = biorthogonal_mixture_info(
            &[(0.7, comp1), (0.3, comp2)],
            &[block01.clone(), block2.clone()],
            &[block01, block2],
            tolerance::GENERAL,
        )
        .unwrap();
        assert!((lhs - rhs).abs() < 1e-10, "lhs {lhs} rhs {rhs}");
        let expected = H_07 + 0.7 * TWO_LN_2;
        assert!((lhs - expected).abs() < 1e-10, "lhs {lhs}");
    }

    #[test]
    fn biorthogonality_violations_are_rejected() {
        let rho = DensityOperator::bipartite_from_pure(&bell_phi_plus(), 2, 2).unwrap();
        let p0 = Projector::new(CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(1.0, 0.0),
            c(0.0, 0.0),
        ])))
        .unwrap();
        // a Bell pair is not confined to |e0> on either side
        assert!(matches!(
            biorthogonal_mixture_info(
                &[(1.0, rho)],
                std::slice::from_ref(&p0),
                std::slice::from_ref(&p0),
                tolerance::GENERAL
            ),
            Err(Error::NotBiorthogonal { .. })
        ));
    }

    #[test]
    fn twin_joint_distribution_is_diagonal() {
        let spectra = vec![
            ProbabilityVector::new(vec![0.7, 0.2, 0.1]).unwrap(),
            ProbabilityVector::new(vec![0.4, 0.35, 0.25]).unwrap(),
        ];
        let weights = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        let (rho, a1, a2) = common_schmidt_ensemble(&spectra, &weights, (3, 3)).unwrap();
        let joint = joint_measurement_distribution(&a1, &a2, &rho).unwrap();
        assert_eq!(joint.matrix.len(), 3);
        for (i, row) in joint.matrix.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                if i != j {
                    assert!(p < 1e-12, "off-diagonal weight {p} at ({i}, {j})");
                }
            }
        }
        let h = shannon_raw(joint.marginal_1.iter().copied());
        assert!((joint.classical_mutual_information - h).abs() < 1e-10);
    }

    #[test]
    fn correlation_obstruction_requires_entanglement() {
        // Mixed entangled state whose reduced state is maximally mixed: any
        // observable commutes on the subsystem, but not with the composite.
        let bell = DensityOperator::bipartite_from_pure(&bell_phi_plus(), 2, 2).unwrap();
        let m = bell.matrix() * c(0.8, 0.0) + CMatrix::identity(4, 4) * c(0.05, 0.0);
        let rho = DensityOperator::bipartite(m, 2, 2).unwrap();
        let z = SpectralForm::new(
            vec![
                SpectralBranch {
                    eigenvalue: 1.0,
                    projector: Projector::new(CMatrix::from_diagonal(
                        &CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]),
                    ))
                    .unwrap(),
                },
                SpectralBranch {
                    eigenvalue: -1.0,
                    projector: Projector::new(CMatrix::from_diagonal(
                        &CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]),
                    ))
                    .unwrap(),
                },
            ],
            None,
        )
        .unwrap();
        let check =
            correlations_incompatibility(&z, &rho, Subsystem::One, tolerance::GENERAL).unwrap();
        assert!(check.holds, "reduced {} composite {}", check.reduced_residual, check.composite_residual);

        // on a product state the composite commutator vanishes too
        let product = DensityOperator::bipartite(
            tensor_product(
                &CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.5, 0.0), c(0.5, 0.0)])),
                &CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.6, 0.0), c(0.4, 0.0)])),
            ),
            2,
            2,
        )
        .unwrap();
        let check =
            correlations_incompatibility(&z, &product, Subsystem::One, tolerance::GENERAL)
                .unwrap();
        assert!(!check.holds);
    }
}
