//! How an observable's spectral branches relate to a given state:
//! detectability, commuting (strong) versus non-commuting (weak) branches,
//! the refinement partial order, and completeness.
//!
//! Everything here is relative to a state. An eigenvalue that carries no
//! probability in `rho` is invisible to every analysis of `(A, rho)`; a
//! branch that commutes with `rho` contributes nothing to the coherence
//! entropy; an observable that is finer than another splits the same
//! statistics into more detail. Those three classifications are exactly what
//! the entropy identities in [`crate::entropy`] and [`crate::twins`] need.

use serde::Serialize;

use crate::entropy::{coherence_entropy, entropy_balance, luders_state};
use crate::error::{Error, Result};
use crate::operator::{
    commutator_norm, default_comm_tol, frobenius_norm, is_certain_event, spectral_norm,
    CertaintyReport, CMatrix, DensityOperator, Projector, SpectralBranch, SpectralForm,
};
use crate::tolerance;

/// A branch with non-zero probability in the reference state.
#[derive(Debug, Clone)]
pub struct DetectableBranch {
    pub eigenvalue: f64,
    pub projector: Projector,
    pub probability: f64,
}

/// A branch the reference state never populates.
#[derive(Debug, Clone)]
pub struct UndetectableBranch {
    pub eigenvalue: f64,
    pub projector: Projector,
}

/// The branches of a spectral form split by detectability in a state.
#[derive(Debug, Clone)]
pub struct DetectableSplit {
    pub detectable: Vec<DetectableBranch>,
    pub undetectable: Vec<UndetectableBranch>,
    /// Sum of the detectable projectors.
    pub certain_projector: Projector,
}

impl DetectableSplit {
    /// `1 - sum of detectable probabilities`: zero (up to roundoff) exactly
    /// when the observable is discrete in relation to the state.
    pub fn probability_deficit(&self) -> f64 {
        1.0 - self.detectable.iter().map(|b| b.probability).sum::<f64>()
    }
}

/// Split the branches of `a` by probability in `rho`: above `detect_tol`
/// counts as detectable.
pub fn detectable_split(
    a: &SpectralForm,
    rho: &DensityOperator,
    detect_tol: f64,
) -> DetectableSplit {
    assert_eq!(
        a.dim(),
        rho.dim(),
        "observable and state dimensions must match"
    );
    let mut detectable = Vec::new();
    let mut undetectable = Vec::new();
    let mut sum = CMatrix::zeros(a.dim(), a.dim());
    let mut rank = 0;
    for b in a.branches() {
        let probability = b.projector.probability(rho);
        if probability > detect_tol {
            sum += b.projector.matrix();
            rank += b.projector.rank();
            detectable.push(DetectableBranch {
                eigenvalue: b.eigenvalue,
                projector: b.projector.clone(),
                probability,
            });
        } else {
            undetectable.push(UndetectableBranch {
                eigenvalue: b.eigenvalue,
                projector: b.projector.clone(),
            });
        }
    }
    DetectableSplit {
        detectable,
        undetectable,
        certain_projector: Projector::trusted(sum, rank),
    }
}

/// Is the branch family certain on `rho` as a whole — i.e. is the observable
/// discrete in relation to the state? Evaluates all three certainty criteria
/// for the summed projector. Branches must be mutually orthogonal.
pub fn validate_relative_discreteness(
    branches: &[SpectralBranch],
    rho: &DensityOperator,
) -> Result<CertaintyReport> {
    if branches.is_empty() {
        return Err(Error::InvalidInput("no branches given".into()));
    }
    let dim = rho.dim();
    let mut sum = CMatrix::zeros(dim, dim);
    let mut rank = 0;
    for (i, b) in branches.iter().enumerate() {
        if b.projector.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: b.projector.dim(),
            });
        }
        for other in branches.iter().skip(i + 1) {
            let overlap = frobenius_norm(&(b.projector.matrix() * other.projector.matrix()));
            if overlap > tolerance::GENERAL {
                return Err(Error::NotOrthogonal { overlap });
            }
        }
        sum += b.projector.matrix();
        rank += b.projector.rank();
    }
    let p = Projector::trusted(sum, rank);
    Ok(is_certain_event(&p, rho, tolerance::DISCRETENESS))
}

fn require_discrete(a: &SpectralForm, rho: &DensityOperator) -> Result<DetectableSplit> {
    let split = detectable_split(a, rho, tolerance::DETECT);
    let deficit = split.probability_deficit();
    if deficit > tolerance::DISCRETENESS {
        return Err(Error::NotDiscrete { deficit });
    }
    Ok(split)
}

/// Overall commutation character of the detectable branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Every detectable branch commutes with the state.
    Strong,
    /// No detectable branch commutes with the state.
    Weak,
    /// Some do, some don't.
    Intermediary,
}

/// A detectable branch that does not commute with the state.
#[derive(Debug, Clone)]
pub struct WeakBranch {
    pub eigenvalue: f64,
    pub projector: Projector,
    pub probability: f64,
    pub commutation_residual: f64,
}

/// A detectable branch commuting with the state, together with its
/// (automatically Hermitian) normalized component `P rho / p = P rho P / p`.
#[derive(Debug, Clone)]
pub struct StrongBranch {
    pub eigenvalue: f64,
    pub projector: Projector,
    pub probability: f64,
    pub commutation_residual: f64,
    pub component_state: DensityOperator,
}

/// The orthogonal decomposition `rho = p_w rho_w + (1 - p_w) rho_st` induced
/// by splitting detectable branches into weak and strong.
#[derive(Debug, Clone)]
pub struct WeakStrongDecomposition {
    pub weak: Vec<WeakBranch>,
    pub strong: Vec<StrongBranch>,
    pub undetectable: Vec<UndetectableBranch>,
    /// Total probability of the weak branches.
    pub weak_probability: f64,
    /// `P_w rho P_w / p_w`; absent when there are no weak branches.
    pub weak_state: Option<DensityOperator>,
    /// The reweighted mixture of the strong components; absent when there are
    /// no strong branches.
    pub strong_state: Option<DensityOperator>,
    pub regime: Regime,
}

impl WeakStrongDecomposition {
    /// The weak branches as an observable in their own right (restricted
    /// spectral form, no remainder).
    pub fn weak_observable(&self) -> Option<SpectralForm> {
        if self.weak.is_empty() {
            return None;
        }
        let branches = self
            .weak
            .iter()
            .map(|w| SpectralBranch {
                eigenvalue: w.eigenvalue,
                projector: w.projector.clone(),
            })
            .collect();
        Some(SpectralForm::new(branches, None).expect("weak branches form a valid spectral form"))
    }

    /// Spectral-norm error of `rho = p_w rho_w + (1 - p_w) rho_st` — zero up
    /// to roundoff whenever the strong branches truly commute.
    pub fn reconstruction_defect(&self, rho: &DensityOperator) -> f64 {
        let dim = rho.dim();
        let mut m = CMatrix::zeros(dim, dim);
        if let Some(w) = &self.weak_state {
            m += w.matrix() * crate::operator::C64::new(self.weak_probability, 0.0);
        }
        if let Some(s) = &self.strong_state {
            m += s.matrix() * crate::operator::C64::new(1.0 - self.weak_probability, 0.0);
        }
        spectral_norm(&(rho.matrix() - m))
    }
}

/// Classify the detectable branches of `a` by whether they commute with
/// `rho` (residual at most `comm_tol`) and assemble the induced orthogonal
/// state decomposition. Requires `a` discrete in relation to `rho`.
pub fn weak_strong_decompose(
    a: &SpectralForm,
    rho: &DensityOperator,
    comm_tol: f64,
) -> Result<WeakStrongDecomposition> {
    let split = require_discrete(a, rho)?;

    let mut weak = Vec::new();
    let mut strong = Vec::new();
    for b in split.detectable {
        let residual = commutator_norm(b.projector.matrix(), rho.matrix())?;
        if residual <= comm_tol {
            let m = b.projector.matrix() * rho.matrix() * b.projector.matrix();
            strong.push(StrongBranch {
                eigenvalue: b.eigenvalue,
                projector: b.projector,
                probability: b.probability,
                commutation_residual: residual,
                component_state: DensityOperator::trusted(m, rho.bipartite_dims()),
            });
        } else {
            weak.push(WeakBranch {
                eigenvalue: b.eigenvalue,
                projector: b.projector,
                probability: b.probability,
                commutation_residual: residual,
            });
        }
    }

    let weak_probability: f64 = weak.iter().map(|w| w.probability).sum();
    let weak_state = if weak.is_empty() {
        None
    } else {
        let mut pw = CMatrix::zeros(rho.dim(), rho.dim());
        let mut rank = 0;
        for w in &weak {
            pw += w.projector.matrix();
            rank += w.projector.rank();
        }
        let pw = Projector::trusted(pw, rank);
        Some(DensityOperator::trusted(
            pw.matrix() * rho.matrix() * pw.matrix(),
            rho.bipartite_dims(),
        ))
    };
    let strong_state = if strong.is_empty() {
        None
    } else {
        let mut m = CMatrix::zeros(rho.dim(), rho.dim());
        for s in &strong {
            m += s.projector.matrix() * rho.matrix() * s.projector.matrix();
        }
        Some(DensityOperator::trusted(m, rho.bipartite_dims()))
    };
    let regime = match (weak.is_empty(), strong.is_empty()) {
        (true, _) => Regime::Strong,
        (false, true) => Regime::Weak,
        (false, false) => Regime::Intermediary,
    };

    Ok(WeakStrongDecomposition {
        weak,
        strong,
        undetectable: split.undetectable,
        weak_probability,
        weak_state,
        strong_state,
        regime,
    })
}

/// Both sides of the reduction of coherence entropy to the weak part:
/// `E_C(A, rho)` and `p_w * E_C(A_w, rho_w)`. Equal in exact arithmetic; the
/// right side is zero when nothing is weak.
pub fn weak_reduction_sides(a: &SpectralForm, rho: &DensityOperator) -> Result<(f64, f64)> {
    let lhs = coherence_entropy(a, rho)?;
    let decomposition = weak_strong_decompose(a, rho, default_comm_tol(rho))?;
    let rhs = match (
        decomposition.weak_observable(),
        &decomposition.weak_state,
    ) {
        (Some(a_w), Some(rho_w)) => {
            decomposition.weak_probability * coherence_entropy(&a_w, rho_w)?
        }
        _ => 0.0,
    };
    Ok((lhs, rhs))
}

/// Outcome of comparing two observables by refinement on a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RefinementVerdict {
    /// Some detectable coarse branch splits into at least two detectable
    /// fine branches.
    StrictlyFiner,
    /// Branch-for-branch the same statistics (every detectable coarse branch
    /// contains exactly one detectable fine branch).
    Equal,
    NotComparable,
}

/// Which fine branches make up one detectable coarse branch. Indices refer to
/// positions in the respective `SpectralForm::branches()` arrays.
#[derive(Debug, Clone, Serialize)]
pub struct CoarseAssignment {
    pub coarse_index: usize,
    /// All assigned fine branches, detectable or not.
    pub fine_indices: Vec<usize>,
    /// The subset of `fine_indices` that is detectable in the state.
    pub detectable_fine: Vec<usize>,
    /// `||P_coarse - sum of assigned fine projectors||_F`.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementRelation {
    pub verdict: RefinementVerdict,
    pub assignments: Vec<CoarseAssignment>,
}

const INCLUSION_TOL: f64 = 1e-8;
const DECOMPOSITION_TOL: f64 = 1e-9;

/// Does `fine` refine `coarse` on `rho` — is every detectable coarse branch
/// the exact sum of fine branches? Undetectable fine branches may participate
/// in the sums but never make the relation strict. Both observables must be
/// discrete in relation to `rho`.
pub fn refinement_relation(
    fine: &SpectralForm,
    coarse: &SpectralForm,
    rho: &DensityOperator,
) -> Result<RefinementRelation> {
    require_discrete(fine, rho)?;
    let coarse_split = require_discrete(coarse, rho)?;

    let detectable_fine_flags: Vec<bool> = {
        let probs = fine.branch_probabilities(rho);
        probs.iter().map(|&p| p > tolerance::DETECT).collect()
    };

    let not_comparable = |assignments| {
        Ok(RefinementRelation {
            verdict: RefinementVerdict::NotComparable,
            assignments,
        })
    };

    // Assign every fine branch to the detectable coarse branch containing it.
    let mut assigned: Vec<Option<usize>> = vec![None; fine.branches().len()];
    for (f_idx, f) in fine.branches().iter().enumerate() {
        for c in &coarse_split.detectable {
            let c_idx = coarse
                .branches()
                .iter()
                .position(|b| b.eigenvalue == c.eigenvalue)
                .expect("detectable branch comes from the coarse form");
            let inclusion = frobenius_norm(
                &(c.projector.matrix() * f.projector.matrix() - f.projector.matrix()),
            );
            if inclusion <= INCLUSION_TOL {
                assigned[f_idx] = Some(c_idx);
                break;
            }
        }
        if assigned[f_idx].is_none() && detectable_fine_flags[f_idx] {
            // A detectable fine branch outside every coarse branch breaks the
            // relation outright.
            return not_comparable(Vec::new());
        }
    }

    let mut assignments = Vec::new();
    for (c_idx, c) in coarse.branches().iter().enumerate() {
        if !coarse_split
            .detectable
            .iter()
            .any(|d| d.eigenvalue == c.eigenvalue)
        {
            continue;
        }
        let fine_indices: Vec<usize> = assigned
            .iter()
            .enumerate()
            .filter_map(|(f, a)| (*a == Some(c_idx)).then_some(f))
            .collect();
        let mut sum = CMatrix::zeros(fine.dim(), fine.dim());
        for &f in &fine_indices {
            sum += fine.branches()[f].projector.matrix();
        }
        let residual = frobenius_norm(&(c.projector.matrix() - sum));
        let detectable_fine: Vec<usize> = fine_indices
            .iter()
            .copied()
            .filter(|&f| detectable_fine_flags[f])
            .collect();
        let ok = residual <= DECOMPOSITION_TOL;
        assignments.push(CoarseAssignment {
            coarse_index: c_idx,
            fine_indices,
            detectable_fine,
            residual,
        });
        if !ok {
            return not_comparable(assignments);
        }
    }

    let strict = assignments.iter().any(|a| a.detectable_fine.len() >= 2);
    Ok(RefinementRelation {
        verdict: if strict {
            RefinementVerdict::StrictlyFiner
        } else {
            RefinementVerdict::Equal
        },
        assignments,
    })
}

/// Entropy comparison along a refinement: all terms of the balance for both
/// observables, the commutation criterion for coherence-entropy equality, and
/// the conditional entropy that separates the two measurement entropies.
#[derive(Debug, Clone, Serialize)]
pub struct RefinementEntropyReport {
    pub verdict: RefinementVerdict,
    pub s_fine: f64,
    pub s_coarse: f64,
    pub ec_fine: f64,
    pub ec_coarse: f64,
    pub residual_fine: f64,
    pub residual_coarse: f64,
    /// `||[A_fine, sum_i P_i rho P_i]||` over the detectable coarse branches:
    /// zero exactly when the two coherence entropies coincide.
    pub luders_commutation_residual: f64,
    /// `sum_i p_i H(fine distribution inside coarse branch i)`; equals
    /// `s_fine - s_coarse` in exact arithmetic.
    pub conditional_entropy: f64,
}

/// Compare the entropy ledgers of a refining pair. Errors with
/// [`Error::NotRefinement`] when `fine` does not refine `coarse` on `rho`.
pub fn refinement_entropy_report(
    fine: &SpectralForm,
    coarse: &SpectralForm,
    rho: &DensityOperator,
) -> Result<RefinementEntropyReport> {
    let relation = refinement_relation(fine, coarse, rho)?;
    if relation.verdict == RefinementVerdict::NotComparable {
        return Err(Error::NotRefinement);
    }

    let ledger_fine = entropy_balance(fine, rho)?;
    let ledger_coarse = entropy_balance(coarse, rho)?;

    let coarse_split = detectable_split(coarse, rho, tolerance::DETECT);
    let projectors: Vec<Projector> = coarse_split
        .detectable
        .iter()
        .map(|b| b.projector.clone())
        .collect();
    let coarse_luders = luders_state(rho, &projectors)?;
    let luders_commutation_residual = commutator_norm(
        fine.to_operator().matrix(),
        coarse_luders.matrix(),
    )?;

    let fine_probs = fine.branch_probabilities(rho);
    let mut conditional_entropy = 0.0;
    for a in &relation.assignments {
        let p_coarse = coarse.branches()[a.coarse_index]
            .projector
            .probability(rho);
        if p_coarse <= tolerance::DETECT {
            continue;
        }
        for &f in &a.detectable_fine {
            let q = fine_probs[f];
            if q > 0.0 {
                conditional_entropy -= q * (q.ln() - p_coarse.ln());
            }
        }
    }

    Ok(RefinementEntropyReport {
        verdict: relation.verdict,
        s_fine: ledger_fine.observable_entropy,
        s_coarse: ledger_coarse.observable_entropy,
        ec_fine: ledger_fine.coherence_entropy,
        ec_coarse: ledger_coarse.coherence_entropy,
        residual_fine: ledger_fine.residual,
        residual_coarse: ledger_coarse.residual,
        luders_commutation_residual,
        conditional_entropy,
    })
}

const RANK_ONE_TOL: f64 = 1e-8;

/// Is `a` complete in relation to `rho` — does every detectable branch leave
/// a pure component behind? (Second-largest eigenvalue of each normalized
/// component at most 1e-8.)
///
/// When the whole observable commutes with the state this is cross-checked
/// against the equivalent range criterion `rank(P_i Q) = 1` in debug builds.
pub fn is_complete(a: &SpectralForm, rho: &DensityOperator) -> bool {
    let split = detectable_split(a, rho, tolerance::DETECT);
    let mut complete = true;
    for b in &split.detectable {
        let component = DensityOperator::trusted(
            b.projector.matrix() * rho.matrix() * b.projector.matrix(),
            None,
        );
        let eigs = component.eigenvalues(); // ascending
        let second = if eigs.len() >= 2 {
            eigs[eigs.len() - 2]
        } else {
            0.0
        };
        if second > RANK_ONE_TOL {
            complete = false;
            break;
        }
    }

    #[cfg(debug_assertions)]
    {
        let comm = commutator_norm(a.to_operator().matrix(), rho.matrix())
            .expect("dimensions checked by detectable_split");
        if comm <= default_comm_tol(rho) {
            let q = crate::operator::range_projector(rho, tolerance::RANK);
            let by_range = split.detectable.iter().all(|b| {
                let overlap = (b.projector.matrix() * q.matrix()).trace().re;
                (overlap - 1.0).abs() < 0.5
            });
            debug_assert_eq!(
                complete, by_range,
                "rank-one and range criteria disagree on a commuting pair"
            );
        }
    }

    complete
}
