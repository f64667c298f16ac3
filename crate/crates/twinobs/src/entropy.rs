//! Entropies of states and measurements, and how they balance.
//!
//! The central quantity is the coherence entropy of an observable `A` in a
//! state `rho`: the entropy the non-selective (Luders) measurement of `A`
//! adds, `E_C(A, rho) = S(sum_i P_i rho P_i) - S(rho)`, where the sum runs
//! over the branches that are detectable in `rho`. Together with the
//! mixing residual `S(rho) - sum_i p_i S(rho_i)` it accounts exactly for the
//! measurement entropy `S(A, rho) = H({p_i})` — see [`entropy_balance`].
//!
//! All entropies use the natural logarithm, with the usual convention
//! `0 ln 0 = 0`. Conversion to bits is a display concern left to callers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{
    frobenius_norm, DensityOperator, HermitianOperator, Projector, SpectralForm, Subsystem,
};
use crate::tolerance;

/// A finite probability distribution: non-negative entries summing to one
/// within 1e-10.
#[derive(Debug, Clone)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidProbability {
                reason: "empty distribution".into(),
            });
        }
        if let Some(bad) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidProbability {
                reason: format!("entry {bad} is negative or not finite"),
            });
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidProbability {
                reason: format!("entries sum to {total}, expected 1"),
            });
        }
        Ok(Self(weights))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `-sum_i w_i ln w_i` over any non-negative weights (callers guarantee
/// normalization where it matters).
pub(crate) fn shannon_raw<I: IntoIterator<Item = f64>>(weights: I) -> f64 {
    weights
        .into_iter()
        .filter(|&w| w > 0.0)
        .map(|w| -w * w.ln())
        .sum()
}

/// Shannon entropy in nats.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    shannon_raw(p.weights().iter().copied())
}

/// Entropy of a spectrum, clamping the tiny negative eigenvalues that dense
/// eigensolvers produce for rank-deficient states. Clamps larger than
/// [`tolerance::ENTROPY_CLAMP_WARN`] are logged — they indicate an input that
/// barely passed positivity validation.
fn spectrum_entropy<I: IntoIterator<Item = f64>>(eigs: I) -> f64 {
    let mut total = 0.0;
    for lambda in eigs {
        if lambda <= 0.0 {
            if lambda < -tolerance::ENTROPY_CLAMP_WARN {
                log::warn!("clamping eigenvalue {lambda:.3e} to zero in entropy computation");
            }
            continue;
        }
        total -= lambda * lambda.ln();
    }
    total
}

/// Von Neumann entropy `S(rho) = -tr(rho ln rho)` in nats.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    spectrum_entropy(rho.eigenvalues())
}

/// The state after a non-selective measurement of the given orthogonal
/// projector family: `sum_i P_i rho P_i`, renormalized exactly. The family
/// must be mutually orthogonal and certain on `rho` (probabilities summing to
/// one within [`tolerance::DISCRETENESS`]). Bipartite structure of `rho` is
/// preserved.
pub fn luders_state(rho: &DensityOperator, projectors: &[Projector]) -> Result<DensityOperator> {
    if projectors.is_empty() {
        return Err(Error::InvalidInput("no projectors given".into()));
    }
    for p in projectors {
        if p.dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                found: p.dim(),
            });
        }
    }
    for (i, p) in projectors.iter().enumerate() {
        for q in projectors.iter().skip(i + 1) {
            let overlap = frobenius_norm(&(p.matrix() * q.matrix()));
            if overlap > tolerance::GENERAL {
                return Err(Error::NotOrthogonal { overlap });
            }
        }
    }
    let total: f64 = projectors.iter().map(|p| p.probability(rho)).sum();
    let deficit = 1.0 - total;
    if deficit > tolerance::DISCRETENESS {
        return Err(Error::NotCertain { deficit });
    }
    let mut m = crate::operator::CMatrix::zeros(rho.dim(), rho.dim());
    for p in projectors {
        m += p.matrix() * rho.matrix() * p.matrix();
    }
    Ok(DensityOperator::trusted(m, rho.bipartite_dims()))
}

/// Branches of `a` that are detectable in `rho`, with their probabilities,
/// after checking that they carry the whole probability (discreteness in
/// relation to `rho`).
fn detectable_branches<'a>(
    a: &'a SpectralForm,
    rho: &DensityOperator,
) -> Result<Vec<(&'a Projector, f64)>> {
    let probs = a.branch_probabilities(rho);
    let detectable: Vec<(&Projector, f64)> = a
        .branches()
        .iter()
        .zip(&probs)
        .filter(|(_, &p)| p > tolerance::DETECT)
        .map(|(b, &p)| (&b.projector, p))
        .collect();
    let total: f64 = detectable.iter().map(|(_, p)| p).sum();
    let deficit = 1.0 - total;
    if deficit > tolerance::DISCRETENESS {
        return Err(Error::NotDiscrete { deficit });
    }
    Ok(detectable)
}

/// Coherence entropy `E_C(A, rho) = S(sum_i P_i rho P_i) - S(rho)`, the sum
/// running over detectable branches only. Requires `a` to be discrete in
/// relation to `rho`. Non-negative up to eigensolver noise (>= -1e-10).
pub fn coherence_entropy(a: &SpectralForm, rho: &DensityOperator) -> Result<f64> {
    let detectable = detectable_branches(a, rho)?;
    let projectors: Vec<Projector> = detectable.iter().map(|(p, _)| (*p).clone()).collect();
    let luders = luders_state(rho, &projectors)?;
    Ok(von_neumann_entropy(&luders) - von_neumann_entropy(rho))
}

/// Measurement entropy `S(A, rho) = H({p_i})` over the detectable branch
/// probabilities.
pub fn observable_entropy(a: &SpectralForm, rho: &DensityOperator) -> Result<f64> {
    let detectable = detectable_branches(a, rho)?;
    Ok(shannon_raw(detectable.iter().map(|(_, p)| *p)))
}

/// Every term of the measurement-entropy balance for one `(A, rho)` pair.
///
/// The exact identities these terms satisfy:
/// `observable_entropy = coherence_entropy + residual`, the sandwich
/// `avg_component_entropy <= state_entropy <= luders_entropy`, and
/// `coherence_entropy <= observable_entropy`.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyLedger {
    /// `S(A, rho) = H({p_i})`.
    pub observable_entropy: f64,
    /// `S(Luders) - S(rho)`.
    pub coherence_entropy: f64,
    /// `S(rho)`.
    pub state_entropy: f64,
    /// `S(sum_i P_i rho P_i)`.
    pub luders_entropy: f64,
    /// `sum_i p_i S(P_i rho P_i / p_i)`.
    pub avg_component_entropy: f64,
    /// `S(rho) - avg_component_entropy`: the information gain of the
    /// selective measurement.
    pub residual: f64,
}

impl EntropyLedger {
    /// `|S(A, rho) - (E_C + residual)|` — zero in exact arithmetic.
    pub fn balance_defect(&self) -> f64 {
        (self.observable_entropy - (self.coherence_entropy + self.residual)).abs()
    }

    /// Worst violation of `avg <= S(rho) <= S(Luders)`; zero when the
    /// sandwich holds.
    pub fn sandwich_violation(&self) -> f64 {
        let lower = self.avg_component_entropy - self.state_entropy;
        let upper = self.state_entropy - self.luders_entropy;
        lower.max(upper).max(0.0)
    }

    /// Violation of `E_C <= S(A, rho)`; zero when the bound holds.
    pub fn coherence_bound_violation(&self) -> f64 {
        (self.coherence_entropy - self.observable_entropy).max(0.0)
    }
}

/// Compute the full entropy ledger of `a` against `rho`.
pub fn entropy_balance(a: &SpectralForm, rho: &DensityOperator) -> Result<EntropyLedger> {
    let detectable = detectable_branches(a, rho)?;
    let projectors: Vec<Projector> = detectable.iter().map(|(p, _)| (*p).clone()).collect();
    let luders = luders_state(rho, &projectors)?;

    let state_entropy = von_neumann_entropy(rho);
    let luders_entropy = von_neumann_entropy(&luders);
    let mut avg_component_entropy = 0.0;
    for (p, prob) in &detectable {
        let component =
            DensityOperator::trusted(p.matrix() * rho.matrix() * p.matrix(), rho.bipartite_dims());
        avg_component_entropy += prob * von_neumann_entropy(&component);
    }
    let observable_entropy = shannon_raw(detectable.iter().map(|(_, p)| *p));

    Ok(EntropyLedger {
        observable_entropy,
        coherence_entropy: luders_entropy - state_entropy,
        state_entropy,
        luders_entropy,
        avg_component_entropy,
        residual: state_entropy - avg_component_entropy,
    })
}

/// Von Neumann mutual information `I(rho_12) = S(rho_1) + S(rho_2) - S(rho_12)`
/// of a bipartite state.
pub fn mutual_information(rho12: &DensityOperator) -> Result<f64> {
    let rho1 = crate::operator::partial_trace(rho12, Subsystem::One)?;
    let rho2 = crate::operator::partial_trace(rho12, Subsystem::Two)?;
    Ok(von_neumann_entropy(&rho1) + von_neumann_entropy(&rho2) - von_neumann_entropy(rho12))
}

/// Two independently computed expectation values of a witness observable `B`
/// that must coincide when the Luders state is the mixture of the measurement
/// components: `tr(B L)` versus `sum_i p_i tr(B rho_i)`.
#[derive(Debug, Clone, Serialize)]
pub struct MixtureAverageCheck {
    pub luders_average: f64,
    pub component_average: f64,
    pub discrepancy: f64,
    pub equal: bool,
}

/// Check the mixture property of the Luders state on a witness `B`: the
/// left side evaluates `B` in `sum_i P_i rho P_i`, the right side renormalizes
/// each component separately and reweights. Exactly equal in infinite
/// precision; the discrepancy measures accumulated roundoff.
pub fn mixture_average_check(
    a: &SpectralForm,
    rho: &DensityOperator,
    b: &HermitianOperator,
    tol: f64,
) -> Result<MixtureAverageCheck> {
    if b.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: b.dim(),
        });
    }
    let detectable = detectable_branches(a, rho)?;
    let projectors: Vec<Projector> = detectable.iter().map(|(p, _)| (*p).clone()).collect();
    let luders = luders_state(rho, &projectors)?;
    let luders_average = (b.matrix() * luders.matrix()).trace().re;
    let mut component_average = 0.0;
    for (p, prob) in &detectable {
        let component =
            DensityOperator::trusted(p.matrix() * rho.matrix() * p.matrix(), None);
        component_average += prob * (b.matrix() * component.matrix()).trace().re;
    }
    let discrepancy = (luders_average - component_average).abs();
    Ok(MixtureAverageCheck {
        luders_average,
        component_average,
        discrepancy,
        equal: discrepancy <= tol,
    })
}
