//! Numerical certification of every structural identity the library rests on.
//!
//! Each trial draws a fresh batch of deterministic instances — generic random
//! pairs, adversarially constructed edge cases, and exactly solvable golden
//! cases — and measures how far each claimed identity or inequality is from
//! holding. A claim passes when the worst residual observed across all trials
//! stays at or under its tolerance. Trials run in parallel; determinism is
//! preserved because every trial derives its own independent RNG stream from
//! the base seed and the merge of per-trial results is commutative
//! (max/count only).

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::Rng as _;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use twinobs::entropy::{
    coherence_entropy, entropy_balance, luders_state, mutual_information, von_neumann_entropy,
    ProbabilityVector,
};
use twinobs::operator::{
    default_cluster_tol, default_comm_tol, is_certain_event, partial_trace, spectral_decompose,
    C64, CMatrix, CVector, DensityOperator, HermitianOperator, Projector, SpectralBranch,
    SpectralForm, Subsystem,
};
use twinobs::relation::{refinement_entropy_report, weak_reduction_sides, weak_strong_decompose, Regime};
use twinobs::twins::{
    biorthogonal_mixture_info, common_schmidt_ensemble, correlations_incompatibility,
    discord_decomposition, joint_measurement_distribution, pure_state_twins, verify_pto,
    DiscordAnalysis,
};
use twinobs::tolerance;

use crate::random::{
    pick, random_density_with, random_observable_with, random_projector_with,
    random_pure_bipartite_with, random_unitary_with, trial_rng,
};

/// Tolerance for the exactly solvable maximally entangled golden case, whose
/// quantities are closed-form expressions in `ln 2`.
pub const GOLDEN_CASE_TOL: f64 = 1e-9;

/// Parameters of a self-test run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SelftestConfig {
    /// Base seed; every trial derives stream `trial` from it.
    pub seed: u64,
    /// Number of independent trials (each contributes one batch of instances).
    pub trials: usize,
    /// Largest subsystem dimension drawn for generic instances (at least 4).
    pub max_dim: usize,
    /// Pass tolerance for every check except the golden case.
    pub tolerance: f64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self { seed: 7, trials: 100, max_dim: 8, tolerance: 1e-8 }
    }
}

/// Outcome of one certified claim, aggregated over all instances seen.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremRecord {
    /// Stable snake_case identifier of the claim.
    pub name: String,
    /// One-line statement of what was measured.
    pub description: String,
    /// Number of instances that contributed a residual.
    pub instances: usize,
    /// Worst residual observed; non-finite values are coerced to infinity.
    pub max_residual: f64,
    /// Pass threshold for this claim.
    pub tolerance: f64,
    /// `max_residual <= tolerance`.
    pub pass: bool,
}

/// Full report of a self-test run.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub seed: u64,
    pub trials: usize,
    pub max_dim: usize,
    pub tolerance: f64,
    pub records: Vec<TheoremRecord>,
    /// Messages of panics caught inside trials, tagged by trial index.
    pub panics: Vec<String>,
    pub wall_time_secs: f64,
}

impl TheoremReport {
    /// True when no trial panicked, every record passed, and every claim was
    /// actually exercised.
    pub fn all_pass(&self) -> bool {
        self.panics.is_empty()
            && self.records.iter().all(|r| r.pass && r.instances > 0)
    }
}

/// The certified claims, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(usize)]
enum Check {
    BellGoldenCase,
    EntropySandwich,
    EntropyBalance,
    WeakComponentReduction,
    RefinementMonotonicity,
    CertaintyEquivalence,
    NonsingularDetectability,
    TwinDerivedCompatibility,
    EnsembleComponentTwins,
    CoherenceInMutualInformation,
    TwinInformationDecomposition,
    CompleteTwinDiscord,
    JointDistributionCollapse,
    PureTwinEntanglement,
    BiorthogonalMixing,
}

const CHECK_COUNT: usize = 15;

impl Check {
    const ALL: [Check; CHECK_COUNT] = [
        Check::BellGoldenCase,
        Check::EntropySandwich,
        Check::EntropyBalance,
        Check::WeakComponentReduction,
        Check::RefinementMonotonicity,
        Check::CertaintyEquivalence,
        Check::NonsingularDetectability,
        Check::TwinDerivedCompatibility,
        Check::EnsembleComponentTwins,
        Check::CoherenceInMutualInformation,
        Check::TwinInformationDecomposition,
        Check::CompleteTwinDiscord,
        Check::JointDistributionCollapse,
        Check::PureTwinEntanglement,
        Check::BiorthogonalMixing,
    ];

    fn name(self) -> &'static str {
        match self {
            Check::BellGoldenCase => "bell_golden_case",
            Check::EntropySandwich => "entropy_sandwich",
            Check::EntropyBalance => "entropy_balance",
            Check::WeakComponentReduction => "weak_component_reduction",
            Check::RefinementMonotonicity => "refinement_monotonicity",
            Check::CertaintyEquivalence => "certainty_equivalence",
            Check::NonsingularDetectability => "nonsingular_detectability",
            Check::TwinDerivedCompatibility => "twin_derived_compatibility",
            Check::EnsembleComponentTwins => "ensemble_component_twins",
            Check::CoherenceInMutualInformation => "coherence_in_mutual_information",
            Check::TwinInformationDecomposition => "twin_information_decomposition",
            Check::CompleteTwinDiscord => "complete_twin_discord",
            Check::JointDistributionCollapse => "joint_distribution_collapse",
            Check::PureTwinEntanglement => "pure_twin_entanglement",
            Check::BiorthogonalMixing => "biorthogonal_mixing",
        }
    }

    fn description(self) -> &'static str {
        match self {
            Check::BellGoldenCase => {
                "maximally entangled two-qubit closed forms: I = 2 ln 2, H = E_C = discord = ln 2, zero residual information"
            }
            Check::EntropySandwich => {
                "mean component entropy <= S(state) <= S(measured state), and E_C <= observable entropy"
            }
            Check::EntropyBalance => {
                "observable entropy = coherence entropy + entropy decrease of the state"
            }
            Check::WeakComponentReduction => {
                "coherence entropy equals the weak-sector probability times the coherence entropy of the reduced weak pair"
            }
            Check::RefinementMonotonicity => {
                "refining an observable cannot decrease observable entropy, coherence entropy, or the entropy-decrease residual; entropies differ by the conditional entropy; equal E_C exactly when the fine observable commutes with the coarse measured state"
            }
            Check::CertaintyEquivalence => {
                "probability one, algebraic absorption, and range inclusion agree as criteria for a certain event"
            }
            Check::NonsingularDetectability => {
                "against a nonsingular state every nonzero projector is detectable, with probability at least rank times the smallest eigenvalue"
            }
            Check::TwinDerivedCompatibility => {
                "verified twins commute with their reduced states (compatibility is derived, not assumed)"
            }
            Check::EnsembleComponentTwins => {
                "twins of a mixture of pure states sharing one biorthogonal basis are twins of every component"
            }
            Check::CoherenceInMutualInformation => {
                "mutual information = coherence entropy + mutual information of the measured state, for twins and for observables obstructed only by correlations"
            }
            Check::TwinInformationDecomposition => {
                "mutual information = observable entropy + coherence entropy + mean component information, identically from either side"
            }
            Check::CompleteTwinDiscord => {
                "complete twins: zero residual information, discord equals coherence entropy, and the joint outcome distribution carries S(rho_1) = S(rho_2) = H(p) of classical mutual information"
            }
            Check::JointDistributionCollapse => {
                "twin outcomes are perfectly correlated: the joint distribution is diagonal with the common marginal on the diagonal"
            }
            Check::PureTwinEntanglement => {
                "for a pure composite state the twin coherence entropy equals the reduced-state entropy (the entanglement entropy)"
            }
            Check::BiorthogonalMixing => {
                "mixing block-orthogonal components adds the mixing entropy to the mean component mutual information"
            }
        }
    }

    fn tolerance(self, config: &SelftestConfig) -> f64 {
        match self {
            Check::BellGoldenCase => GOLDEN_CASE_TOL,
            _ => config.tolerance,
        }
    }
}

/// Per-trial residual accumulator. Merging is commutative and associative,
/// so parallel trial order cannot affect the report.
struct Accumulator {
    instances: [usize; CHECK_COUNT],
    residuals: [f64; CHECK_COUNT],
}

impl Accumulator {
    fn new() -> Self {
        Self { instances: [0; CHECK_COUNT], residuals: [0.0; CHECK_COUNT] }
    }

    /// Record one instance of a check. Non-finite residuals (a sign of an
    /// upstream numerical breakdown) are coerced to infinity so the check
    /// fails loudly instead of comparing against NaN.
    fn observe(&mut self, check: Check, residual: f64) {
        let i = check as usize;
        let r = if residual.is_finite() { residual } else { f64::INFINITY };
        self.instances[i] += 1;
        if r > self.residuals[i] {
            self.residuals[i] = r;
        }
    }

    fn absorb(&mut self, other: &Accumulator) {
        for i in 0..CHECK_COUNT {
            self.instances[i] += other.instances[i];
            if other.residuals[i] > self.residuals[i] {
                self.residuals[i] = other.residuals[i];
            }
        }
    }
}

/// Run the full self-test suite and aggregate a report.
///
/// Trials execute in parallel; a panic inside one trial is caught, reported
/// in [`TheoremReport::panics`], and fails the run without losing the other
/// trials' results.
pub fn run_selftest(config: &SelftestConfig) -> TheoremReport {
    assert!(config.trials >= 1, "self-test needs at least one trial");
    assert!(config.max_dim >= 4, "self-test needs max_dim >= 4");
    let start = Instant::now();

    let outcomes: Vec<(usize, Result<Accumulator, String>)> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let result = catch_unwind(AssertUnwindSafe(|| run_trial(config, trial)))
                .map_err(|payload| panic_message(payload.as_ref()));
            (trial, result)
        })
        .collect();

    let mut total = Accumulator::new();
    let mut panics = Vec::new();
    for (trial, outcome) in outcomes {
        match outcome {
            Ok(acc) => total.absorb(&acc),
            Err(message) => panics.push(format!("trial {trial}: {message}")),
        }
    }

    let records = Check::ALL
        .iter()
        .map(|&check| {
            let i = check as usize;
            let tolerance = check.tolerance(config);
            let max_residual = total.residuals[i];
            TheoremRecord {
                name: check.name().to_owned(),
                description: check.description().to_owned(),
                instances: total.instances[i],
                max_residual,
                tolerance,
                pass: max_residual <= tolerance,
            }
        })
        .collect();

    TheoremReport {
        seed: config.seed,
        trials: config.trials,
        max_dim: config.max_dim,
        tolerance: config.tolerance,
        records,
        panics,
        wall_time_secs: start.elapsed().as_secs_f64(),
    }
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_owned()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "opaque panic payload".to_owned()
    }
}

fn run_trial(config: &SelftestConfig, trial: usize) -> Accumulator {
    let mut acc = Accumulator::new();
    let mut rng = trial_rng(config.seed, trial as u64);

    if trial == 0 {
        golden_case(&mut acc);
    }
    generic_pair_instances(&mut acc, &mut rng, config);
    intermediary_instance(&mut acc, &mut rng, config);
    refinement_instances(&mut acc, &mut rng, config);
    certainty_instances(&mut acc, &mut rng, config);
    nonsingular_instance(&mut acc, &mut rng, config);
    pure_twin_instance(&mut acc, &mut rng, config, trial);
    ensemble_instance(&mut acc, &mut rng, config);
    correlations_instance(&mut acc, &mut rng, config);
    biorthogonal_instance(&mut acc, &mut rng, config);
    acc
}

/// The maximally entangled two-qubit state, where every ledger quantity has
/// a closed form: I = 2 ln 2 and H(p) = E_C = discord = ln 2.
fn golden_case(acc: &mut Accumulator) {
    const LN_2: f64 = std::f64::consts::LN_2;
    let amp = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let zero = C64::new(0.0, 0.0);
    let phi = CVector::from_vec(vec![amp, zero, zero, amp]);
    let rho = DensityOperator::bipartite_from_pure(&phi, 2, 2)
        .expect("golden-case state is a valid pure bipartite state");
    let (a1, a2) =
        pure_state_twins(&phi, (2, 2)).expect("golden-case twins are constructible");
    let analysis = discord_decomposition(&rho, &a1, &a2, tolerance::GENERAL)
        .expect("golden-case discord decomposition succeeds");
    let ledger = &analysis.ledger;

    let worst = [
        (ledger.mutual_information - 2.0 * LN_2).abs(),
        (ledger.observable_entropy.unwrap_or(f64::NAN) - LN_2).abs(),
        (ledger.coherence_entropy - LN_2).abs(),
        ledger.residual_information.unwrap_or(f64::NAN).abs(),
        (ledger.discord.unwrap_or(f64::NAN) - LN_2).abs(),
    ]
    .into_iter()
    .fold(0.0_f64, f64::max);
    acc.observe(Check::BellGoldenCase, worst);
}

/// Generic observable/state pairs: sandwich inequalities, the entropy
/// balance, and the weak-sector reduction of the coherence entropy.
fn generic_pair_instances(acc: &mut Accumulator, rng: &mut ChaCha8Rng, config: &SelftestConfig) {
    let dim = pick(rng, 2, config.max_dim);
    let branches = pick(rng, 2, dim);
    let rank = pick(rng, 1, dim);
    let a = random_observable_with(rng, dim, branches)
        .expect("random observable construction succeeds");
    let rho = random_density_with(rng, dim, rank).expect("random state construction succeeds");

    let ledger = entropy_balance(&a, &rho).expect("entropy balance computes on a generic pair");
    acc.observe(
        Check::EntropySandwich,
        ledger.sandwich_violation().max(ledger.coherence_bound_violation()),
    );
    acc.observe(Check::EntropyBalance, ledger.balance_defect());

    let (lhs, rhs) = weak_reduction_sides(&a, &rho).expect("weak reduction computes");
    acc.observe(Check::WeakComponentReduction, (lhs - rhs).abs());
}

/// A constructed mixed-regime instance: one branch carrying coherence, the
/// rest commuting, so the weak/strong split must be non-trivial on both
/// sides and the weak-sector reduction must still balance.
fn intermediary_instance(acc: &mut Accumulator, rng: &mut ChaCha8Rng, config: &SelftestConfig) {
    let tail = pick(rng, 2, config.max_dim.saturating_sub(2).max(2));
    let dim = 2 + tail;

    let weight: f64 = 0.3 + 0.4 * rng.gen::<f64>();
    let q1: f64 = 0.3 + 0.4 * rng.gen::<f64>();
    let q2 = 1.0 - q1;
    let magnitude = (0.3 + 0.6 * rng.gen::<f64>()) * (q1 * q2).sqrt();
    let angle = std::f64::consts::TAU * rng.gen::<f64>();
    let coherence = C64::from_polar(magnitude, angle);

    let mut m = CMatrix::zeros(dim, dim);
    m[(0, 0)] = C64::new(weight * q1, 0.0);
    m[(1, 1)] = C64::new(weight * q2, 0.0);
    m[(0, 1)] = coherence.scale(weight);
    m[(1, 0)] = coherence.conj().scale(weight);
    let mut tail_weights: Vec<f64> = (0..tail).map(|_| 0.05 + rng.gen::<f64>()).collect();
    let tail_sum: f64 = tail_weights.iter().sum();
    for w in &mut tail_weights {
        *w *= (1.0 - weight) / tail_sum;
    }
    for (k, &w) in tail_weights.iter().enumerate() {
        m[(2 + k, 2 + k)] = C64::new(w, 0.0);
    }
    let rho = DensityOperator::new(m).expect("constructed mixed-regime state is valid");

    // Branches: the two coherently coupled basis states separately (weak
    // branches), and the whole diagonal tail as one branch (strong).
    let single = |index: usize| {
        let mut p = CMatrix::zeros(dim, dim);
        p[(index, index)] = C64::new(1.0, 0.0);
        Projector::new(p).expect("basis-state projector is valid")
    };
    let mut tail_proj = CMatrix::zeros(dim, dim);
    for k in 0..tail {
        tail_proj[(2 + k, 2 + k)] = C64::new(1.0, 0.0);
    }
    let branches = vec![
        SpectralBranch { eigenvalue: 1.0, projector: single(0) },
        SpectralBranch { eigenvalue: 2.0, projector: single(1) },
        SpectralBranch {
            eigenvalue: 3.0,
            projector: Projector::new(tail_proj).expect("tail projector is valid"),
        },
    ];
    let a = SpectralForm::new(branches, None).expect("constructed observable is valid");

    let decomposition = weak_strong_decompose(&a, &rho, default_comm_tol(&rho))
        .expect("weak/strong decomposition computes");
    let regime_penalty = if decomposition.regime == Regime::Intermediary { 0.0 } else { 1.0 };
    let (lhs, rhs) = weak_reduction_sides(&a, &rho).expect("weak reduction computes");
    let residual = (lhs - rhs)
        .abs()
        .max(regime_penalty)
        .max(decomposition.reconstruction_defect(&rho));
    acc.observe(Check::WeakComponentReduction, residual);
}

/// Refinement chains: a maximally fine observable against a contiguous
/// coarse-graining of itself, plus a constructed instance whose coherence
/// lives entirely across coarse sectors (entropy strictly up, coherence
/// entropy exactly preserved).
fn refinement_instances(acc: &mut Accumulator, rng: &mut ChaCha8Rng, config: &SelftestConfig) {
    let tol = config.tolerance;

    // Generic chain.
    let dim = pick(rng, 3, config.max_dim.max(3));
    let basis = random_unitary_with(rng, dim);
    let column_projector = |j: usize| {
        let col = basis.column(j).into_owned();
        let p = &col * col.adjoint();
        Projector::new(p).expect("rank-one basis projector is valid")
    };
    let fine_branches: Vec<SpectralBranch> = (0..dim)
        .map(|j| SpectralBranch { eigenvalue: (j + 1) as f64, projector: column_projector(j) })
        .collect();
    let fine = SpectralForm::new(fine_branches, None).expect("fine observable is valid");

    let groups = pick(rng, 2, dim - 1);
    let mut coarse_branches = Vec::with_capacity(groups);
    for g in 0..groups {
        let mut p = CMatrix::zeros(dim, dim);
        for j in (0..dim).filter(|j| j % groups == g) {
            let col = basis.column(j).into_owned();
            p += &col * col.adjoint();
        }
        coarse_branches.push(SpectralBranch {
            eigenvalue: (100 + g) as f64,
            projector: Projector::new(p).expect("grouped projector is valid"),
        });
    }
    let coarse = SpectralForm::new(coarse_branches, None).expect("coarse observable is valid");

    let rank = pick(rng, 2, dim);
    let rho = random_density_with(rng, dim, rank).expect("random state construction succeeds");
    let report =
        refinement_entropy_report(&fine, &coarse, &rho).expect("refinement report computes");

    let mut worst = (report.s_coarse - report.s_fine).max(0.0);
    worst = worst.max((report.ec_coarse - report.ec_fine).max(0.0));
    worst = worst.max((report.residual_coarse - report.residual_fine).max(0.0));
    worst =
        worst.max((report.s_fine - report.s_coarse - report.conditional_entropy).abs());
    if report.luders_commutation_residual <= tol {
        worst = worst.max((report.ec_fine - report.ec_coarse).abs());
    }
    acc.observe(Check::RefinementMonotonicity, worst);

    // Cross-sector coherence: the state's only off-diagonal element couples
    // two different coarse sectors, so the coarse measurement already erases
    // it. The fine observable then commutes with the coarse measured state:
    // entropy must strictly increase while coherence entropy stays equal.
    let basis = random_unitary_with(rng, 3);
    let mut q: Vec<f64> = (0..3).map(|_| 0.2 + rng.gen::<f64>()).collect();
    let sum: f64 = q.iter().sum();
    for v in &mut q {
        *v /= sum;
    }
    let magnitude = (0.3 + 0.6 * rng.gen::<f64>()) * (q[0] * q[2]).sqrt();
    let coherence = C64::from_polar(magnitude, std::f64::consts::TAU * rng.gen::<f64>());
    let mut in_basis = CMatrix::zeros(3, 3);
    in_basis[(0, 0)] = C64::new(q[0], 0.0);
    in_basis[(1, 1)] = C64::new(q[1], 0.0);
    in_basis[(2, 2)] = C64::new(q[2], 0.0);
    in_basis[(0, 2)] = coherence;
    in_basis[(2, 0)] = coherence.conj();
    let m = &basis * in_basis * basis.adjoint();
    let rho = DensityOperator::new(m).expect("cross-sector state is valid");

    let column_projector = |j: usize| {
        let col = basis.column(j).into_owned();
        Projector::new(&col * col.adjoint()).expect("rank-one basis projector is valid")
    };
    let fine = SpectralForm::new(
        (0..3)
            .map(|j| SpectralBranch { eigenvalue: (j + 1) as f64, projector: column_projector(j) })
            .collect(),
        None,
    )
    .expect("fine observable is valid");
    let mut pair = CMatrix::zeros(3, 3);
    for j in 0..2 {
        let col = basis.column(j).into_owned();
        pair += &col * col.adjoint();
    }
    let coarse = SpectralForm::new(
        vec![
            SpectralBranch {
                eigenvalue: 1.0,
                projector: Projector::new(pair).expect("sector projector is valid"),
            },
            SpectralBranch { eigenvalue: 2.0, projector: column_projector(2) },
        ],
        None,
    )
    .expect("coarse observable is valid");

    let report =
        refinement_entropy_report(&fine, &coarse, &rho).expect("refinement report computes");
    let mut worst = (report.s_coarse - report.s_fine).max(0.0);
    worst = worst.max((report.residual_coarse - report.residual_fine).max(0.0));
    worst = worst.max((report.ec_fine - report.ec_coarse).abs());
    worst = worst.max(if report.luders_commutation_residual <= tol { 0.0 } else { 1.0 });
    worst = worst.max(if report.s_fine > report.s_coarse + 1e-6 { 0.0 } else { 1.0 });
    acc.observe(Check::RefinementMonotonicity, worst);
}

/// Certainty criteria: on a generic pair the three criteria must agree that
/// the event is uncertain; on a state confined inside the projector's range
/// they must all report certainty.
fn certainty_instances(acc: &mut Accumulator, rng: &mut ChaCha8Rng, config: &SelftestConfig) {
    let dim = pick(rng, 2, config.max_dim);
    let rank = pick(rng, 1, dim - 1);
    let p = random_projector_with(rng, dim, rank).expect("random projector is valid");
    let rho = random_density_with(rng, dim, dim).expect("random state construction succeeds");
    let report = is_certain_event(&p, &rho, tolerance::DISCRETENESS);
    let consistent = report.criteria_agree(tolerance::GENERAL) && !report.certain;
    acc.observe(Check::CertaintyEquivalence, if consistent { 0.0 } else { 1.0 });

    // Confine a state inside the range of the projector: all three criteria
    // must then hold simultaneously and quantitatively.
    let sigma = random_density_with(rng, dim, dim).expect("random state construction succeeds");
    let compressed = p.matrix() * sigma.matrix() * p.matrix();
    let trace: f64 = compressed.diagonal().iter().map(|z| z.re).sum();
    let confined =
        DensityOperator::new(compressed.map(|z| z / C64::new(trace, 0.0)))
            .expect("confined state is valid");
    let report = is_certain_event(&p, &confined, tolerance::DISCRETENESS);
    let worst = (1.0 - report.probability)
        .abs()
        .max(report.algebraic_residual)
        .max(report.range_residual)
        .max(if report.certain && report.criteria_agree(tolerance::GENERAL) { 0.0 } else { 1.0 });
    acc.observe(Check::CertaintyEquivalence, worst);
}

/// Against a nonsingular state, every nonzero projector is a detectable
/// event, quantitatively: its probability is at least `rank * lambda_min`.
fn nonsingular_instance(acc: &mut Accumulator, rng: &mut ChaCha8Rng, config: &SelftestConfig) {
    let dim = pick(rng, 2, config.max_dim);
    let rho = random_density_with(rng, dim, dim).expect("full-rank state construction succeeds");
    let rank = pick(rng, 1, dim - 1);
    let p = random_projector_with(rng, dim, rank).expect("random projector is valid");

    let probability = p.probability(&rho);
    let lambda_min = rho
        .eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let bound_defect = (lambda_min * rank as f64 - probability).max(0.0);
    let detectable = probability > tolerance::DETECT;
    acc.observe(
        Check::NonsingularDetectability,
        bound_defect.max(if detectable { 0.0 } else { 1.0 }),
    );
}

/// The observations shared by every twin instance (pure or ensemble):
/// derived compatibility, the coherence identity, the two-sided information
/// decomposition, the diagonal joint distribution, and — since every twin
/// constructed here is complete — the discord collapse. Returns the analysis
/// and the reduced entropy of side 1 for instance-specific follow-ups.
fn twin_instance_checks(
    acc: &mut Accumulator,
    rho12: &DensityOperator,
    a1: &SpectralForm,
    a2: &SpectralForm,
    tol: f64,
) -> (DiscordAnalysis, f64) {
    let analysis =
        discord_decomposition(rho12, a1, a2, tol).expect("twin discord decomposition succeeds");

    let pto = &analysis.pto;
    let compat = pto
        .derived_compatibility
        .0
        .max(pto.derived_compatibility.1)
        .max(if pto.is_pto { 0.0 } else { 1.0 });
    acc.observe(Check::TwinDerivedCompatibility, compat);

    let ledger = &analysis.ledger;
    acc.observe(Check::CoherenceInMutualInformation, ledger.coherence_identity_defect());
    acc.observe(
        Check::TwinInformationDecomposition,
        ledger
            .decomposition_defect()
            .unwrap_or(f64::NAN)
            .max(ledger.side_asymmetry.unwrap_or(f64::NAN)),
    );

    let joint =
        joint_measurement_distribution(a1, a2, rho12).expect("joint distribution computes");
    let mut collapse = 0.0_f64;
    for (i, row) in joint.matrix.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            let expected = if i == j { joint.marginal_1[i] } else { 0.0 };
            collapse = collapse.max((p - expected).abs());
        }
    }
    acc.observe(Check::JointDistributionCollapse, collapse);

    let rho1 = partial_trace(rho12, Subsystem::One).expect("left reduction computes");
    let rho2 = partial_trace(rho12, Subsystem::Two).expect("right reduction computes");
    let s1 = von_neumann_entropy(&rho1);
    let s2 = von_neumann_entropy(&rho2);
    let h = ledger.observable_entropy.unwrap_or(f64::NAN);
    let collapse_chain = (joint.classical_mutual_information - s1)
        .abs()
        .max((s1 - s2).abs())
        .max((s2 - h).abs());
    let discord_residual = ledger
        .residual_information
        .unwrap_or(f64::NAN)
        .abs()
        .max((ledger.discord.unwrap_or(f64::NAN) - ledger.coherence_entropy).abs());
    acc.observe(Check::CompleteTwinDiscord, discord_residual.max(collapse_chain));

    (analysis, s1)
}

/// Twins of a pure composite state, over a mix of generic, rank-deficient,
/// and occasionally large instances.
fn pure_twin_instance(
    acc: &mut Accumulator,
    rng: &mut ChaCha8Rng,
    config: &SelftestConfig,
    trial: usize,
) {
    let cap = config.max_dim.clamp(2, 6);
    let (d1, d2) = if trial % 10 == 9 && config.max_dim >= 8 {
        (8, 8)
    } else {
        (pick(rng, 2, cap), pick(rng, 2, cap))
    };
    let full = d1.min(d2);
    // Every fifth trial forces a strictly rank-deficient state so the
    // zero-probability complement branches are exercised too.
    let rank = if trial % 5 == 4 && full > 1 {
        pick(rng, 1, full - 1)
    } else {
        pick(rng, 1, full)
    };
    let phi = random_pure_bipartite_with(rng, d1, d2, Some(rank))
        .expect("random pure bipartite state construction succeeds");
    let rho = DensityOperator::bipartite_from_pure(&phi, d1, d2)
        .expect("pure bipartite density operator is valid");
    let (a1, a2) = pure_state_twins(&phi, (d1, d2)).expect("pure-state twins are constructible");

    let (_, s1) = twin_instance_checks(acc, &rho, &a1, &a2, config.tolerance);

    // For a pure composite state the coherence entropy of the twins equals
    // the entanglement entropy of either side.
    let ec = coherence_entropy(&a1.embed(Subsystem::One, d2), &rho)
        .expect("coherence entropy of the embedded twin computes");
    acc.observe(Check::PureTwinEntanglement, (ec - s1).abs());
}

/// Twins of a mixture of pure states sharing one biorthogonal (Schmidt)
/// basis: the mixture has the same twins, and they remain twins of every
/// component individually.
fn ensemble_instance(acc: &mut Accumulator, rng: &mut ChaCha8Rng, config: &SelftestConfig) {
    let levels = pick(rng, 2, config.max_dim.clamp(2, 4));
    let components = pick(rng, 1, 3);
    let cap = config.max_dim.clamp(levels, 6);
    let d1 = pick(rng, levels, cap);
    let d2 = pick(rng, levels, cap);

    let spectra: Vec<ProbabilityVector> = (0..components)
        .map(|_| {
            let mut entries: Vec<f64> = (0..levels).map(|_| 0.1 + rng.gen::<f64>()).collect();
            let sum: f64 = entries.iter().sum();
            for e in &mut entries {
                *e /= sum;
            }
            ProbabilityVector::new(entries).expect("component spectrum is a valid distribution")
        })
        .collect();
    let mut weights: Vec<f64> = (0..components).map(|_| 0.1 + rng.gen::<f64>()).collect();
    let weight_sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= weight_sum;
    }
    let weights =
        ProbabilityVector::new(weights).expect("mixing weights form a valid distribution");

    let (rho, a1, a2) = common_schmidt_ensemble(&spectra, &weights, (d1, d2))
        .expect("shared-basis ensemble construction succeeds");
    twin_instance_checks(acc, &rho, &a1, &a2, config.tolerance);

    // The same observables must verify as twins of each pure component.
    for spectrum in &spectra {
        let mut phi = CVector::zeros(d1 * d2);
        for (i, &p) in spectrum.weights().iter().enumerate() {
            phi[i * d2 + i] = C64::new(p.sqrt(), 0.0);
        }
        let component = DensityOperator::bipartite_from_pure(&phi, d1, d2)
            .expect("ensemble component is a valid pure state");
        let report = verify_pto(&a1, &a2, &component, config.tolerance)
            .expect("component twin verification computes");
        let worst = report
            .pairs
            .iter()
            .map(|pair| pair.algebraic_residual)
            .fold(0.0_f64, f64::max)
            .max(if report.is_pto { 0.0 } else { 1.0 });
        acc.observe(Check::EnsembleComponentTwins, worst);
    }
}

/// A generic correlated state whose reduced eigenbasis observable commutes
/// with the reduced state by construction, yet fails to be a twin because of
/// the correlations alone. On such instances the coherence identity must
/// still hold.
fn correlations_instance(acc: &mut Accumulator, rng: &mut ChaCha8Rng, config: &SelftestConfig) {
    let tol = config.tolerance;
    let d1 = pick(rng, 2, 4);
    let d2 = pick(rng, 2, 4);
    let rho12 = random_density_with(rng, d1 * d2, d1 * d2)
        .expect("full-rank composite state construction succeeds")
        .with_bipartite_dims(d1, d2)
        .expect("composite dimensions match");

    let rho1 = partial_trace(&rho12, Subsystem::One).expect("left reduction computes");
    let h = HermitianOperator::new(rho1.matrix().clone())
        .expect("reduced state is a valid Hermitian operator");
    let a = spectral_decompose(&h, default_cluster_tol(&h)).expect("reduced state diagonalizes");

    let check = correlations_incompatibility(&a, &rho12, Subsystem::One, tol)
        .expect("correlations-incompatibility check computes");
    // Only clearly obstructed instances certify anything; a generic full-rank
    // composite state essentially always is, but skipping borderline draws
    // keeps the check deterministic and sharp.
    if check.composite_residual > 100.0 * tol {
        let embedded = a.embed(Subsystem::One, d2);
        let ec = coherence_entropy(&embedded, &rho12).expect("coherence entropy computes");
        let projectors: Vec<Projector> =
            embedded.branches().iter().map(|b| b.projector.clone()).collect();
        let measured = luders_state(&rho12, &projectors).expect("measured state computes");
        let surviving = mutual_information(&measured).expect("measured state is bipartite");
        let total = mutual_information(&rho12).expect("state is bipartite");
        let defect = (total - ec - surviving).abs().max(check.reduced_residual);
        acc.observe(Check::CoherenceInMutualInformation, defect);
    }
}

/// Mixing components confined to mutually orthogonal blocks on both sides:
/// the mutual information of the mixture must equal the mixing entropy plus
/// the mean component mutual information.
fn biorthogonal_instance(acc: &mut Accumulator, rng: &mut ChaCha8Rng, config: &SelftestConfig) {
    let blocks = pick(rng, 2, 3);
    let sizes1: Vec<usize> = (0..blocks).map(|_| pick(rng, 1, 2)).collect();
    let sizes2: Vec<usize> = (0..blocks).map(|_| pick(rng, 1, 2)).collect();
    let d1: usize = sizes1.iter().sum();
    let d2: usize = sizes2.iter().sum();

    let mut offsets1 = vec![0usize; blocks];
    let mut offsets2 = vec![0usize; blocks];
    for k in 1..blocks {
        offsets1[k] = offsets1[k - 1] + sizes1[k - 1];
        offsets2[k] = offsets2[k - 1] + sizes2[k - 1];
    }

    let mut weights: Vec<f64> = (0..blocks).map(|_| 0.1 + rng.gen::<f64>()).collect();
    let weight_sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= weight_sum;
    }

    let span_projector = |dim: usize, offset: usize, size: usize| {
        let mut p = CMatrix::zeros(dim, dim);
        for i in offset..offset + size {
            p[(i, i)] = C64::new(1.0, 0.0);
        }
        Projector::new(p).expect("block projector is valid")
    };

    let mut components = Vec::with_capacity(blocks);
    let mut p1_set = Vec::with_capacity(blocks);
    let mut q2_set = Vec::with_capacity(blocks);
    for k in 0..blocks {
        let (b1, b2) = (sizes1[k], sizes2[k]);
        let local_dim = b1 * b2;
        let local_rank = pick(rng, 1, local_dim);
        let local = random_density_with(rng, local_dim, local_rank)
            .expect("block state construction succeeds");
        let mut m = CMatrix::zeros(d1 * d2, d1 * d2);
        for i1 in 0..b1 {
            for i2 in 0..b2 {
                for j1 in 0..b1 {
                    for j2 in 0..b2 {
                        let row = (offsets1[k] + i1) * d2 + (offsets2[k] + i2);
                        let col = (offsets1[k] + j1) * d2 + (offsets2[k] + j2);
                        m[(row, col)] = local.matrix()[(i1 * b2 + i2, j1 * b2 + j2)];
                    }
                }
            }
        }
        let component = DensityOperator::new(m)
            .expect("embedded block state is valid")
            .with_bipartite_dims(d1, d2)
            .expect("embedded block dimensions match");
        components.push((weights[k], component));
        p1_set.push(span_projector(d1, offsets1[k], sizes1[k]));
        q2_set.push(span_projector(d2, offsets2[k], sizes2[k]));
    }

    let (lhs, rhs) = biorthogonal_mixture_info(&components, &p1_set, &q2_set, config.tolerance)
        .expect("biorthogonal mixing identity computes");
    acc.observe(Check::BiorthogonalMixing, (lhs - rhs).abs());
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SelftestConfig {
        SelftestConfig { seed: 11, trials: 4, max_dim: 5, ..SelftestConfig::default() }
    }

    #[test]
    fn selftest_is_deterministic_across_runs() {
        let config = small_config();
        let first = run_selftest(&config);
        let second = run_selftest(&config);
        assert!(first.panics.is_empty(), "panics: {:?}", first.panics);
        for (a, b) in first.records.iter().zip(second.records.iter()) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.instances, b.instances);
            assert_eq!(
                a.max_residual.to_bits(),
                b.max_residual.to_bits(),
                "residuals of {} differ between identical runs",
                a.name
            );
        }
    }

    #[test]
    fn selftest_passes_on_small_run() {
        let report = run_selftest(&small_config());
        assert!(report.panics.is_empty(), "panics: {:?}", report.panics);
        for record in &report.records {
            assert!(
                record.pass,
                "{} failed: max residual {:.3e} over {} instances (tolerance {:.1e})",
                record.name, record.max_residual, record.instances, record.tolerance
            );
            assert!(record.instances > 0, "{} never ran", record.name);
        }
        assert!(report.all_pass());
    }

    #[test]
    fn every_check_reports_exactly_once() {
        let report = run_selftest(&small_config());
        assert_eq!(report.records.len(), CHECK_COUNT);
        let mut names: Vec<&str> = report.records.iter().map(|r| r.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), CHECK_COUNT, "record names must be unique");
    }

    #[test]
    fn golden_case_only_contributes_on_first_trial() {
        let config = SelftestConfig { trials: 1, ..small_config() };
        let report = run_selftest(&config);
        let golden = report
            .records
            .iter()
            .find(|r| r.name == "bell_golden_case")
            .expect("golden record present");
        assert_eq!(golden.instances, 1);
        assert_eq!(golden.tolerance, GOLDEN_CASE_TOL);
    }
}
