//! Shared helpers for the integration tests: an independent eigenvalue
//! oracle and deterministic random instance builders.
#![allow(dead_code)]

use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twinobs::operator::{spectral_decompose, HermitianOperator};
use twinobs::{CMatrix, CVector, DensityOperator, SpectralForm, C64};

/// Eigenvalues (ascending) of a Hermitian matrix by classical Jacobi
/// rotations — deliberately a different algorithm from the library's
/// tridiagonalization-based solver, so the two can vouch for each other.
///
/// Each step zeroes the largest off-diagonal element `a_pq = r e^{i phi}`
/// with the unitary that is the identity outside rows/columns `p, q` and
/// `[[c, s e^{i phi}], [-s e^{-i phi}, c]]` inside them; quadratic
/// convergence makes the tolerance easily reachable. Panics if it fails to
/// converge, which for a genuinely Hermitian input it does not.
// Pivot search and plane rotations address entries by (row, column) pairs;
// index loops state that more directly than iterator chains would.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "matrix must be square");
    let mut a: Vec<Vec<Complex<f64>>> = (0..n)
        .map(|i| (0..n).map(|j| (m[(i, j)] + m[(j, i)].conj()) * 0.5).collect())
        .collect();

    let scale: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| a[i][j].norm())
        .fold(1.0, f64::max);
    let threshold = 1e-15 * scale;

    let max_rotations = 100 * n * n + 100;
    for _ in 0..max_rotations {
        let mut p = 0;
        let mut q = 1;
        let mut largest = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let v = a[i][j].norm();
                if v > largest {
                    largest = v;
                    p = i;
                    q = j;
                }
            }
        }
        if largest <= threshold {
            let mut eigenvalues: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
            eigenvalues.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
            return eigenvalues;
        }

        let apq = a[p][q];
        let r = apq.norm();
        let phase = apq / r;
        let app = a[p][p].re;
        let aqq = a[q][q].re;
        // tan(theta) solving t^2 - 2 tau t - 1 = 0, smaller-magnitude root
        let tau = (app - aqq) / (2.0 * r);
        let t = -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = t * c;

        for k in 0..n {
            if k == p || k == q {
                continue;
            }
            let akp = a[k][p];
            let akq = a[k][q];
            a[k][p] = akp * c - akq * s * phase.conj();
            a[k][q] = akp * s * phase + akq * c;
            a[p][k] = a[k][p].conj();
            a[q][k] = a[k][q].conj();
        }
        a[p][p] = Complex::new(c * c * app - 2.0 * c * s * r + s * s * aqq, 0.0);
        a[q][q] = Complex::new(s * s * app + 2.0 * c * s * r + c * c * aqq, 0.0);
        a[p][q] = Complex::new(0.0, 0.0);
        a[q][p] = Complex::new(0.0, 0.0);
    }
    panic!("Jacobi eigensolver did not converge — input was not Hermitian enough");
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian entry via Box-Muller.
pub fn gaussian_c64(rng: &mut ChaCha8Rng) -> C64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = 2.0 * std::f64::consts::PI * u2;
    C64::new(radius * angle.cos(), radius * angle.sin())
}

pub fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian_c64(rng))
}

/// Haar-ish random unitary: Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    loop {
        let g = ginibre(rng, dim, dim);
        let mut columns: Vec<CVector> = Vec::with_capacity(dim);
        let mut ok = true;
        for j in 0..dim {
            let mut v: CVector = g.column(j).into_owned();
            for u in &columns {
                let overlap = u.dotc(&v);
                v -= u * overlap;
            }
            let norm = v.norm();
            if norm < 1e-8 {
                ok = false; // essentially impossible, but stay exact
                break;
            }
            columns.push(v / C64::new(norm, 0.0));
        }
        if ok {
            return CMatrix::from_columns(&columns);
        }
    }
}

/// Random full-validated density operator of the given rank (Ginibre
/// construction `G G^dagger / tr`).
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> DensityOperator {
    assert!(rank >= 1 && rank <= dim);
    let g = ginibre(rng, dim, rank);
    let m = &g * g.adjoint();
    let trace = m.trace();
    DensityOperator::new(m / trace).expect("Ginibre construction yields a valid state")
}

/// Random observable with `branches` distinct eigenvalues whose eigenspaces
/// tile the space (ranks as equal as the dimension allows).
pub fn random_observable(rng: &mut ChaCha8Rng, dim: usize, branches: usize) -> SpectralForm {
    assert!(branches >= 1 && branches <= dim);
    let u = random_unitary(rng, dim);
    let mut eigenvalues = CVector::zeros(dim);
    for i in 0..dim {
        // i mod branches assigns near-equal multiplicities
        eigenvalues[i] = C64::new(((i % branches) + 1) as f64, 0.0);
    }
    let h = &u * CMatrix::from_diagonal(&eigenvalues) * u.adjoint();
    let h = HermitianOperator::new(h).expect("unitary conjugation preserves hermiticity");
    let tol = twinobs::operator::default_cluster_tol(&h);
    spectral_decompose(&h, tol).expect("construction has well-separated eigenvalues")
}

/// Random bipartite pure state with an exactly known Schmidt rank:
/// coefficients are bounded away from zero and the bases are orthonormal by
/// construction. Returns the vector in row-major composite indexing.
pub fn random_pure_bipartite(
    rng: &mut ChaCha8Rng,
    d1: usize,
    d2: usize,
    rank: usize,
) -> CVector {
    assert!(rank >= 1 && rank <= d1.min(d2));
    let u = random_unitary(rng, d1);
    let w = random_unitary(rng, d2);
    let mut coefficients: Vec<f64> = (0..rank)
        .map(|_| gaussian_c64(rng).re.abs() + 0.1)
        .collect();
    let norm: f64 = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
    for c in &mut coefficients {
        *c /= norm;
    }
    let mut phi = CVector::zeros(d1 * d2);
    for (k, &c) in coefficients.iter().enumerate() {
        for i1 in 0..d1 {
            for i2 in 0..d2 {
                phi[i1 * d2 + i2] += C64::new(c, 0.0) * u[(i1, k)] * w[(i2, k)];
            }
        }
    }
    phi
}
