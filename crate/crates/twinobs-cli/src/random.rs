//! Deterministic random instances: states, observables, vectors.
//!
//! All sampling runs on ChaCha8 — a fixed, portable keystream, so the same
//! seed reproduces the same instances on every platform. Parallel harnesses
//! give trial `t` its own independent generator via [`trial_rng`], which
//! selects stream `t` of the seeded cipher rather than splitting one
//! sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use twinobs::operator::{default_cluster_tol, spectral_decompose, HermitianOperator};
use twinobs::{
    CMatrix, CVector, DensityOperator, Error, Projector, Result, SpectralForm, C64,
};

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for one trial of a multi-trial run.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Standard complex normal entry (real and imaginary parts independent
/// N(0, 1)).
pub fn standard_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| standard_complex(rng))
}

/// Haar-distributed-in-practice unitary via Gram-Schmidt on a Ginibre draw.
pub fn random_unitary_with(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
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
                ok = false; // a measure-zero draw; resample
                break;
            }
            columns.push(v / C64::new(norm, 0.0));
        }
        if ok {
            return CMatrix::from_columns(&columns);
        }
    }
}

/// Random state of exactly the requested rank: `G G^dagger / tr` with `G`
/// a `dim x rank` standard complex normal matrix.
pub fn random_density_with(
    rng: &mut ChaCha8Rng,
    dim: usize,
    rank: usize,
) -> Result<DensityOperator> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidInput(format!(
            "rank must lie in 1..={dim}, got {rank}"
        )));
    }
    let g = ginibre(rng, dim, rank);
    let m = &g * g.adjoint();
    let trace = m.trace();
    DensityOperator::new(m / trace)
}

/// Seeded one-shot variant of [`random_density_with`].
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    random_density_with(&mut rng_for(seed), dim, rank)
}

/// Random normalized bipartite vector (row-major composite index
/// `i1 * d2 + i2`). With `schmidt_rank` given, exactly that many Schmidt
/// coefficients exceed 1e-10 — the vector is assembled from orthonormal
/// bases with coefficients bounded away from zero. Without it, the draw is
/// a generic normalized Gaussian vector.
pub fn random_pure_bipartite_with(
    rng: &mut ChaCha8Rng,
    d1: usize,
    d2: usize,
    schmidt_rank: Option<usize>,
) -> Result<CVector> {
    let full = d1.min(d2);
    let Some(rank) = schmidt_rank else {
        let v = CVector::from_fn(d1 * d2, |_, _| standard_complex(rng));
        let norm = v.norm();
        return Ok(v / C64::new(norm, 0.0));
    };
    if rank == 0 || rank > full {
        return Err(Error::InvalidInput(format!(
            "schmidt rank must lie in 1..={full}, got {rank}"
        )));
    }
    let u = random_unitary_with(rng, d1);
    let w = random_unitary_with(rng, d2);
    let mut coefficients: Vec<f64> = (0..rank)
        .map(|_| rng.sample::<f64, _>(StandardNormal).abs() + 0.1)
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
    Ok(phi)
}

/// Seeded one-shot variant of [`random_pure_bipartite_with`].
pub fn random_pure_bipartite(
    d1: usize,
    d2: usize,
    seed: u64,
    schmidt_rank: Option<usize>,
) -> Result<CVector> {
    random_pure_bipartite_with(&mut rng_for(seed), d1, d2, schmidt_rank)
}

/// Random observable with the given number of distinct eigenvalues
/// (`1, 2, ...`), eigenspaces tiling the space with near-equal ranks in a
/// random basis.
pub fn random_observable_with(
    rng: &mut ChaCha8Rng,
    dim: usize,
    branches: usize,
) -> Result<SpectralForm> {
    if branches == 0 || branches > dim {
        return Err(Error::InvalidInput(format!(
            "branch count must lie in 1..={dim}, got {branches}"
        )));
    }
    let u = random_unitary_with(rng, dim);
    let eigenvalues = CVector::from_fn(dim, |i, _| C64::new(((i % branches) + 1) as f64, 0.0));
    let h = HermitianOperator::new(&u * CMatrix::from_diagonal(&eigenvalues) * u.adjoint())?;
    let tol = default_cluster_tol(&h);
    spectral_decompose(&h, tol)
}

/// Random projector of the given rank (span of `rank` columns of a random
/// unitary).
pub fn random_projector_with(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> Result<Projector> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidInput(format!(
            "rank must lie in 1..={dim}, got {rank}"
        )));
    }
    let u = random_unitary_with(rng, dim);
    let columns: Vec<CVector> = (0..rank).map(|j| u.column(j).into_owned()).collect();
    Projector::from_orthonormal_basis(&columns)
}

/// Uniform draw from an inclusive range.
pub fn pick(rng: &mut ChaCha8Rng, low: usize, high: usize) -> usize {
    rng.gen_range(low..=high)
}

#[cfg(test)]
mod tests {
    use super::*;
    use twinobs::entropy::von_neumann_entropy;
    use twinobs::tolerance;
    use twinobs::twins::schmidt_decompose;

    #[test]
    fn density_is_deterministic_and_rank_exact() {
        let a = random_density(5, 2, 42).unwrap();
        let b = random_density(5, 2, 42).unwrap();
        assert_eq!(a.matrix(), b.matrix(), "same seed must be bit-identical");

        let eigenvalues = a.eigenvalues();
        assert!(eigenvalues[..3].iter().all(|&x| x.abs() < 1e-10));
        assert!(eigenvalues[3..].iter().all(|&x| x > 1e-10));

        let pure = random_density(4, 1, 9).unwrap();
        assert!(von_neumann_entropy(&pure) < 1e-10);
    }

    #[test]
    fn pure_bipartite_has_requested_schmidt_rank() {
        for rank in 1..=3 {
            let phi = random_pure_bipartite(3, 4, 7, Some(rank)).unwrap();
            assert!((phi.norm() - 1.0).abs() < 1e-12);
            let schmidt = schmidt_decompose(&phi, (3, 4), tolerance::SCHMIDT).unwrap();
            assert_eq!(schmidt.rank(), rank);
        }
        let generic = random_pure_bipartite(3, 4, 7, None).unwrap();
        assert!((generic.norm() - 1.0).abs() < 1e-12);
        assert!(random_pure_bipartite(3, 4, 7, Some(4)).is_err());
    }

    #[test]
    fn trial_streams_are_independent_but_reproducible() {
        let mut a = trial_rng(3, 0);
        let mut b = trial_rng(3, 1);
        let mut a2 = trial_rng(3, 0);
        let x: f64 = a.gen();
        let y: f64 = b.gen();
        let x2: f64 = a2.gen();
        assert_ne!(x, y);
        assert_eq!(x, x2);
    }

    #[test]
    fn observables_tile_the_space() {
        let mut rng = rng_for(11);
        let a = random_observable_with(&mut rng, 6, 3).unwrap();
        assert_eq!(a.branches().len(), 3);
        let ranks: usize = a.branches().iter().map(|b| b.projector.rank()).sum();
        assert_eq!(ranks, 6);
    }
}
