//! Seeded random states, channels and observables.
//!
//! All generators take an explicit RNG; the `*_seeded` helpers build a
//! `ChaCha8Rng` from a `u64` so that a seed fully determines the output.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{QotError, Result};
use crate::linalg::{psd_inv_sqrt, ComplexMatrix};

use super::channel::KrausChannel;
use super::density::DensityMatrix;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of the named substream `name` of `seed` (FNV-1a over both).
pub fn derive_seed(seed: u64, name: &str) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for b in seed.to_le_bytes().iter().chain(name.as_bytes()) {
        h ^= *b as u64;
        h = h.wrapping_mul(PRIME);
    }
    h
}

/// Matrix with i.i.d. standard complex normal entries (`E|z|² = 1`).
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

/// `G G† / Tr(G G†)` with `G` a `d × rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if rank == 0 || rank > d {
        return Err(QotError::InvalidParameter(format!("rank {rank} outside 1..={d}")));
    }
    let g = ginibre(d, rank, rng);
    DensityMatrix::from_unnormalized(g.matmul(&g.adjoint()))
}

pub fn random_density_seeded(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density(d, rank, &mut rng_from_seed(seed))
}

/// Hermitian `(G + G†)/2` from a Ginibre `G`.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(d, d, rng);
    (&g + &g.adjoint()).scale(0.5)
}

/// Channel with `n_kraus` operators from a random isometry `V = G (G†G)^{-1/2}`.
pub fn random_channel<R: Rng + ?Sized>(
    in_dim: usize,
    out_dim: usize,
    n_kraus: usize,
    rng: &mut R,
) -> Result<KrausChannel> {
    if n_kraus == 0 || n_kraus * out_dim < in_dim {
        return Err(QotError::InvalidParameter(format!(
            "{n_kraus} Kraus operators of shape {out_dim}x{in_dim} cannot be trace preserving"
        )));
    }
    let g = ginibre(n_kraus * out_dim, in_dim, rng);
    let (inv_sqrt, _) = psd_inv_sqrt(&g.adjoint().matmul(&g), 0.0)?;
    let v = g.matmul(&inv_sqrt);
    let rows: Vec<usize> = (0..in_dim).collect();
    let kraus = (0..n_kraus)
        .map(|k| {
            let idx: Vec<usize> = (k * out_dim..(k + 1) * out_dim).collect();
            v.submatrix(&idx, &rows)
        })
        .collect();
    KrausChannel::new(kraus)
}

/// Haar-random unitary (QR of a Ginibre matrix, via the polar factor).
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let g = ginibre(d, d, rng);
    let (inv_sqrt, _) = psd_inv_sqrt(&g.adjoint().matmul(&g), 0.0)?;
    Ok(g.matmul(&inv_sqrt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_state() {
        let rho = random_density_seeded(1, 1, 3).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = random_density_seeded(4, 2, 11).unwrap();
        let b = random_density_seeded(4, 2, 11).unwrap();
        assert_eq!(a, b);
        let c = random_density_seeded(4, 2, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rank_matches() {
        for r in 1..=5 {
            let rho = random_density_seeded(5, r, 100 + r as u64).unwrap();
            assert_eq!(rho.rank(1e-12), r);
        }
    }

    #[test]
    fn random_channel_is_trace_preserving() {
        let mut rng = rng_from_seed(5);
        let ch = random_channel(3, 3, 2, &mut rng).unwrap();
        assert!(ch.kraus_sum().approx_eq(&ComplexMatrix::identity(3), 1e-12));
    }

    #[test]
    fn derived_seeds_differ_by_name() {
        assert_ne!(derive_seed(7, "triangle"), derive_seed(7, "stam"));
        assert_eq!(derive_seed(7, "stam"), derive_seed(7, "stam"));
    }
}
