//! Beamsplitter and two-mode squeezer, attenuator and amplifier.
//!
//! Both unitaries conserve a photon-number combination (`n_a + n_b` for the
//! beamsplitter, `n_a - n_b` for the squeezer), so they are exponentiated
//! sector by sector on the untruncated ladder. Beamsplitter sectors are
//! finite and exact; squeezer sectors are cut at a depth chosen so the
//! neglected amplitude is below `1e-10`.

use std::collections::HashMap;

use num_complex::Complex64 as C64;

use crate::error::{QotError, Result};
use crate::linalg::{exp_antihermitian, partial_trace, ComplexMatrix, Factor};
use crate::states::{DensityMatrix, KrausChannel};

use super::states::check_tail;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwoModeKind {
    /// Transmissivity `η ∈ [0, 1]`, generator `arccos√η (a†b - b†a)`.
    Beamsplitter { eta: f64 },
    /// Gain `κ >= 1`, generator `arccosh√κ (a†b† - ab)`.
    Squeezer { kappa: f64 },
}

impl TwoModeKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TwoModeKind::Beamsplitter { eta } if !(0.0..=1.0).contains(&eta) => Err(
                QotError::InvalidParameter(format!("transmissivity η = {eta} outside [0, 1]")),
            ),
            TwoModeKind::Squeezer { kappa } if !(kappa >= 1.0) || !kappa.is_finite() => Err(
                QotError::InvalidParameter(format!("gain κ = {kappa} must be >= 1")),
            ),
            _ => Ok(()),
        }
    }

    fn angle(&self) -> f64 {
        match *self {
            TwoModeKind::Beamsplitter { eta } => eta.sqrt().acos(),
            TwoModeKind::Squeezer { kappa } => kappa.sqrt().acosh(),
        }
    }

    /// Sector key and position inside the sector.
    fn locate(&self, na: usize, nb: usize) -> (i64, usize) {
        match self {
            TwoModeKind::Beamsplitter { .. } => ((na + nb) as i64, na),
            TwoModeKind::Squeezer { .. } => (na as i64 - nb as i64, na.min(nb)),
        }
    }

    fn state(&self, key: i64, t: usize) -> (usize, usize) {
        match self {
            TwoModeKind::Beamsplitter { .. } => (t, key as usize - t),
            TwoModeKind::Squeezer { .. } => {
                let (sa, sb) = (key.max(0) as usize, (-key).max(0) as usize);
                (t + sa, t + sb)
            }
        }
    }

    /// Levels beyond the needed ones kept in a squeezer sector.
    fn depth_margin(&self) -> usize {
        match *self {
            TwoModeKind::Beamsplitter { .. } => 0,
            TwoModeKind::Squeezer { kappa } => {
                if kappa == 1.0 {
                    return 0;
                }
                // amplitude ratio per level is tanh θ = √((κ-1)/κ)
                let r = ((kappa - 1.0) / kappa).sqrt();
                let m = (10.0 * std::f64::consts::LN_10 / -r.ln()).ceil() as usize;
                (m + 10).min(2000)
            }
        }
    }
}

/// Sector blocks of the exact unitary, built on demand.
struct SectorUnitary {
    kind: TwoModeKind,
    theta: f64,
    depth: usize,
    blocks: HashMap<i64, ComplexMatrix>,
}

impl SectorUnitary {
    /// `depth` bounds the in-sector position needed on either side.
    fn new(kind: TwoModeKind, depth: usize) -> Result<Self> {
        kind.validate()?;
        Ok(Self {
            kind,
            theta: kind.angle(),
            depth: depth + kind.depth_margin(),
            blocks: HashMap::new(),
        })
    }

    fn block(&mut self, key: i64) -> Result<&ComplexMatrix> {
        if !self.blocks.contains_key(&key) {
            let (size, coupling): (usize, Box<dyn Fn(usize) -> f64>) = match self.kind {
                TwoModeKind::Beamsplitter { .. } => {
                    let n = key as usize;
                    // a†b |t, n-t> = √((t+1)(n-t)) |t+1, n-t-1>
                    (n + 1, Box::new(move |t| (((t + 1) * (n - t)) as f64).sqrt()))
                }
                TwoModeKind::Squeezer { .. } => {
                    let (sa, sb) = (key.max(0) as usize, (-key).max(0) as usize);
                    // a†b† |t+sa, t+sb> = √((t+sa+1)(t+sb+1)) |t+sa+1, t+sb+1>
                    (self.depth, Box::new(move |t| (((t + sa + 1) * (t + sb + 1)) as f64).sqrt()))
                }
            };
            let mut g = ComplexMatrix::zeros(size, size);
            for t in 0..size.saturating_sub(1) {
                let c = self.theta * coupling(t);
                g[(t + 1, t)] = C64::new(c, 0.0);
                g[(t, t + 1)] = C64::new(-c, 0.0);
            }
            self.blocks.insert(key, exp_antihermitian(&g)?);
        }
        Ok(&self.blocks[&key])
    }

    /// Nonzero amplitudes `<m_a, m_b| U |n_a, n_b>` for all outputs in the sector.
    fn column(&mut self, na: usize, nb: usize) -> Result<Vec<(usize, usize, C64)>> {
        let kind = self.kind;
        let (key, t) = kind.locate(na, nb);
        let block = self.block(key)?;
        let mut out = Vec::new();
        for r in 0..block.rows() {
            let amp = block[(r, t)];
            if amp.norm() > 0.0 {
                let (ma, mb) = kind.state(key, r);
                out.push((ma, mb, amp));
            }
        }
        Ok(out)
    }
}

/// Compression of the two-mode unitary to `d` levels per mode, indexed
/// `(n_a, n_b) ↦ n_a d + n_b`.
pub fn two_mode_unitary(kind: TwoModeKind, d: usize) -> Result<ComplexMatrix> {
    let mut su = SectorUnitary::new(kind, d)?;
    let mut u = ComplexMatrix::zeros(d * d, d * d);
    for na in 0..d {
        for nb in 0..d {
            for (ma, mb, amp) in su.column(na, nb)? {
                if ma < d && mb < d {
                    u[(ma * d + mb, na * d + nb)] = amp;
                }
            }
        }
    }
    Ok(u)
}

/// Output of mode `a` after `U (ρ_a ⊗ ρ_b) U†`, truncated to `d_out` levels
/// and renormalized, together with the discarded mass.
pub fn mix_two_modes(
    kind: TwoModeKind,
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    d_out: usize,
) -> Result<(DensityMatrix, f64)> {
    let (da, db) = (rho_a.dim(), rho_b.dim());
    let (w, mb_dim) = isometry_block(kind, da, db, d_out)?;
    let rho_in = rho_a.tensor(rho_b);
    let y = w.matmul(rho_in.matrix()).matmul(&w.adjoint());
    let out = partial_trace(&y, d_out, mb_dim, Factor::Second)?;
    let tail = (1.0 - out.trace().re).max(0.0);
    check_tail(tail)?;
    Ok((DensityMatrix::from_unnormalized(out)?, tail))
}

/// Matrix `<m_a, m_b|U|n_a, n_b>` for `m_a < d_out` and every reachable `m_b`.
fn isometry_block(kind: TwoModeKind, da: usize, db: usize, d_out: usize) -> Result<(ComplexMatrix, usize)> {
    let mut su = SectorUnitary::new(kind, da.max(db).max(d_out))?;
    let mut cols = Vec::with_capacity(da * db);
    let mut mb_max = 0;
    for na in 0..da {
        for nb in 0..db {
            let col: Vec<_> = su.column(na, nb)?.into_iter().filter(|&(ma, _, _)| ma < d_out).collect();
            mb_max = col.iter().map(|&(_, mb, _)| mb).fold(mb_max, usize::max);
            cols.push(col);
        }
    }
    let mb_dim = mb_max + 1;
    let mut w = ComplexMatrix::zeros(d_out * mb_dim, da * db);
    for (c, col) in cols.into_iter().enumerate() {
        for (ma, mb, amp) in col {
            w[(ma * mb_dim + mb, c)] = amp;
        }
    }
    Ok((w, mb_dim))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaussianChannelKind {
    Attenuator { eta: f64 },
    Amplifier { kappa: f64 },
}

impl GaussianChannelKind {
    fn unitary(&self) -> TwoModeKind {
        match *self {
            GaussianChannelKind::Attenuator { eta } => TwoModeKind::Beamsplitter { eta },
            GaussianChannelKind::Amplifier { kappa } => TwoModeKind::Squeezer { kappa },
        }
    }
}

/// Kraus operators `K_j[m, n] = <m, j|U|n, 0>` from `d_in` to `d_out` levels,
/// with `j` over every ancilla level reached.
pub fn gaussian_kraus(kind: GaussianChannelKind, d_in: usize, d_out: usize) -> Result<Vec<ComplexMatrix>> {
    let (w, mb_dim) = isometry_block(kind.unitary(), d_in, 1, d_out)?;
    Ok((0..mb_dim)
        .map(|j| ComplexMatrix::from_fn(d_out, d_in, |m, n| w[(m * mb_dim + j, n)]))
        .filter(|k| k.max_abs() > 0.0)
        .collect())
}

/// The channel as a trace-preserving [`KrausChannel`] at cutoff `d`.
///
/// The attenuator is exact. Amplifier operators lose the mass pushed above
/// the cutoff; they are renormalized and the returned operator `L = I - ΣK†K`
/// (before renormalization) measures the loss, `Tr[ρ L]` for input `ρ`.
pub fn gaussian_kraus_channel(kind: GaussianChannelKind, d: usize) -> Result<(KrausChannel, ComplexMatrix)> {
    let kraus = gaussian_kraus(kind, d, d)?;
    match kind {
        GaussianChannelKind::Attenuator { .. } => Ok((KrausChannel::new(kraus)?, ComplexMatrix::zeros(d, d))),
        GaussianChannelKind::Amplifier { .. } => KrausChannel::renormalized(kraus),
    }
}

/// `E_η(ρ)` or `A_κ(ρ)` through the Stinespring dilation with a vacuum
/// ancilla; errors when the output tail mass exceeds the truncation limit.
pub fn gaussian_channel(kind: GaussianChannelKind, rho: &DensityMatrix, d: usize) -> Result<DensityMatrix> {
    Ok(gaussian_channel_with_tail(kind, rho, d)?.0)
}

pub fn gaussian_channel_with_tail(
    kind: GaussianChannelKind,
    rho: &DensityMatrix,
    d: usize,
) -> Result<(DensityMatrix, f64)> {
    mix_two_modes(kind.unitary(), rho, &DensityMatrix::basis(1, 0)?, d)
}
