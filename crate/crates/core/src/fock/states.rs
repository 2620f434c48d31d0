use num_complex::Complex64 as C64;

use crate::error::{QotError, Result};
use crate::linalg::{exp_antihermitian, ComplexMatrix};
use crate::states::DensityMatrix;

use super::mode::lowering;

/// Largest truncated tail mass a Fock construction accepts.
pub const TAIL_LIMIT: f64 = 1e-3;

/// Tail mass above which a warning is logged.
pub const TAIL_WARN: f64 = 1e-6;

pub(crate) fn check_tail(tail: f64) -> Result<()> {
    if tail > TAIL_LIMIT {
        return Err(QotError::TruncationBudget {
            tail,
            limit: TAIL_LIMIT,
        });
    }
    if tail >= TAIL_WARN {
        log::warn!("truncated tail mass {tail:.3e}");
    }
    Ok(())
}

/// Thermal parameter `ν >= 1/2` (covariance `ν I`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalParam {
    nu: f64,
}

impl ThermalParam {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu >= 0.5) || !nu.is_finite() {
            return Err(QotError::InvalidParameter(format!("thermal ν = {nu} must be >= 1/2")));
        }
        Ok(Self { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Boltzmann ratio `(2ν-1)/(2ν+1)`.
    pub fn q(&self) -> f64 {
        (2.0 * self.nu - 1.0) / (2.0 * self.nu + 1.0)
    }

    /// Mean photon number `ν - 1/2`.
    pub fn mean_photons(&self) -> f64 {
        self.nu - 0.5
    }

    /// Mass above the cutoff before renormalization, `q^d`.
    pub fn tail(&self, d: usize) -> f64 {
        self.q().powi(d as i32)
    }
}

/// Thermal state `ω(ν)` at cutoff `d`; refuses when `q^d` exceeds [`TAIL_LIMIT`].
pub fn thermal_state(nu: f64, d: usize) -> Result<DensityMatrix> {
    let t = ThermalParam::new(nu)?;
    if d == 0 {
        return Err(QotError::InvalidParameter("cutoff must be positive".into()));
    }
    check_tail(t.tail(d))?;
    let q = t.q();
    let probs: Vec<f64> = (0..d).map(|n| q.powi(n as i32)).collect();
    DensityMatrix::diagonal(&probs)
}

/// `P(N >= d)` for a Poisson variable of mean `|z|²`.
pub fn coherent_tail(z: C64, d: usize) -> f64 {
    let m = z.norm_sqr();
    if m == 0.0 {
        return 0.0;
    }
    // Sum the tail directly from the log of the first omitted term.
    let mut log_term = -m + d as f64 * m.ln() - ln_factorial(d);
    let mut total = 0.0;
    let mut n = d;
    loop {
        let t = log_term.exp();
        total += t;
        n += 1;
        if t < 1e-18 * total.max(1e-300) && n as f64 > m {
            break;
        }
        if n > d + 10_000 {
            break;
        }
        log_term += m.ln() - (n as f64).ln();
    }
    total.min(1.0)
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Untruncated coherent amplitudes `e^{-|z|²/2} zⁿ/√(n!)` for `n < d`.
pub fn coherent_amplitudes(z: C64, d: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(d);
    let mut c = C64::new((-z.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..d {
        out.push(c);
        c = c * z / ((n + 1) as f64).sqrt();
    }
    out
}

/// Coherent state `|z><z|` truncated to `d` levels and renormalized.
pub fn coherent_state(z: C64, d: usize) -> Result<DensityMatrix> {
    check_tail(coherent_tail(z, d))?;
    DensityMatrix::pure(&coherent_amplitudes(z, d))
}

/// `D(z) = exp(z a† - z̄ a)` with the generator truncated at `d`.
pub fn displacement(z: C64, d: usize) -> Result<ComplexMatrix> {
    let a = lowering(d);
    let g = &a.adjoint().scale_c(z) - &a.scale_c(z.conj());
    exp_antihermitian(&g)
}

/// Extra levels used internally when displacing a state by `z`.
pub(crate) fn displacement_headroom(z: C64) -> usize {
    30 + (4.0 * z.norm_sqr() + 6.0 * z.norm()).ceil() as usize
}

/// `D(z) ρ D(z)†` evaluated at an enlarged cutoff, truncated back to `d` and
/// renormalized. Returns the state and the discarded mass.
pub fn displace_state(rho: &DensityMatrix, z: C64, d: usize) -> Result<(DensityMatrix, f64)> {
    let big = d.max(rho.dim()) + displacement_headroom(z);
    let u = displacement(z, big)?;
    let padded = rho.matrix().pad(big, big);
    let out = u.matmul(&padded).matmul(&u.adjoint()).corner(d, d);
    let tail = (1.0 - out.trace().re).max(0.0);
    check_tail(tail)?;
    Ok((DensityMatrix::from_unnormalized(out)?, tail))
}

/// Thermal state displaced by `z`, both at cutoff `d`.
pub fn displaced_thermal(nu: f64, z: C64, d: usize) -> Result<(DensityMatrix, f64)> {
    let t = ThermalParam::new(nu)?;
    let base = thermal_state(nu, d)?;
    let (out, tail) = displace_state(&base, z, d)?;
    Ok((out, tail + t.tail(d)))
}
