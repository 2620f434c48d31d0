use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{QotError, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix};

/// Symplectic form `Δ = ⊕ [[0, 1], [-1, 0]]` in the ordering `(Q₁, P₁, Q₂, P₂, …)`.
pub fn symplectic_form(modes: usize) -> Vec<f64> {
    let n = 2 * modes;
    let mut out = vec![0.0; n * n];
    for k in 0..modes {
        out[(2 * k) * n + 2 * k + 1] = 1.0;
        out[(2 * k + 1) * n + 2 * k] = -1.0;
    }
    out
}

/// First and second moments of a Gaussian state on `m` modes.
///
/// Modes flagged as dual carry `-Δ` in the uncertainty relation, which is
/// how the `H*` factor of a coupling enters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianCov {
    pub modes: usize,
    pub mean: Vec<f64>,
    /// Row-major `2m × 2m`.
    pub cov: Vec<f64>,
    #[serde(default)]
    pub dual: Vec<bool>,
}

impl GaussianCov {
    pub fn new(mean: Vec<f64>, cov: Vec<f64>, dual: Vec<bool>) -> Result<Self> {
        let n = mean.len();
        if n % 2 != 0 || cov.len() != n * n || dual.len() != n / 2 {
            return Err(QotError::Dimension(format!(
                "Gaussian moments: mean {n}, cov {}, dual flags {}",
                cov.len(),
                dual.len()
            )));
        }
        for i in 0..n {
            for j in 0..i {
                if (cov[i * n + j] - cov[j * n + i]).abs() > 1e-12 {
                    return Err(QotError::NotHermitian {
                        deviation: (cov[i * n + j] - cov[j * n + i]).abs(),
                    });
                }
            }
        }
        Ok(Self {
            modes: n / 2,
            mean,
            cov,
            dual,
        })
    }

    /// Thermal state `ν I` on `m` modes.
    pub fn thermal(nu: f64, modes: usize) -> Result<Self> {
        if !(nu >= 0.5) {
            return Err(QotError::InvalidParameter(format!("thermal ν = {nu} must be >= 1/2")));
        }
        let n = 2 * modes;
        let cov = (0..n * n).map(|k| if k / n == k % n { nu } else { 0.0 }).collect();
        Self::new(vec![0.0; n], cov, vec![false; modes])
    }

    fn signed_symplectic(&self) -> Vec<f64> {
        let n = 2 * self.modes;
        let mut delta = symplectic_form(self.modes);
        for (k, &dual) in self.dual.iter().enumerate() {
            if dual {
                for r in 2 * k..2 * k + 2 {
                    for c in 0..n {
                        delta[r * n + c] = -delta[r * n + c];
                    }
                }
            }
        }
        delta
    }

    /// Smallest eigenvalue over both `σ + (i/2)Δ` and `σ - (i/2)Δ`.
    pub fn uncertainty_min_eigenvalue(&self) -> Result<f64> {
        let n = 2 * self.modes;
        let delta = self.signed_symplectic();
        let mut lo = f64::INFINITY;
        for sign in [1.0, -1.0] {
            let m = ComplexMatrix::from_fn(n, n, |i, j| C64::new(self.cov[i * n + j], 0.5 * sign * delta[i * n + j]));
            lo = lo.min(hermitian_eig(&m)?.min());
        }
        Ok(lo)
    }

    pub fn is_physical(&self, tol: f64) -> Result<bool> {
        Ok(self.uncertainty_min_eigenvalue()? >= -tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_saturates_uncertainty() {
        let g = GaussianCov::thermal(0.5, 1).unwrap();
        assert!(g.uncertainty_min_eigenvalue().unwrap().abs() < 1e-15);
    }

    #[test]
    fn sub_vacuum_isotropic_is_unphysical() {
        let g = GaussianCov::new(vec![0.0; 2], vec![0.4, 0.0, 0.0, 0.4], vec![false]).unwrap();
        assert!(!g.is_physical(1e-12).unwrap());
    }

    #[test]
    fn squeezed_vacuum_is_physical() {
        let g = GaussianCov::new(vec![0.0; 2], vec![0.25, 0.0, 0.0, 1.0], vec![false]).unwrap();
        assert!(g.uncertainty_min_eigenvalue().unwrap() > -1e-15);
    }

    #[test]
    fn symplectic_form_is_antisymmetric() {
        let d = symplectic_form(2);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(d[i * 4 + j], -d[j * 4 + i]);
            }
        }
        assert_eq!(d[1], 1.0);
    }
}
