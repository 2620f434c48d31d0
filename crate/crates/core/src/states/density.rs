use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{QotError, Result};
use crate::linalg::{hermitian_eig, kron, psd_sqrt, ComplexMatrix, MatrixJson};

/// Hermiticity, eigenvalue floor and trace tolerance of a [`DensityMatrix`].
pub const STATE_TOL: f64 = 1e-9;

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates the state invariants within [`STATE_TOL`].
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(QotError::Dimension(format!(
                "density matrix must be square, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let dev = mat.hermitian_deviation();
        if dev > STATE_TOL {
            return Err(QotError::NotHermitian { deviation: dev });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(QotError::InvalidInput(format!(
                "density matrix trace {:.12} differs from 1",
                tr.re
            )));
        }
        let min = hermitian_eig(&mat)?.min();
        if min < -STATE_TOL {
            return Err(QotError::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(Self {
            mat: mat.symmetrize(),
        })
    }

    /// Symmetrizes and rescales to unit trace, then validates.
    pub fn from_unnormalized(mat: ComplexMatrix) -> Result<Self> {
        let sym = mat.symmetrize();
        let tr = sym.trace().re;
        if tr <= 0.0 || !tr.is_finite() {
            return Err(QotError::InvalidInput(format!(
                "cannot normalize a matrix with trace {tr}"
            )));
        }
        Self::new(sym.scale(1.0 / tr))
    }

    /// `|ψ><ψ| / <ψ|ψ>`
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == 0.0 {
            return Err(QotError::InvalidInput("zero state vector".into()));
        }
        Self::from_unnormalized(ComplexMatrix::outer(psi, psi).scale(1.0 / norm2))
    }

    /// `|k><k|` in dimension `d`.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(QotError::InvalidParameter(format!("basis index {k} >= dimension {d}")));
        }
        let mut diag = vec![0.0; d];
        diag[k] = 1.0;
        Ok(Self {
            mat: ComplexMatrix::from_diag(&diag),
        })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(d).scale(1.0 / d as f64),
        }
    }

    /// Diagonal state from a probability vector (renormalized).
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(QotError::InvalidInput("negative or non-finite probability".into()));
        }
        Self::from_unnormalized(ComplexMatrix::from_diag(probs))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn sqrt(&self) -> ComplexMatrix {
        // Invariants guarantee eigenvalues >= -STATE_TOL.
        psd_sqrt(&self.mat, STATE_TOL).expect("validated density matrix")
    }

    /// `ρᵀ`, the representation of the state on `H*`.
    pub fn transpose(&self) -> ComplexMatrix {
        self.mat.transpose()
    }

    /// `Tr[ρ A]`
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        self.mat.trace_product(op)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            mat: kron(&self.mat, &other.mat),
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.mat).expect("validated").eigenvalues
    }

    pub fn purity(&self) -> f64 {
        self.mat.trace_product(&self.mat).re
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > tol).count()
    }

    /// Population of the top `levels` basis states, a truncation indicator
    /// for Fock-space states.
    pub fn edge_population(&self, levels: usize) -> f64 {
        let d = self.dim();
        (d.saturating_sub(levels)..d).map(|i| self.mat[(i, i)].re).sum()
    }
}

/// Wire form: the matrix JSON plus a `kind` tag.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityJson {
    kind: String,
    #[serde(flatten)]
    matrix: MatrixJson,
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DensityJson {
            kind: "density".into(),
            matrix: self.mat.to_json(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let j = DensityJson::deserialize(d)?;
        if j.kind != "density" {
            return Err(D::Error::custom(format!("expected kind \"density\", got {:?}", j.kind)));
        }
        let m = ComplexMatrix::try_from(j.matrix).map_err(D::Error::custom)?;
        DensityMatrix::new(m).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_trace_and_negative() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        let m = ComplexMatrix::from_diag(&[1.1, -0.1]);
        assert!(matches!(DensityMatrix::new(m), Err(QotError::NotPsd { .. })));
    }

    #[test]
    fn pure_state_normalizes() {
        let rho = DensityMatrix::pure(&[C64::new(3.0, 0.0), C64::new(0.0, 4.0)]).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 0.36).abs() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn json_has_kind_tag() {
        let rho = DensityMatrix::maximally_mixed(2);
        let s = serde_json::to_string(&rho).unwrap();
        assert!(s.starts_with("{\"kind\":\"density\""));
        let back: DensityMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rho);
        let bad = s.replace("density", "coupling");
        assert!(serde_json::from_str::<DensityMatrix>(&bad).is_err());
    }
}
