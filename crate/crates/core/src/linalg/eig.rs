//! Hermitian eigendecomposition and the matrix functions built on it.
//!
//! Every matrix function in the crate (square root, exponential, PSD
//! projection, pseudo-inverse square root) routes through
//! [`hermitian_eig`], so all of them share one kernel and one set of
//! tolerances.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::blocks::pattern_blocks;
use super::matrix::ComplexMatrix;
use crate::error::{QotError, Result};

/// Relative Hermiticity tolerance accepted before symmetrizing.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Default negative-eigenvalue clip: `1e-9 * ||M||_F`.
pub const CLIP_REL: f64 = 1e-9;

const SWEEPS_PER_DIM: usize = 1000;

/// Eigenvalues in ascending order with the matching unitary of column eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    /// `V f(diag) V^dag`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let vals: Vec<C64> = self.eigenvalues.iter().map(|&l| C64::new(f(l), 0.0)).collect();
        self.map_complex(&vals)
    }

    pub fn map_complex(&self, vals: &[C64]) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let k = vals.len();
        // (V diag) V^dag, skipping zero weights.
        let mut out = ComplexMatrix::zeros(n, n);
        for (c, &w) in vals.iter().enumerate().take(k) {
            if w.norm() == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = v[(i, c)] * w;
                if a.norm() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * v[(j, c)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| l)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(QotError::Dimension(format!(
            "expected square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL * m.frobenius_norm().max(1.0) {
        return Err(QotError::NotHermitian { deviation: dev });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix; the input is symmetrized first.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    check_hermitian(m)?;
    let n = m.rows();
    if n == 0 {
        return Ok(HermitianEig {
            eigenvalues: vec![],
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let sym = m.symmetrize();
    let dm = DMatrix::from_row_slice(n, n, sym.as_slice());
    let eig = SymmetricEigen::try_new(dm, f64::EPSILON, SWEEPS_PER_DIM * n)
        .ok_or(QotError::EigNonConvergence)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, c| eig.eigenvectors[(i, order[c])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Square root of a PSD matrix. Eigenvalues in `[-clip_tol, 0)` are clipped to zero.
pub fn psd_sqrt(m: &ComplexMatrix, clip_tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    if eig.min() < -clip_tol {
        return Err(QotError::NotPsd {
            min_eigenvalue: eig.min(),
        });
    }
    Ok(eig.map(|l| l.max(0.0).sqrt()))
}

/// [`psd_sqrt`] with the default clip `1e-9 * ||M||_F`.
pub fn psd_sqrt_default(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    psd_sqrt(m, CLIP_REL * m.frobenius_norm())
}

/// Nearest PSD matrix in Frobenius norm.
pub fn psd_project(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(m)?.map(|l| l.max(0.0)))
}

/// Pseudo-inverse square root on the numerical support together with the
/// support projector. Eigenvalues `<= rank_tol` count as zero.
pub fn psd_inv_sqrt(m: &ComplexMatrix, rank_tol: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let eig = hermitian_eig(m)?;
    let inv = eig.map(|l| if l > rank_tol { 1.0 / l.sqrt() } else { 0.0 });
    let proj = eig.map(|l| if l > rank_tol { 1.0 } else { 0.0 });
    Ok((inv, proj))
}

/// `exp(G)` for anti-Hermitian `G`, via the eigendecomposition of `-iG`.
///
/// Decoupled blocks of `G` are exponentiated independently.
pub fn exp_antihermitian(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !g.is_square() {
        return Err(QotError::Dimension(format!(
            "expected square matrix, got {}x{}",
            g.rows(),
            g.cols()
        )));
    }
    let n = g.rows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((g[(i, j)] + g[(j, i)].conj()).norm());
        }
    }
    if dev > HERMITIAN_TOL * g.frobenius_norm().max(1.0) {
        return Err(QotError::NotAntiHermitian { deviation: dev });
    }
    let h = g.scale_c(C64::new(0.0, -1.0));
    let mut out = ComplexMatrix::zeros(n, n);
    for block in pattern_blocks(&h, 0.0) {
        if block.len() == 1 {
            let i = block[0];
            out[(i, i)] = C64::new(0.0, h[(i, i)].re).exp();
            continue;
        }
        let sub = h.submatrix(&block, &block);
        let eig = hermitian_eig(&sub)?;
        let phases: Vec<C64> = eig
            .eigenvalues
            .iter()
            .map(|&l| C64::new(0.0, l).exp())
            .collect();
        out.set_block(&block, &eig.map_complex(&phases));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_eigenvalues() {
        let e = hermitian_eig(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(e.eigenvalues.len(), 2);
        for l in e.eigenvalues {
            assert!((l - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_sorted_ascending() {
        let e = hermitian_eig(&ComplexMatrix::from_diag(&[2.0, -1.0])).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_x_eigenvalues() {
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let e = hermitian_eig(&x).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_square_and_non_hermitian() {
        assert!(matches!(
            hermitian_eig(&ComplexMatrix::zeros(2, 3)),
            Err(QotError::Dimension(_))
        ));
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(QotError::NotHermitian { .. })));
    }

    #[test]
    fn sqrt_of_diagonal() {
        let s = psd_sqrt(&ComplexMatrix::from_diag(&[4.0, 9.0]), 1e-12).unwrap();
        assert!(s.approx_eq(&ComplexMatrix::from_diag(&[2.0, 3.0]), 1e-13));
        let i = psd_sqrt(&ComplexMatrix::identity(3), 1e-12).unwrap();
        assert!(i.approx_eq(&ComplexMatrix::identity(3), 1e-13));
    }

    #[test]
    fn sqrt_rejects_negative() {
        let m = ComplexMatrix::from_diag(&[1.0, -1e-3]);
        assert!(matches!(psd_sqrt(&m, 1e-9), Err(QotError::NotPsd { .. })));
        // within the clip it passes and the negative part becomes zero
        let m = ComplexMatrix::from_diag(&[1.0, -1e-12]);
        let s = psd_sqrt(&m, 1e-9).unwrap();
        assert_eq!(s[(1, 1)].norm(), 0.0);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let u = exp_antihermitian(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert!(u.approx_eq(&ComplexMatrix::identity(3), 1e-15));
    }

    #[test]
    fn exp_rotation_generator() {
        let theta = 0.7_f64;
        let g = ComplexMatrix::from_real(2, 2, &[0.0, theta, -theta, 0.0]).unwrap();
        let u = exp_antihermitian(&g).unwrap();
        let expect = ComplexMatrix::from_real(
            2,
            2,
            &[theta.cos(), theta.sin(), -theta.sin(), theta.cos()],
        )
        .unwrap();
        assert!(u.approx_eq(&expect, 1e-13));
    }

    #[test]
    fn exp_rejects_hermitian_input() {
        let g = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(
            exp_antihermitian(&g),
            Err(QotError::NotAntiHermitian { .. })
        ));
    }

    #[test]
    fn exp_diagonal_phase() {
        let g = ComplexMatrix::from_fn(2, 2, |i, j| if i == j { c(0.0, 0.3 * (i as f64 + 1.0)) } else { c(0.0, 0.0) });
        let u = exp_antihermitian(&g).unwrap();
        assert!((u[(1, 1)] - c(0.0, 0.6).exp()).norm() < 1e-15);
    }

    #[test]
    fn inv_sqrt_on_support() {
        let m = ComplexMatrix::from_diag(&[0.25, 0.0]);
        let (inv, proj) = psd_inv_sqrt(&m, 1e-12).unwrap();
        assert!(inv.approx_eq(&ComplexMatrix::from_diag(&[2.0, 0.0]), 1e-13));
        assert!(proj.approx_eq(&ComplexMatrix::from_diag(&[1.0, 0.0]), 1e-13));
    }
}
