//! Tensor-product bookkeeping. The composite index of a pair `(i, j)` on
//! `d1 x d2` is `i * d2 + j` everywhere in the crate.

use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{QotError, Result};

/// Tensor factor selector for [`partial_trace`]: names the factor that is traced out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// `(A ⊗ B)[(i,j),(k,l)] = A[i,k] B[j,l]`
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for k in 0..ac {
            let x = a[(i, k)];
            if x.norm() == 0.0 {
                continue;
            }
            for j in 0..br {
                for l in 0..bc {
                    out[(i * br + j, k * bc + l)] = x * b[(j, l)];
                }
            }
        }
    }
    out
}

/// Partial trace of a `d1*d2` square matrix over the `traced` factor.
pub fn partial_trace(m: &ComplexMatrix, d1: usize, d2: usize, traced: Factor) -> Result<ComplexMatrix> {
    if !m.is_square() || m.rows() != d1 * d2 {
        return Err(QotError::Dimension(format!(
            "partial trace over {d1}x{d2} needs a {}x{} matrix, got {}x{}",
            d1 * d2,
            d1 * d2,
            m.rows(),
            m.cols()
        )));
    }
    Ok(match traced {
        Factor::Second => ComplexMatrix::from_fn(d1, d1, |i, k| {
            (0..d2).map(|j| m[(i * d2 + j, k * d2 + j)]).sum()
        }),
        Factor::First => ComplexMatrix::from_fn(d2, d2, |j, l| {
            (0..d1).map(|i| m[(i * d2 + j, i * d2 + l)]).sum()
        }),
    })
}

/// Row-major vectorization `||X>>`, component `i * cols + j` is `X[i, j]`.
pub fn vectorize(x: &ComplexMatrix) -> Vec<C64> {
    x.as_slice().to_vec()
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &[C64], rows: usize, cols: usize) -> Result<ComplexMatrix> {
    ComplexMatrix::new(rows, cols, v.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_identity() {
        let i4 = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert!(i4.approx_eq(&ComplexMatrix::identity(4), 0.0));
    }

    #[test]
    fn kron_diagonal() {
        let (a, b, c, d) = (2.0, 3.0, 5.0, 7.0);
        let k = kron(&ComplexMatrix::from_diag(&[a, b]), &ComplexMatrix::from_diag(&[c, d]));
        assert!(k.approx_eq(&ComplexMatrix::from_diag(&[a * c, a * d, b * c, b * d]), 0.0));
    }

    #[test]
    fn partial_trace_of_product() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = ComplexMatrix::from_real(3, 3, &[1.0, 0.5, 0.0, 0.0, 2.0, 0.0, 1.0, 0.0, 3.0]).unwrap();
        let ab = kron(&a, &b);
        let pa = partial_trace(&ab, 2, 3, Factor::Second).unwrap();
        assert!(pa.approx_eq(&a.scale(6.0), 1e-14));
        let pb = partial_trace(&ab, 2, 3, Factor::First).unwrap();
        assert!(pb.approx_eq(&b.scale(5.0), 1e-14));
    }

    #[test]
    fn maximally_entangled_marginals() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = vec![C64::new(s, 0.0), 0.0.into(), 0.0.into(), C64::new(s, 0.0)];
        let p = ComplexMatrix::outer(&v, &v);
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!(partial_trace(&p, 2, 2, Factor::First).unwrap().approx_eq(&half, 1e-15));
        assert!(partial_trace(&p, 2, 2, Factor::Second).unwrap().approx_eq(&half, 1e-15));
    }

    #[test]
    fn partial_trace_dimension_error() {
        assert!(partial_trace(&ComplexMatrix::identity(5), 2, 2, Factor::First).is_err());
    }
}
