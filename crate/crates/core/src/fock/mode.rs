use num_complex::Complex64 as C64;

use crate::error::{QotError, Result};
use crate::linalg::ComplexMatrix;

/// Ladder and quadrature operators of one bosonic mode truncated to `d` levels.
#[derive(Debug, Clone)]
pub struct FockMode {
    d: usize,
    a: ComplexMatrix,
    adag: ComplexMatrix,
    q: ComplexMatrix,
    p: ComplexMatrix,
}

impl FockMode {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(QotError::InvalidParameter(format!("Fock cutoff must be >= 2, got {d}")));
        }
        let a = lowering(d);
        let adag = a.adjoint();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = (&a + &adag).scale(s);
        // (a - a†)/(i√2)
        let p = (&a - &adag).scale_c(C64::new(0.0, -s));
        Ok(Self { d, a, adag, q, p })
    }

    pub fn cutoff(&self) -> usize {
        self.d
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn adag(&self) -> &ComplexMatrix {
        &self.adag
    }

    pub fn q(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn p(&self) -> &ComplexMatrix {
        &self.p
    }

    /// `a†a`
    pub fn number(&self) -> ComplexMatrix {
        ComplexMatrix::from_diag(&(0..self.d).map(|n| n as f64).collect::<Vec<_>>())
    }

    /// `[Q, P]`
    pub fn quadratures(&self) -> [ComplexMatrix; 2] {
        [self.q.clone(), self.p.clone()]
    }
}

pub fn fock_mode(d: usize) -> Result<FockMode> {
    FockMode::new(d)
}

/// `a[n-1, n] = √n`
pub fn lowering(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}
