use crate::error::{QotError, Result};
use crate::linalg::{psd_inv_sqrt, psd_sqrt, ComplexMatrix};

use super::density::DensityMatrix;

/// Tolerance on `Σ K†K` against the domain projector.
pub const TP_TOL: f64 = 1e-8;

/// Quantum channel in Kraus form, `X ↦ Σ K X K†`.
///
/// `domain` is the projector the channel is trace preserving on; `None`
/// means the whole input space.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<ComplexMatrix>,
    domain: Option<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::unchecked(kraus, None)?;
        ch.check_trace_preserving(&ComplexMatrix::identity(ch.in_dim))?;
        Ok(ch)
    }

    /// Channel defined on the range of `projector` only.
    pub fn on_domain(kraus: Vec<ComplexMatrix>, projector: ComplexMatrix) -> Result<Self> {
        let ch = Self::unchecked(kraus, Some(projector.clone()))?;
        if projector.rows() != ch.in_dim || !projector.is_square() {
            return Err(QotError::Dimension("domain projector does not match input dimension".into()));
        }
        ch.check_trace_preserving(&projector)?;
        Ok(ch)
    }

    fn unchecked(kraus: Vec<ComplexMatrix>, domain: Option<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| QotError::InvalidInput("empty Kraus list".into()))?;
        let (out_dim, in_dim) = (first.rows(), first.cols());
        if kraus.iter().any(|k| k.rows() != out_dim || k.cols() != in_dim) {
            return Err(QotError::Dimension("Kraus operators of unequal shape".into()));
        }
        Ok(Self {
            in_dim,
            out_dim,
            kraus,
            domain,
        })
    }

    fn check_trace_preserving(&self, target: &ComplexMatrix) -> Result<()> {
        let dev = self.kraus_sum().dist(target);
        if dev > TP_TOL * (self.in_dim as f64).sqrt() {
            return Err(QotError::InvalidInput(format!(
                "Kraus operators not trace preserving: ||ΣK†K - P|| = {dev:.3e}"
            )));
        }
        Ok(())
    }

    /// Builds a trace-preserving channel from operators whose `Σ K†K` is
    /// invertible but not the identity, by right-multiplying with
    /// `(Σ K†K)^{-1/2}`. Returns the channel and the leak `I - Σ K†K` of the
    /// original operators.
    pub fn renormalized(kraus: Vec<ComplexMatrix>) -> Result<(Self, ComplexMatrix)> {
        let raw = Self::unchecked(kraus, None)?;
        let sum = raw.kraus_sum();
        let leak = &ComplexMatrix::identity(raw.in_dim) - &sum;
        let (inv_sqrt, proj) = psd_inv_sqrt(&sum, 1e-300)?;
        if proj.dist(&ComplexMatrix::identity(raw.in_dim)) > 1e-9 {
            return Err(QotError::InvalidInput("Kraus sum is singular".into()));
        }
        let kraus = raw.kraus.iter().map(|k| k.matmul(&inv_sqrt)).collect();
        Ok((Self::new(kraus)?, leak))
    }

    pub fn identity(d: usize) -> Self {
        Self {
            in_dim: d,
            out_dim: d,
            kraus: vec![ComplexMatrix::identity(d)],
            domain: None,
        }
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Replacement channel `X ↦ Tr[X] τ` with Kraus operators `√τ|i><j|`.
    pub fn replacement(tau: &DensityMatrix, in_dim: usize) -> Self {
        let s = tau.sqrt();
        let d = tau.dim();
        let mut kraus = Vec::with_capacity(d * in_dim);
        for i in 0..d {
            for j in 0..in_dim {
                kraus.push(ComplexMatrix::from_fn(d, in_dim, |r, c| {
                    if c == j {
                        s[(r, i)]
                    } else {
                        0.0.into()
                    }
                }));
            }
        }
        Self {
            in_dim,
            out_dim: d,
            kraus,
            domain: None,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn domain(&self) -> Option<&ComplexMatrix> {
        self.domain.as_ref()
    }

    pub fn kraus_sum(&self) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            s += &k.adjoint().matmul(k);
        }
        s
    }

    /// `Σ K X K†` on an arbitrary operator.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.in_dim || x.cols() != self.in_dim {
            return Err(QotError::Dimension(format!(
                "channel input dimension {} but operator is {}x{}",
                self.in_dim,
                x.rows(),
                x.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out += &k.matmul(x).matmul(&k.adjoint());
        }
        Ok(out)
    }

    /// Composition `other ∘ self`.
    pub fn then(&self, other: &KrausChannel) -> Result<KrausChannel> {
        if other.in_dim != self.out_dim {
            return Err(QotError::Dimension("channel composition dimension mismatch".into()));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for b in &other.kraus {
            for a in &self.kraus {
                kraus.push(b.matmul(a));
            }
        }
        Ok(KrausChannel {
            in_dim: self.in_dim,
            out_dim: other.out_dim,
            kraus,
            domain: self.domain.clone(),
        })
    }

    /// Choi-type operator `Σ ||K>><<K||` on `H_out ⊗ H_in*`, independent of
    /// the Kraus decomposition.
    pub fn choi(&self) -> ComplexMatrix {
        let n = self.out_dim * self.in_dim;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in &self.kraus {
            let v = k.as_slice();
            for i in 0..n {
                if v[i].norm() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += v[i] * v[j].conj();
                }
            }
        }
        out
    }

    /// Choi operator restricted to a domain projector `P`: Kraus `K P`.
    pub fn choi_on(&self, projector: &ComplexMatrix) -> ComplexMatrix {
        let restricted = KrausChannel {
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            kraus: self.kraus.iter().map(|k| k.matmul(projector)).collect(),
            domain: None,
        };
        restricted.choi()
    }
}

/// `Φ(ρ)`; the output is symmetrized and checked against the state invariants.
pub fn apply_channel(channel: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let out = channel.apply_operator(rho.matrix())?;
    let tr = out.trace().re;
    if (tr - 1.0).abs() > TP_TOL {
        return Err(QotError::InvalidInput(format!(
            "channel output trace {tr:.12} (not trace preserving on this input)"
        )));
    }
    DensityMatrix::from_unnormalized(out)
}

/// Square root helper shared by the coupling constructions.
pub(crate) fn sqrt_of(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    psd_sqrt(rho.matrix(), super::density::STATE_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn identity_channel_is_noop() {
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let out = apply_channel(&KrausChannel::identity(2), &rho).unwrap();
        assert!(out.matrix().approx_eq(rho.matrix(), 1e-15));
    }

    #[test]
    fn unitary_channel_conjugates() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = ComplexMatrix::from_real(2, 2, &[s, s, s, -s]).unwrap();
        let rho = DensityMatrix::basis(2, 0).unwrap();
        let out = apply_channel(&KrausChannel::unitary(h.clone()).unwrap(), &rho).unwrap();
        let expect = h.matmul(rho.matrix()).matmul(&h.adjoint());
        assert!(out.matrix().approx_eq(&expect, 1e-15));
    }

    #[test]
    fn replacement_channel_outputs_tau() {
        // tau with coherences; every input must map to it
        let tau = DensityMatrix::new(
            ComplexMatrix::new(
                2,
                2,
                vec![
                    C64::new(0.6, 0.0),
                    C64::new(0.1, 0.2),
                    C64::new(0.1, -0.2),
                    C64::new(0.4, 0.0),
                ],
            )
            .unwrap(),
        )
        .unwrap();
        let ch = KrausChannel::replacement(&tau, 2);
        assert_eq!(ch.kraus().len(), 4);
        assert!(ch.kraus_sum().approx_eq(&ComplexMatrix::identity(2), 1e-14));
        for rho in [
            DensityMatrix::basis(2, 0).unwrap(),
            DensityMatrix::basis(2, 1).unwrap(),
            DensityMatrix::maximally_mixed(2),
        ] {
            let out = apply_channel(&ch, &rho).unwrap();
            assert!(out.matrix().approx_eq(tau.matrix(), 1e-14));
        }
    }

    #[test]
    fn non_tp_kraus_rejected() {
        let k = ComplexMatrix::identity(2).scale(0.5);
        assert!(KrausChannel::new(vec![k]).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            apply_channel(&KrausChannel::identity(2), &rho),
            Err(QotError::Dimension(_))
        ));
    }

    #[test]
    fn renormalized_reports_leak() {
        let k0 = ComplexMatrix::from_diag(&[1.0, 0.9]);
        let (ch, leak) = KrausChannel::renormalized(vec![k0]).unwrap();
        assert!((leak[(1, 1)].re - 0.19).abs() < 1e-14);
        assert!(ch.kraus_sum().approx_eq(&ComplexMatrix::identity(2), 1e-14));
    }
}
