//! Couplings on `H ⊗ H*` and their correspondence with transport plans.
//!
//! `H*` uses the same fixed basis as `H`, so the dual of an operator `X` is
//! its literal matrix transpose. Vectors `||X>>` follow the row-major
//! convention of [`crate::linalg::vectorize`], for which
//! `(A ⊗ Bᵀ)||X>> = ||A X B>>`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{QotError, Result};
use crate::linalg::{hermitian_eig, partial_trace, psd_inv_sqrt, unvectorize, ComplexMatrix, Factor};

use super::channel::{apply_channel, sqrt_of, KrausChannel};
use super::density::DensityMatrix;

/// Marginal tolerance for couplings.
pub const MARGINAL_TOL: f64 = 1e-7;

/// Eigenvalues of a coupling below this are dropped when extracting Kraus operators.
pub const KRAUS_DROP_TOL: f64 = 1e-12;

/// Relative rank cut for `ρ^{-1/2}`: eigenvalues `<= 1e-10 λ_max` are treated as zero.
pub const RANK_REL_TOL: f64 = 1e-10;

/// Canonical purification `||√ρ>>`: component `i*d + j` equals `(√ρ)_{ij}`.
#[derive(Debug, Clone)]
pub struct PurificationVector {
    dim: usize,
    components: Vec<C64>,
}

impl PurificationVector {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[C64] {
        &self.components
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `||√ρ>><<√ρ||`
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.components, &self.components)
    }

    /// The operator `√ρ` itself.
    pub fn as_operator(&self) -> ComplexMatrix {
        unvectorize(&self.components, self.dim, self.dim).expect("square by construction")
    }
}

pub fn purify(rho: &DensityMatrix) -> Result<PurificationVector> {
    let s = sqrt_of(rho)?;
    Ok(PurificationVector {
        dim: rho.dim(),
        components: s.as_slice().to_vec(),
    })
}

/// Matrix of `Xᵀ` acting on `H*`.
pub fn transpose_op(x: &ComplexMatrix) -> ComplexMatrix {
    x.transpose()
}

/// Joint state on `H ⊗ H*` with `Tr_{H*} Π = σ` (target) and `Tr_H Π = ρᵀ` (source).
#[derive(Debug, Clone)]
pub struct Coupling {
    mat: ComplexMatrix,
    source: DensityMatrix,
    target: DensityMatrix,
}

/// Deviation of a candidate coupling from its declared marginals.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MarginalError {
    /// `||Tr_{H*} Π - σ||_F`
    pub target: f64,
    /// `||Tr_H Π - ρᵀ||_F`
    pub source: f64,
    /// Smallest eigenvalue of `Π`.
    pub min_eigenvalue: f64,
    /// `|Tr Π - 1|`
    pub trace: f64,
}

impl MarginalError {
    pub fn max_marginal(&self) -> f64 {
        self.target.max(self.source)
    }
}

impl Coupling {
    /// Validates marginals and positivity at `tol`.
    pub fn new(mat: ComplexMatrix, source: DensityMatrix, target: DensityMatrix, tol: f64) -> Result<Self> {
        let c = Self::unchecked(mat, source, target)?;
        let err = c.marginal_error()?;
        if err.max_marginal() > tol || err.trace > tol {
            return Err(QotError::MarginalViolation(format!(
                "target {:.3e}, source {:.3e}, trace {:.3e} (tolerance {tol:.1e})",
                err.target, err.source, err.trace
            )));
        }
        if err.min_eigenvalue < -tol {
            return Err(QotError::NotPsd {
                min_eigenvalue: err.min_eigenvalue,
            });
        }
        Ok(c)
    }

    /// Checks shapes and Hermiticity only.
    pub fn unchecked(mat: ComplexMatrix, source: DensityMatrix, target: DensityMatrix) -> Result<Self> {
        let d = source.dim();
        if target.dim() != d || mat.rows() != d * d || !mat.is_square() {
            return Err(QotError::Dimension(format!(
                "coupling of {}x{} with marginals of dims {} and {}",
                mat.rows(),
                mat.cols(),
                target.dim(),
                d
            )));
        }
        Ok(Self {
            mat: mat.symmetrize(),
            source,
            target,
        })
    }

    /// Coupling of the trivial plan, `||√ρ>><<√ρ||`.
    pub fn identity(rho: &DensityMatrix) -> Result<Self> {
        let p = purify(rho)?.projector();
        Self::new(p, rho.clone(), rho.clone(), MARGINAL_TOL)
    }

    /// `σ ⊗ ρᵀ`, always feasible.
    pub fn product(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Self> {
        let mat = crate::linalg::kron(sigma.matrix(), &rho.transpose());
        Self::unchecked(mat, rho.clone(), sigma.clone())
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn source(&self) -> &DensityMatrix {
        &self.source
    }

    pub fn target(&self) -> &DensityMatrix {
        &self.target
    }

    /// `Tr_{H*} Π`
    pub fn target_marginal(&self) -> ComplexMatrix {
        let d = self.dim();
        partial_trace(&self.mat, d, d, Factor::Second).expect("shape checked")
    }

    /// `Tr_H Π`
    pub fn source_marginal(&self) -> ComplexMatrix {
        let d = self.dim();
        partial_trace(&self.mat, d, d, Factor::First).expect("shape checked")
    }

    pub fn marginal_error(&self) -> Result<MarginalError> {
        let target = self.target_marginal().dist(self.target.matrix());
        let source = self.source_marginal().dist(&self.source.transpose());
        let min_eigenvalue = hermitian_eig(&self.mat)?.min();
        let trace = (self.mat.trace().re - 1.0).abs();
        Ok(MarginalError {
            target,
            source,
            min_eigenvalue,
            trace,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CouplingJson {
    kind: String,
    dim: usize,
    matrix: ComplexMatrix,
    source: DensityMatrix,
    target: DensityMatrix,
}

impl Serialize for Coupling {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CouplingJson {
            kind: "coupling".into(),
            dim: self.dim(),
            matrix: self.mat.clone(),
            source: self.source.clone(),
            target: self.target.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Coupling {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let j = CouplingJson::deserialize(d)?;
        if j.kind != "coupling" {
            return Err(D::Error::custom(format!("expected kind \"coupling\", got {:?}", j.kind)));
        }
        if j.dim != j.source.dim() {
            return Err(D::Error::custom("declared dim does not match marginals"));
        }
        Coupling::unchecked(j.matrix, j.source, j.target).map_err(D::Error::custom)
    }
}

/// `Π_Φ = Σ_n ||K_n √ρ>><<K_n √ρ||`, the coupling of plan `Φ` applied to `ρ`.
pub fn channel_to_coupling(channel: &KrausChannel, rho: &DensityMatrix) -> Result<Coupling> {
    let d = rho.dim();
    if channel.in_dim() != d || channel.out_dim() != d {
        return Err(QotError::Dimension(format!(
            "channel {}->{} on a state of dimension {d}",
            channel.in_dim(),
            channel.out_dim()
        )));
    }
    let s = sqrt_of(rho)?;
    let n = d * d;
    let mut mat = ComplexMatrix::zeros(n, n);
    for k in channel.kraus() {
        let v = k.matmul(&s);
        let v = v.as_slice();
        for i in 0..n {
            if v[i].norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                mat[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    let sigma = apply_channel(channel, rho)?;
    Coupling::new(mat, rho.clone(), sigma, MARGINAL_TOL)
}

/// Inverse of [`channel_to_coupling`]: `K_n = √p_n X_n ρ^{-1/2}` from the
/// eigendecomposition `Π = Σ p_n ||X_n>><<X_n||`. The resulting channel is
/// defined on the numerical support of `ρ` (eigenvalues `> rank_tol`).
pub fn coupling_to_channel(pi: &Coupling, rho: &DensityMatrix, rank_tol: f64) -> Result<KrausChannel> {
    let d = rho.dim();
    if pi.dim() != d {
        return Err(QotError::Dimension("coupling and state dimensions differ".into()));
    }
    let src_err = pi.source_marginal().dist(&rho.transpose());
    if src_err > MARGINAL_TOL {
        return Err(QotError::MarginalViolation(format!(
            "Tr_H Π differs from ρᵀ by {src_err:.3e}"
        )));
    }
    let (inv_sqrt, proj) = psd_inv_sqrt(rho.matrix(), rank_tol)?;
    let off_support = &ComplexMatrix::identity(d) - &proj;
    let eig = hermitian_eig(pi.matrix())?;
    let mut kraus = Vec::new();
    for (k, &p) in eig.eigenvalues.iter().enumerate() {
        if p <= KRAUS_DROP_TOL {
            continue;
        }
        let x = unvectorize(&eig.vector(k), d, d)?;
        let leak = x.matmul(&off_support).frobenius_norm() * p.sqrt();
        if leak > MARGINAL_TOL.sqrt() {
            return Err(QotError::SupportMismatch { leak });
        }
        kraus.push(x.matmul(&inv_sqrt).scale(p.sqrt()));
    }
    let full_rank = proj.dist(&ComplexMatrix::identity(d)) < 1e-9;
    if full_rank {
        KrausChannel::new(kraus)
    } else {
        KrausChannel::on_domain(kraus, proj)
    }
}

/// [`coupling_to_channel`] with the default rank cut `1e-10 λ_max(ρ)`.
pub fn coupling_to_channel_default(pi: &Coupling, rho: &DensityMatrix) -> Result<KrausChannel> {
    let lmax = rho.eigenvalues().last().copied().unwrap_or(0.0);
    coupling_to_channel(pi, rho, RANK_REL_TOL * lmax)
}

/// `Π^{ST}[(i,j),(k,l)] = Π[(l,k),(j,i)]`; maps `C(ρ,σ)` onto `C(σ,ρ)`.
pub fn swap_transpose(pi: &Coupling) -> Coupling {
    let d = pi.dim();
    let m = pi.matrix();
    let mat = ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, j) = (r / d, r % d);
        let (k, l) = (c / d, c % d);
        m[(l * d + k, j * d + i)]
    });
    Coupling {
        mat,
        source: pi.target.clone(),
        target: pi.source.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;

    #[test]
    fn purify_pure_basis_state() {
        let p = purify(&DensityMatrix::basis(3, 0).unwrap()).unwrap();
        assert!((p.components()[0].re - 1.0).abs() < 1e-12);
        assert!(p.components()[1..].iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn purify_maximally_mixed_qubit() {
        let p = purify(&DensityMatrix::maximally_mixed(2)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [s, 0.0, 0.0, s];
        for (z, e) in p.components().iter().zip(expect) {
            assert!((z - C64::new(e, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn transpose_examples() {
        let sym = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 3.0]).unwrap();
        assert_eq!(transpose_op(&sym), sym);
        let n = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(transpose_op(&n), ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0]).unwrap());
    }

    #[test]
    fn identity_coupling_from_identity_channel() {
        let rho = DensityMatrix::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        let pi = channel_to_coupling(&KrausChannel::identity(3), &rho).unwrap();
        let id = Coupling::identity(&rho).unwrap();
        assert!(pi.matrix().approx_eq(id.matrix(), 1e-14));
    }

    #[test]
    fn replacement_channel_gives_product() {
        let rho = DensityMatrix::diagonal(&[0.25, 0.75]).unwrap();
        let tau = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        let pi = channel_to_coupling(&KrausChannel::replacement(&tau, 2), &rho).unwrap();
        let expect = kron(tau.matrix(), &rho.transpose());
        assert!(pi.matrix().approx_eq(&expect, 1e-14));
    }

    #[test]
    fn identity_coupling_inverts_to_identity_on_support() {
        // rank-deficient ρ: channel is the projector onto supp ρ
        let rho = DensityMatrix::diagonal(&[0.4, 0.6, 0.0]).unwrap();
        let pi = Coupling::identity(&rho).unwrap();
        let ch = coupling_to_channel_default(&pi, &rho).unwrap();
        let proj = ComplexMatrix::from_diag(&[1.0, 1.0, 0.0]);
        let expect = KrausChannel::identity(3).choi_on(&proj);
        assert!(ch.choi().approx_eq(&expect, 1e-9));
        assert!(ch.domain().is_some());
    }

    #[test]
    fn product_coupling_inverts_to_replacement() {
        let rho = DensityMatrix::diagonal(&[0.25, 0.75]).unwrap();
        let tau = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        let pi = Coupling::product(&rho, &tau).unwrap();
        let ch = coupling_to_channel_default(&pi, &rho).unwrap();
        let expect = KrausChannel::replacement(&tau, 2);
        assert!(ch.choi().approx_eq(&expect.choi(), 1e-12));
    }

    #[test]
    fn swap_transpose_real_identity_coupling_is_fixed() {
        let rho = DensityMatrix::new(
            ComplexMatrix::from_real(2, 2, &[0.7, 0.2, 0.2, 0.3]).unwrap(),
        )
        .unwrap();
        let pi = Coupling::identity(&rho).unwrap();
        let st = swap_transpose(&pi);
        assert!(st.matrix().approx_eq(pi.matrix(), 1e-14));
    }

    #[test]
    fn coupling_json_round_trip() {
        let rho = DensityMatrix::diagonal(&[0.25, 0.75]).unwrap();
        let pi = Coupling::identity(&rho).unwrap();
        let s = serde_json::to_string(&pi).unwrap();
        assert!(s.contains("\"kind\":\"coupling\""));
        let back: Coupling = serde_json::from_str(&s).unwrap();
        assert!(back.matrix().approx_eq(pi.matrix(), 0.0));
    }

    #[test]
    fn support_mismatch_detected() {
        // Π whose H* factor lives outside supp ρ
        let rho = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let mut v = vec![C64::new(0.0, 0.0); 4];
        v[1] = 1.0.into(); // |0>⊗|1>*
        let mat = ComplexMatrix::outer(&v, &v);
        let pi = Coupling::unchecked(mat, rho.clone(), rho.clone()).unwrap();
        // source marginal is |1><1| != ρᵀ, so the marginal check fires first
        assert!(coupling_to_channel_default(&pi, &rho).is_err());
    }
}
