use crate::error::{QotError, Result};
use crate::fock::FockMode;
use crate::linalg::{commutator, kron, ComplexMatrix, HERMITIAN_TOL};
use crate::states::{Coupling, DensityMatrix, PurificationVector};

/// `C = w Σ_i (R_i ⊗ I - I ⊗ R_iᵀ)²` on `H ⊗ H*`.
#[derive(Debug, Clone)]
pub struct CostOperator {
    d: usize,
    observables: Vec<ComplexMatrix>,
    weight: f64,
    mat: ComplexMatrix,
}

impl CostOperator {
    pub fn new(observables: Vec<ComplexMatrix>, weight: f64) -> Result<Self> {
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(QotError::InvalidParameter(format!("cost weight {weight} must be positive")));
        }
        let d = observables
            .first()
            .ok_or_else(|| QotError::InvalidInput("cost needs at least one observable".into()))?
            .rows();
        for r in &observables {
            if r.rows() != d || !r.is_square() {
                return Err(QotError::Dimension("observables of unequal dimension".into()));
            }
            let dev = r.hermitian_deviation();
            if dev > HERMITIAN_TOL * r.frobenius_norm().max(1.0) {
                return Err(QotError::NotHermitian { deviation: dev });
            }
        }
        let observables: Vec<_> = observables.iter().map(|r| r.symmetrize()).collect();
        let id = ComplexMatrix::identity(d);
        let mut mat = ComplexMatrix::zeros(d * d, d * d);
        for r in &observables {
            let x = &kron(r, &id) - &kron(&id, &r.transpose());
            mat.add_scaled(weight, &x.matmul(&x));
        }
        Ok(Self {
            d,
            observables,
            weight,
            mat: mat.symmetrize(),
        })
    }

    /// Single-mode quadrature cost: `R = (Q, P)`, `w = 1/2`.
    pub fn gaussian(mode: &FockMode) -> Result<Self> {
        Self::new(mode.quadratures().to_vec(), 0.5)
    }

    /// Cost on `H₁ ⊗ H₂` whose observables are `√w₁ R ⊗ I` and `√w₂ I ⊗ R'`, weight 1.
    pub fn direct_sum(a: &CostOperator, b: &CostOperator) -> Result<Self> {
        let (ia, ib) = (ComplexMatrix::identity(a.d), ComplexMatrix::identity(b.d));
        let mut obs = Vec::with_capacity(a.observables.len() + b.observables.len());
        for r in &a.observables {
            obs.push(kron(r, &ib).scale(a.weight.sqrt()));
        }
        for r in &b.observables {
            obs.push(kron(&ia, r).scale(b.weight.sqrt()));
        }
        Self::new(obs, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn observables(&self) -> &[ComplexMatrix] {
        &self.observables
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    fn check_state(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.d {
            return Err(QotError::Dimension(format!(
                "cost on dimension {} but state of dimension {}",
                self.d,
                rho.dim()
            )));
        }
        Ok(())
    }

    /// `w Σ (2 Tr[ρR²] - 2 Tr[√ρ R √ρ R])`, the cost of the trivial plan.
    pub fn self_distance(&self, rho: &DensityMatrix) -> Result<f64> {
        self.check_state(rho)?;
        let s = rho.sqrt();
        let mut total = 0.0;
        for r in &self.observables {
            let r2 = r.matmul(r);
            let sr = s.matmul(r);
            total += 2.0 * rho.expectation(&r2).re - 2.0 * sr.trace_product(&sr).re;
        }
        Ok(self.weight * total)
    }

    /// `-w Σ Tr[[R, √ρ]²]`
    pub fn commutator_form(&self, rho: &DensityMatrix) -> Result<f64> {
        self.check_state(rho)?;
        let s = rho.sqrt();
        let mut total = 0.0;
        for r in &self.observables {
            let c = commutator(r, &s);
            total -= c.trace_product(&c).re;
        }
        Ok(self.weight * total)
    }

    /// `<<v||C||v>>`
    pub fn expectation_vector(&self, v: &PurificationVector) -> f64 {
        let x = v.components();
        let cx = self.mat.mul_vec(x);
        x.iter().zip(&cx).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

/// `Tr[C Π]`
pub fn coupling_cost(pi: &Coupling, cost: &CostOperator) -> Result<f64> {
    if pi.dim() != cost.dim() {
        return Err(QotError::Dimension(format!(
            "coupling of dimension {} against cost of dimension {}",
            pi.dim(),
            cost.dim()
        )));
    }
    Ok(cost.matrix().trace_product(pi.matrix()).re)
}

/// Closed-form `D²(ρ, ρ)`.
pub fn self_distance(rho: &DensityMatrix, cost: &CostOperator) -> Result<f64> {
    cost.self_distance(rho)
}
