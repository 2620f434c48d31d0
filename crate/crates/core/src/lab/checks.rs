//! One function per inequality. Each returns a [`CheckReport`] oriented as
//! `lhs <= rhs`.

use num_complex::Complex64 as C64;
use serde_json::json;

use crate::classical::{husimi_w2, p_mixture_state_with_tail, w2_discrete, DiscreteMeasure};
use crate::error::{QotError, Result};
use crate::fock::{displace_state, fock_mode, mix_two_modes, GridSpec, TwoModeKind};
use crate::linalg::{exp_antihermitian, psd_sqrt_default, ComplexMatrix};
use crate::states::{Coupling, DensityMatrix, MARGINAL_TOL};
use crate::transport::{coupling_cost, solve_qot, ADMMConfig, CostOperator, QOTSolution};

use super::report::{truncation_bound, Budget, CheckReport};

/// Tolerance on the first-moment and zero-mean hypotheses.
pub const MOMENT_TOL: f64 = 1e-8;

struct Sdp {
    value: f64,
    converged: bool,
    iterations: usize,
    primal: f64,
}

impl From<QOTSolution> for Sdp {
    fn from(s: QOTSolution) -> Self {
        Self {
            value: s.value,
            converged: s.converged,
            iterations: s.iterations,
            primal: s.primal_residual,
        }
    }
}

impl Sdp {
    fn json(&self) -> serde_json::Value {
        json!({"value": self.value, "converged": self.converged, "iterations": self.iterations, "primal_residual": self.primal})
    }
}

fn sdp(rho: &DensityMatrix, sigma: &DensityMatrix, cost: &CostOperator, cfg: &ADMMConfig) -> Result<Sdp> {
    Ok(solve_qot(rho, sigma, cost, cfg)?.into())
}

fn gaussian_cost(d: usize) -> Result<CostOperator> {
    CostOperator::gaussian(&fock_mode(d)?)
}

/// `(Tr[ρ Q], Tr[ρ P])` with the truncated quadratures.
pub fn first_moments(rho: &DensityMatrix) -> Result<[f64; 2]> {
    let m = fock_mode(rho.dim())?;
    Ok([rho.expectation(m.q()).re, rho.expectation(m.p()).re])
}

fn moments_match(rho: &DensityMatrix, sigma: &DensityMatrix, what: &str) -> Result<()> {
    let (a, b) = (first_moments(rho)?, first_moments(sigma)?);
    let dev = (a[0] - b[0]).abs().max((a[1] - b[1]).abs());
    if dev > MOMENT_TOL {
        return Err(QotError::InvalidInput(format!(
            "{what}: first moments differ by {dev:.3e} (hypothesis needs equality)"
        )));
    }
    Ok(())
}

/// `D(A,C) <= D(A,B) + D(B,B) + D(B,C)` with `D = √D²`.
///
/// `D(B,B)` is the closed-form self-distance; the other three are SDP solves.
pub fn check_triangle(
    a: &DensityMatrix,
    b: &DensityMatrix,
    c: &DensityMatrix,
    cost: &CostOperator,
    cfg: &ADMMConfig,
    tol: f64,
) -> Result<CheckReport> {
    let ac = sdp(a, c, cost, cfg)?;
    let ab = sdp(a, b, cost, cfg)?;
    let bc = sdp(b, c, cost, cfg)?;
    let bb = cost.self_distance(b)?;
    let root = |x: f64| x.max(0.0).sqrt();
    let lhs = root(ac.value);
    let rhs = root(ab.value) + root(bb) + root(bc.value);
    let meta = json!({
        "dim": a.dim(),
        "d2_ac": ac.json(), "d2_ab": ab.json(), "d2_bc": bc.json(), "self_b": bb,
    });
    let conclusive = ac.converged && ab.converged && bc.converged;
    Ok(CheckReport::graded("triangle", lhs, rhs, tol, meta, conclusive))
}

/// `(D²(ρ,ρ) + D²(σ,σ))/2 <= Tr[C Π]` for a coupling `Π` of `ρ` and `σ`.
pub fn check_thm_zero(pi: &Coupling, cost: &CostOperator, tol: f64) -> Result<CheckReport> {
    let err = pi.marginal_error()?;
    if err.max_marginal() > MARGINAL_TOL || err.min_eigenvalue < -MARGINAL_TOL {
        return Err(QotError::MarginalViolation(format!(
            "marginal error {:.3e}, min eigenvalue {:.3e}",
            err.max_marginal(),
            err.min_eigenvalue
        )));
    }
    let s_rho = cost.self_distance(pi.source())?;
    let s_sigma = cost.self_distance(pi.target())?;
    let lhs = 0.5 * (s_rho + s_sigma);
    let rhs = coupling_cost(pi, cost)?;
    let meta = json!({"dim": pi.dim(), "self_source": s_rho, "self_target": s_sigma, "marginal_error": err.max_marginal()});
    Ok(CheckReport::new("thm_zero", lhs, rhs, tol, meta))
}

/// `ρ_η`: mode `a` of the beamsplitter output with `ρ₁` in the transmitted slot.
pub fn beamsplitter_mix(rho1: &DensityMatrix, rho0: &DensityMatrix, eta: f64, d: usize) -> Result<(DensityMatrix, f64)> {
    mix_two_modes(TwoModeKind::Beamsplitter { eta }, rho1, rho0, d)
}

/// `D²(ρ_η, σ_η) <= η D²(ρ₁,σ₁) + (1-η) D²(ρ₀,σ₀)`, Gaussian cost.
///
/// Requires equal first moments within each pair.
#[allow(clippy::too_many_arguments)]
pub fn check_beamsplitter_convexity(
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
    sigma0: &DensityMatrix,
    sigma1: &DensityMatrix,
    eta: f64,
    d: usize,
    cfg: &ADMMConfig,
    tol: f64,
) -> Result<CheckReport> {
    for s in [rho0, rho1, sigma0, sigma1] {
        if s.dim() != d {
            return Err(QotError::Dimension(format!("state of dimension {} at cutoff {d}", s.dim())));
        }
    }
    moments_match(rho0, sigma0, "slot 0")?;
    moments_match(rho1, sigma1, "slot 1")?;
    let cost = gaussian_cost(d)?;
    let (rho_eta, t_rho) = beamsplitter_mix(rho1, rho0, eta, d)?;
    let (sigma_eta, t_sigma) = beamsplitter_mix(sigma1, sigma0, eta, d)?;
    let mixed = sdp(&rho_eta, &sigma_eta, &cost, cfg)?;
    let s1 = sdp(rho1, sigma1, &cost, cfg)?;
    let s0 = sdp(rho0, sigma0, &cost, cfg)?;
    let lhs = mixed.value;
    let rhs = eta * s1.value + (1.0 - eta) * s0.value;
    let budget = Budget {
        solver: tol,
        truncation: truncation_bound(d, t_rho + t_sigma),
    };
    let meta = json!({
        "eta": eta, "cutoff": d, "budget": budget,
        "mixed": mixed.json(), "slot1": s1.json(), "slot0": s0.json(),
    });
    let conclusive = mixed.converged && s1.converged && s0.converged;
    Ok(CheckReport::graded("beamsplitter_convexity", lhs, rhs, budget.total(), meta, conclusive))
}

/// `Σ_k w_k D(z_k) ρ D(z_k)†` and the accumulated truncation tail.
pub fn random_displacement(rho: &DensityMatrix, mu: &DiscreteMeasure, d: usize) -> Result<(DensityMatrix, f64)> {
    let mut acc = ComplexMatrix::zeros(d, d);
    let mut tail = 0.0;
    for (z, w) in mu.atoms() {
        let (s, t) = displace_state(rho, z, d)?;
        acc.add_scaled(w, s.matrix());
        tail += w * t;
    }
    Ok((DensityMatrix::from_unnormalized(acc)?, tail))
}

/// `D²(ρ₁,σ₁) <= D²(ρ₀,σ₀) + W₂²(μ,ν)` where `ρ₁` is `ρ₀` displaced at
/// random by `μ` and `σ₁` is `σ₀` displaced by `ν`.
///
/// Requires equal first moments of `ρ₀, σ₀` and zero-mean `μ, ν`.
#[allow(clippy::too_many_arguments)]
pub fn check_noise_subadditivity(
    rho0: &DensityMatrix,
    sigma0: &DensityMatrix,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    d: usize,
    cfg: &ADMMConfig,
    tol: f64,
) -> Result<CheckReport> {
    moments_match(rho0, sigma0, "initial states")?;
    for (name, m) in [("mu", mu), ("nu", nu)] {
        if m.mean().norm() > MOMENT_TOL {
            return Err(QotError::InvalidInput(format!(
                "measure {name} has mean {:.3e}, hypothesis needs zero",
                m.mean().norm()
            )));
        }
    }
    let cost = gaussian_cost(d)?;
    let (rho1, t_rho) = random_displacement(rho0, mu, d)?;
    let (sigma1, t_sigma) = random_displacement(sigma0, nu, d)?;
    let noisy = sdp(&rho1, &sigma1, &cost, cfg)?;
    let clean = sdp(rho0, sigma0, &cost, cfg)?;
    let w2 = w2_discrete(mu, nu)?.value;
    let budget = Budget {
        solver: tol,
        truncation: truncation_bound(d, t_rho + t_sigma),
    };
    let meta = json!({
        "cutoff": d, "budget": budget, "w2": w2,
        "noisy": noisy.json(), "clean": clean.json(),
        "mu": mu, "nu": nu,
    });
    Ok(CheckReport::graded(
        "noise_subadditivity",
        noisy.value,
        clean.value + w2,
        budget.total(),
        meta,
        noisy.converged && clean.converged,
    ))
}

/// Upper bound `D²(ρ_μ̂, ρ_ν̂) <= W₂²(μ̂,ν̂) + 1` for the P-mixtures, and lower
/// bound `W₂²(Q_ρ, Q_σ) - 1 <= D²` for their Husimi measures on `grid`.
pub fn check_sandwich(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    grid: &GridSpec,
    d: usize,
    cfg: &ADMMConfig,
    tol: f64,
) -> Result<(CheckReport, CheckReport)> {
    let (rho, t_rho) = p_mixture_state_with_tail(mu, d)?;
    let (sigma, t_sigma) = p_mixture_state_with_tail(nu, d)?;
    let cost = gaussian_cost(d)?;
    let q = sdp(&rho, &sigma, &cost, cfg)?;
    let w2_p = w2_discrete(mu, nu)?.value;
    let w2_q = husimi_w2(&rho, &sigma, grid)?;
    let budget = Budget {
        solver: tol,
        truncation: truncation_bound(d, t_rho + t_sigma),
    };
    let meta = json!({
        "cutoff": d, "grid": grid, "budget": budget,
        "sdp": q.json(), "w2_p": w2_p, "w2_husimi": w2_q,
        "mu": mu, "nu": nu,
    });
    let upper = CheckReport::graded("sandwich_upper", q.value, w2_p + 1.0, budget.total(), meta.clone(), q.converged);
    let lower = CheckReport::graded("sandwich_lower", w2_q - 1.0, q.value, budget.total(), meta, q.converged);
    Ok((upper, lower))
}

/// `η/D²(ρ₁,ρ₁) + (1-η)/D²(ρ₀,ρ₀) <= 1/D²(ρ_η,ρ_η)`, closed-form self-distances.
pub fn check_stam(rho0: &DensityMatrix, rho1: &DensityMatrix, eta: f64, d: usize, tol: f64) -> Result<CheckReport> {
    let cost = gaussian_cost(d)?;
    let (rho_eta, tail) = beamsplitter_mix(rho1, rho0, eta, d)?;
    let s0 = cost.self_distance(rho0)?;
    let s1 = cost.self_distance(rho1)?;
    let se = cost.self_distance(&rho_eta)?;
    if s0 <= 0.0 || s1 <= 0.0 || se <= 0.0 {
        return Err(QotError::InvalidInput("Stam check needs strictly positive self-distances".into()));
    }
    let budget = Budget {
        solver: tol,
        truncation: truncation_bound(d, tail + rho0.edge_population(1) + rho1.edge_population(1)),
    };
    let lhs = eta / s1 + (1.0 - eta) / s0;
    let meta = json!({"eta": eta, "cutoff": d, "budget": budget, "self_0": s0, "self_1": s1, "self_eta": se});
    Ok(CheckReport::new("stam", lhs, 1.0 / se, budget.total(), meta))
}

/// `2 Re Tr[X†RXR] <= Tr[|X| R |X| R + |X†| R |X†| R]` with `|X| = √(X†X)`.
pub fn check_lemma_rx(x: &ComplexMatrix, r: &ComplexMatrix, tol: f64) -> Result<CheckReport> {
    if !x.is_square() || x.rows() != r.rows() || !r.is_square() {
        return Err(QotError::Dimension("X and R must be square of equal size".into()));
    }
    let dev = r.hermitian_deviation();
    if dev > crate::linalg::HERMITIAN_TOL {
        return Err(QotError::NotHermitian { deviation: dev });
    }
    let xd = x.adjoint();
    let lhs = 2.0 * xd.matmul(r).matmul(x).trace_product(r).re;
    let abs_x = psd_sqrt_default(&xd.matmul(x))?;
    let abs_xd = psd_sqrt_default(&x.matmul(&xd))?;
    let rhs = abs_x.matmul(r).matmul(&abs_x).trace_product(r).re + abs_xd.matmul(r).matmul(&abs_xd).trace_product(r).re;
    Ok(CheckReport::new("lemma_rx", lhs, rhs, tol, json!({"dim": x.rows()})))
}

/// Finite-difference trace of `J(ρ)` scaled by the cost weight:
/// `-w Σ_i ∂²_k Tr[√ρ √ρ(k)]` at `k = 0`, with `ρ(k) = e^{-ikR_i} ρ e^{ikR_i}`,
/// by central second differences of step `h`.
pub fn j_trace_fd(rho: &DensityMatrix, cost: &CostOperator, h: f64) -> Result<f64> {
    let s = rho.sqrt();
    let f0 = s.trace_product(&s).re;
    let mut acc = 0.0;
    for r in cost.observables() {
        let mut second = -2.0 * f0;
        for k in [h, -h] {
            let u = exp_antihermitian(&r.scale_c(C64::new(0.0, -k)))?;
            let moved = u.matmul(&s).matmul(&u.adjoint());
            second += s.trace_product(&moved).re;
        }
        acc += second / (h * h);
    }
    Ok(-cost.weight() * acc)
}

/// Default step of [`j_trace_fd`].
pub const FD_STEP: f64 = 1e-3;

/// Agreement of (a) the closed-form self-distance, (b) the commutator form
/// `-w Σ Tr[[R_i,√ρ]²]` and (c) the finite-difference trace of `J`, Gaussian
/// cost at the dimension of `ρ`.
///
/// `lhs = max(|a-b|/tol_ab, |a-c|/tol_c)`, `rhs = 1`, tolerance `0`.
pub fn wy_consistency(rho: &DensityMatrix, tol_ab: f64, tol_c: f64) -> Result<CheckReport> {
    let cost = gaussian_cost(rho.dim())?;
    let a = cost.self_distance(rho)?;
    let b = cost.commutator_form(rho)?;
    let c = j_trace_fd(rho, &cost, FD_STEP)?;
    let lhs = ((a - b).abs() / tol_ab).max((a - c).abs() / tol_c);
    let meta = json!({"dim": rho.dim(), "closed_form": a, "commutator": b, "fd_j_trace": c, "tol_ab": tol_ab, "tol_c": tol_c, "step": FD_STEP});
    Ok(CheckReport::new("wy_consistency", lhs, 1.0, 0.0, meta))
}

/// `|D²_SDP(ρ,ρ) - D²(ρ,ρ)| <= tol`: the SDP agrees with the identity plan.
pub fn check_self_transport(rho: &DensityMatrix, cost: &CostOperator, cfg: &ADMMConfig, tol: f64) -> Result<CheckReport> {
    let s = sdp(rho, rho, cost, cfg)?;
    let closed = cost.self_distance(rho)?;
    let meta = json!({"dim": rho.dim(), "sdp": s.json(), "closed_form": closed});
    Ok(CheckReport::graded("self_transport", (s.value - closed).abs(), 0.0, tol, meta, s.converged))
}

/// `|D²(ρ₁⊗ρ₂, σ₁⊗σ₂; C₁⊕C₂) - D²(ρ₁,σ₁; C₁) - D²(ρ₂,σ₂; C₂)| <= tol`.
#[allow(clippy::too_many_arguments)]
pub fn check_additivity(
    rho1: &DensityMatrix,
    sigma1: &DensityMatrix,
    c1: &CostOperator,
    rho2: &DensityMatrix,
    sigma2: &DensityMatrix,
    c2: &CostOperator,
    cfg: &ADMMConfig,
    tol: f64,
) -> Result<CheckReport> {
    let joint_cost = CostOperator::direct_sum(c1, c2)?;
    let joint = sdp(&rho1.tensor(rho2), &sigma1.tensor(sigma2), &joint_cost, cfg)?;
    let first = sdp(rho1, sigma1, c1, cfg)?;
    let second = sdp(rho2, sigma2, c2, cfg)?;
    let gap = joint.value - first.value - second.value;
    let meta = json!({"joint": joint.json(), "first": first.json(), "second": second.json(), "gap": gap});
    Ok(CheckReport::graded(
        "additivity",
        gap.abs(),
        0.0,
        tol,
        meta,
        joint.converged && first.converged && second.converged,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, thermal_state};
    use crate::states::{channel_to_coupling, random_channel, random_density, random_hermitian, rng_from_seed};

    fn cfg() -> ADMMConfig {
        ADMMConfig::accelerated()
    }

    #[test]
    fn triangle_trivial_cases() {
        let z = ComplexMatrix::from_diag(&[1.0, -1.0]);
        let cost = CostOperator::new(vec![z], 1.0).unwrap();
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let r = check_triangle(&rho, &rho, &rho, &cost, &cfg(), 1e-5).unwrap();
        assert_eq!(r.pass, Some(true));
        assert!(r.lhs.abs() < 1e-3 && r.rhs.abs() < 3e-3);

        let mut rng = rng_from_seed(1);
        let cost = CostOperator::new(vec![random_hermitian(3, &mut rng)], 1.0).unwrap();
        let a = random_density(3, 3, &mut rng).unwrap();
        let c = random_density(3, 3, &mut rng).unwrap();
        let r = check_triangle(&a, &a, &c, &cost, &cfg(), 1e-5).unwrap();
        let sd = cost.self_distance(&a).unwrap();
        // B = A: margin = D(A,A)_sdp + √sd ≈ 2√sd
        assert!((r.margin - 2.0 * sd.sqrt()).abs() < 1e-3, "{} vs {}", r.margin, 2.0 * sd.sqrt());
    }

    #[test]
    fn thm_zero_identity_is_tight_and_product_passes() {
        let mut rng = rng_from_seed(2);
        let rho = random_density(3, 3, &mut rng).unwrap();
        let sigma = random_density(3, 2, &mut rng).unwrap();
        let cost = CostOperator::new(vec![random_hermitian(3, &mut rng)], 1.0).unwrap();
        let id = check_thm_zero(&Coupling::identity(&rho).unwrap(), &cost, 1e-8).unwrap();
        assert!(id.margin.abs() < 1e-10);
        let prod = check_thm_zero(&Coupling::product(&rho, &sigma).unwrap(), &cost, 1e-8).unwrap();
        assert_eq!(prod.pass, Some(true));
        let ch = random_channel(3, 3, 2, &mut rng).unwrap();
        let pi = channel_to_coupling(&ch, &rho).unwrap();
        assert_eq!(check_thm_zero(&pi, &cost, 1e-8).unwrap().pass, Some(true));
    }

    #[test]
    fn convexity_endpoints_are_equalities() {
        let d = 10;
        let vac = thermal_state(0.5, d).unwrap();
        let th = thermal_state(0.9, d).unwrap();
        for eta in [0.0, 1.0] {
            let r = check_beamsplitter_convexity(&vac, &vac, &th, &th, eta, d, &cfg(), 1e-4).unwrap();
            assert!(r.margin.abs() < 1e-6, "{}", r.margin);
        }
        let r = check_beamsplitter_convexity(&vac, &vac, &th, &th, 0.5, d, &cfg(), 2e-2).unwrap();
        assert_eq!(r.pass, Some(true));
    }

    #[test]
    fn convexity_rejects_mismatched_moments() {
        let d = 10;
        let vac = thermal_state(0.5, d).unwrap();
        let coh = coherent_state(C64::new(0.3, 0.0), d).unwrap();
        let e = check_beamsplitter_convexity(&vac, &vac, &coh, &vac, 0.5, d, &cfg(), 1e-4);
        assert!(matches!(e, Err(QotError::InvalidInput(_))));
    }

    #[test]
    fn noise_with_dirac_measures_is_equality() {
        let d = 12;
        let vac = thermal_state(0.5, d).unwrap();
        let dirac = DiscreteMeasure::dirac(C64::new(0.0, 0.0));
        let r = check_noise_subadditivity(&vac, &vac, &dirac, &dirac, d, &cfg(), 1e-4).unwrap();
        assert!(r.margin.abs() < 1e-6);
        let pair = DiscreteMeasure::uniform(vec![C64::new(0.4, 0.0), C64::new(-0.4, 0.0)]).unwrap();
        let vac16 = thermal_state(0.5, 16).unwrap();
        let r = check_noise_subadditivity(&vac16, &vac16, &dirac, &pair, 16, &cfg(), 2e-2).unwrap();
        assert_eq!(r.pass, Some(true));
        let off = DiscreteMeasure::dirac(C64::new(0.2, 0.0));
        assert!(check_noise_subadditivity(&vac, &vac, &off, &dirac, d, &cfg(), 1e-4).is_err());
    }

    #[test]
    fn sandwich_on_vacuum() {
        let dirac = DiscreteMeasure::dirac(C64::new(0.0, 0.0));
        let grid = GridSpec::default();
        let (up, low) = check_sandwich(&dirac, &dirac, &grid, 10, &cfg(), 1e-4).unwrap();
        assert!(up.margin.abs() < 1e-6, "upper bound is tight on the vacuum");
        assert!((low.lhs + 1.0).abs() < 1e-9 && low.pass == Some(true));
    }

    #[test]
    fn stam_endpoints_and_thermal() {
        let d = 16;
        let th = thermal_state(1.0, d).unwrap();
        let vac = thermal_state(0.5, d).unwrap();
        for eta in [0.0, 1.0] {
            let r = check_stam(&vac, &th, eta, d, 1e-6).unwrap();
            assert!(r.margin.abs() < 1e-9, "{}", r.margin);
        }
        let r = check_stam(&th, &th, 0.5, d, 1e-6).unwrap();
        assert_eq!(r.pass, Some(true));
        let r = check_stam(&vac, &th, 0.5, d, 1e-4).unwrap();
        assert_eq!(r.pass, Some(true));
    }

    #[test]
    fn lemma_cases() {
        let mut rng = rng_from_seed(4);
        let r = random_hermitian(3, &mut rng);
        let u = crate::states::random_unitary(3, &mut rng).unwrap();
        let rep = check_lemma_rx(&u, &r, 1e-9).unwrap();
        assert!((rep.rhs - 2.0 * r.trace_product(&r).re).abs() < 1e-10);
        assert_eq!(rep.pass, Some(true));
        // X = PSD commuting with R: equality
        let x = ComplexMatrix::from_diag(&[0.2, 1.0, 3.0]);
        let rd = ComplexMatrix::from_diag(&[1.0, -2.0, 0.5]);
        assert!(check_lemma_rx(&x, &rd, 1e-9).unwrap().margin.abs() < 1e-12);
    }

    #[test]
    fn wy_on_vacuum_and_thermal() {
        let vac = thermal_state(0.5, 12).unwrap();
        let r = wy_consistency(&vac, 1e-8, 1e-4).unwrap();
        assert_eq!(r.pass, Some(true));
        let a = r.metadata["closed_form"].as_f64().unwrap();
        assert!((a - 1.0).abs() < 1e-12);
        let th = thermal_state(0.8, 20).unwrap();
        assert_eq!(wy_consistency(&th, 1e-8, 1e-4).unwrap().pass, Some(true));
    }

    #[test]
    fn fd_error_is_second_order() {
        let rho = crate::states::random_density_seeded(8, 2, 9).unwrap();
        let cost = gaussian_cost(8).unwrap();
        let exact = cost.self_distance(&rho).unwrap();
        let e1 = (j_trace_fd(&rho, &cost, 2e-2).unwrap() - exact).abs();
        let e2 = (j_trace_fd(&rho, &cost, 1e-2).unwrap() - exact).abs();
        assert!(e1 / e2 >= 3.0, "{e1} {e2}");
    }

    #[test]
    fn additivity_on_qubits() {
        let mut rng = rng_from_seed(6);
        let c1 = CostOperator::new(vec![random_hermitian(2, &mut rng)], 1.0).unwrap();
        let c2 = CostOperator::new(vec![random_hermitian(2, &mut rng)], 1.0).unwrap();
        let s: Vec<_> = (0..4).map(|_| random_density(2, 2, &mut rng).unwrap()).collect();
        let r = check_additivity(&s[0], &s[1], &c1, &s[2], &s[3], &c2, &cfg(), 1e-4).unwrap();
        assert_eq!(r.pass, Some(true), "{:?}", r);
    }
}
