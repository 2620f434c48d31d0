//! Closed forms between thermal states and the plans attaining them.

use serde::{Deserialize, Serialize};

use crate::error::{QotError, Result};
use crate::fock::{check_tail, gaussian_kraus_channel, thermal_state, GaussianChannelKind, GaussianCov};
use crate::states::{channel_to_coupling, swap_transpose, Coupling};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalQot {
    pub nu: f64,
    pub nu_prime: f64,
    pub modes: usize,
    /// `m (√(ν'+½) - √(ν-½))²`
    pub value: f64,
    /// Amplification `(2ν'+1)/(2ν+1)`.
    pub kappa: f64,
    /// Attenuation `(2ν-1)/(2ν'-1)`; `1` when `ν' = ½`.
    pub eta: f64,
}

fn check_order(nu: f64, nu_prime: f64) -> Result<()> {
    if !(nu >= 0.5) || !(nu_prime >= 0.5) || !nu.is_finite() || !nu_prime.is_finite() {
        return Err(QotError::InvalidParameter(format!(
            "thermal parameters must be finite and >= 1/2, got ({nu}, {nu_prime})"
        )));
    }
    if nu > nu_prime {
        return Err(QotError::InvalidParameter(format!(
            "need ν <= ν', got ({nu}, {nu_prime}); swap the arguments, the distance is symmetric"
        )));
    }
    Ok(())
}

/// Squared distance between `m`-mode thermal states `ω(ν)` and `ω(ν')`, `ν <= ν'`.
pub fn thermal_qot(nu: f64, nu_prime: f64, modes: usize) -> Result<ThermalQot> {
    check_order(nu, nu_prime)?;
    if modes == 0 {
        return Err(QotError::InvalidParameter("at least one mode".into()));
    }
    let value = modes as f64 * ((nu_prime + 0.5).sqrt() - (nu - 0.5).sqrt()).powi(2);
    let kappa = (2.0 * nu_prime + 1.0) / (2.0 * nu + 1.0);
    let eta = if nu_prime == 0.5 {
        1.0
    } else {
        (2.0 * nu - 1.0) / (2.0 * nu_prime - 1.0)
    };
    Ok(ThermalQot {
        nu,
        nu_prime,
        modes,
        value,
        kappa,
        eta,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianQot {
    /// Optimal cross-correlation `√((ν-½)(ν'+½))`.
    pub c_star: f64,
    /// `ν + ν' - 2 c*`
    pub value: f64,
    /// Covariance of the optimal coupling on `H ⊗ H*`; mode 2 is dual.
    pub sigma_star: GaussianCov,
}

/// Optimal single-mode Gaussian coupling of `ω(ν)` (source) and `ω(ν')` (target).
///
/// The coupling covariance is `[[ν' I, c I], [c I, ν I]]`. Against the
/// uncertainty relation with `-Δ` on the dual mode, the binding constraint
/// is `(ν'+½)(ν-½) >= c²`, so the largest admissible correlation is `c*`.
pub fn gaussian_cov_qot(nu: f64, nu_prime: f64) -> Result<GaussianQot> {
    check_order(nu, nu_prime)?;
    let c = ((nu - 0.5) * (nu_prime + 0.5)).sqrt();
    #[rustfmt::skip]
    let cov = vec![
        nu_prime, 0.0, c, 0.0,
        0.0, nu_prime, 0.0, c,
        c, 0.0, nu, 0.0,
        0.0, c, 0.0, nu,
    ];
    let sigma_star = GaussianCov::new(vec![0.0; 4], cov, vec![false, true])?;
    Ok(GaussianQot {
        c_star: c,
        value: nu + nu_prime - 2.0 * c,
        sigma_star,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanKind {
    Amplifier,
    Attenuator,
}

impl std::str::FromStr for PlanKind {
    type Err = QotError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "amplifier" => Ok(Self::Amplifier),
            "attenuator" => Ok(Self::Attenuator),
            _ => Err(QotError::InvalidInput(format!("unknown plan kind {s:?}"))),
        }
    }
}

/// Coupling in `C(ω(ν), ω(ν'))` generated by the amplifier `A_κ` acting on
/// `ω(ν)`, or by the attenuator `E_η` acting on `ω(ν')` and swap-transposed.
///
/// Returns the coupling and the truncation tail mass. The attenuator is exact
/// in the truncated space; the amplifier loses `Tr[ω(ν) L]` above the
/// cutoff and its Kraus operators are renormalized.
pub fn optimal_plan_coupling(kind: PlanKind, nu: f64, nu_prime: f64, d: usize) -> Result<(Coupling, f64)> {
    let params = thermal_qot(nu, nu_prime, 1)?;
    let rho = thermal_state(nu, d)?;
    let sigma = thermal_state(nu_prime, d)?;
    match kind {
        PlanKind::Amplifier => {
            let (channel, leak) = gaussian_kraus_channel(GaussianChannelKind::Amplifier { kappa: params.kappa }, d)?;
            let tail = rho.expectation(&leak).re.max(0.0);
            check_tail(tail)?;
            Ok((channel_to_coupling(&channel, &rho)?, tail))
        }
        PlanKind::Attenuator => {
            let (channel, _) = gaussian_kraus_channel(GaussianChannelKind::Attenuator { eta: params.eta }, d)?;
            let pi = channel_to_coupling(&channel, &sigma)?;
            let tail = pi.target_marginal().dist(rho.matrix());
            check_tail(tail)?;
            Ok((swap_transpose(&pi), tail))
        }
    }
}
