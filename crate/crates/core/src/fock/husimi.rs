use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::classical::DiscreteMeasure;
use crate::error::{QotError, Result};
use crate::states::DensityMatrix;

use super::states::coherent_amplitudes;

/// Raw-mass deficit above which a grid is rejected.
pub const GRID_DEFICIT_LIMIT: f64 = 1e-2;

/// Raw-mass deficit above which a warning is logged.
pub const GRID_DEFICIT_WARN: f64 = 1e-3;

/// Square lattice `{-R + k h}²` in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub radius: f64,
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { radius: 5.0, step: 0.2 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.step > 0.0 && self.step <= 2.0 * self.radius) {
            return Err(QotError::InvalidParameter(format!(
                "grid radius {} / step {} must be positive with step <= 2 radius",
                self.radius, self.step
            )));
        }
        Ok(())
    }

    /// Coordinates along one axis.
    pub fn axis(&self) -> Vec<f64> {
        let k = (2.0 * self.radius / self.step + 1e-9).floor() as usize;
        (0..=k).map(|i| -self.radius + i as f64 * self.step).collect()
    }

    pub fn points(&self) -> Vec<C64> {
        let ax = self.axis();
        ax.iter().flat_map(|&x| ax.iter().map(move |&y| C64::new(x, y))).collect()
    }
}

/// `Q(z) = <z|ρ|z> / π` with untruncated coherent coefficients.
pub fn husimi_density(rho: &DensityMatrix, z: C64) -> f64 {
    let c = coherent_amplitudes(z, rho.dim());
    let rc = rho.matrix().mul_vec(&c);
    let v: C64 = c.iter().zip(&rc).map(|(a, b)| a.conj() * b).sum();
    v.re / std::f64::consts::PI
}

/// Husimi weights `Q(z_k) h²` on the grid, renormalized. Returns the measure
/// and the raw total before renormalization.
pub fn husimi(rho: &DensityMatrix, grid: &GridSpec) -> Result<(DiscreteMeasure, f64)> {
    grid.validate()?;
    let pts = grid.points();
    let area = grid.step * grid.step;
    let weights: Vec<f64> = pts.iter().map(|&z| (husimi_density(rho, z) * area).max(0.0)).collect();
    let raw: f64 = weights.iter().sum();
    let deficit = (1.0 - raw).abs();
    if deficit > GRID_DEFICIT_LIMIT {
        return Err(QotError::GridInadequate { deficit });
    }
    if deficit > GRID_DEFICIT_WARN {
        log::warn!("Husimi raw mass {raw:.6} on grid radius {} step {}", grid.radius, grid.step);
    }
    Ok((DiscreteMeasure::new(pts, weights)?, raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, thermal_state};

    #[test]
    fn vacuum_gaussian() {
        let vac = DensityMatrix::basis(10, 0).unwrap();
        for z in [C64::new(0.0, 0.0), C64::new(1.0, -0.5), C64::new(2.0, 1.0)] {
            let expect = (-z.norm_sqr()).exp() / std::f64::consts::PI;
            assert!((husimi_density(&vac, z) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn coherent_shifted_gaussian() {
        let w = C64::new(0.7, 0.2);
        let rho = coherent_state(w, 30).unwrap();
        for z in [C64::new(0.0, 0.0), C64::new(1.0, -0.5)] {
            let expect = (-(z - w).norm_sqr()).exp() / std::f64::consts::PI;
            assert!((husimi_density(&rho, z) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn default_grid_size() {
        assert_eq!(GridSpec::default().points().len(), 2601);
    }

    #[test]
    fn thermal_raw_mass() {
        let rho = thermal_state(1.0, 30).unwrap();
        let (m, raw) = husimi(&rho, &GridSpec::default()).unwrap();
        assert!((raw - 1.0).abs() < 1e-3);
        assert!((m.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_grid_rejected() {
        let rho = thermal_state(1.0, 30).unwrap();
        let r = husimi(&rho, &GridSpec { radius: 1.0, step: 0.2 });
        assert!(matches!(r, Err(QotError::GridInadequate { .. })));
    }
}
