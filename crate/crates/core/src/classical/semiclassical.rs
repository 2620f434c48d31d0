use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::fock::{coherent_amplitudes, coherent_tail, husimi, GridSpec};
use crate::linalg::ComplexMatrix;
use crate::states::DensityMatrix;

use super::measure::DiscreteMeasure;
use super::simplex::w2_discrete;

/// `Σ w_k |z_k><z_k|` at cutoff `d`, renormalized. Returns the state and the
/// weighted truncation tail.
pub fn p_mixture_state_with_tail(mu: &DiscreteMeasure, d: usize) -> Result<(DensityMatrix, f64)> {
    let mut m = ComplexMatrix::zeros(d, d);
    let mut tail = 0.0;
    for (z, w) in mu.atoms() {
        let t = coherent_tail(z, d);
        crate::fock::states::check_tail(t)?;
        tail += w * t;
        let c = coherent_amplitudes(z, d);
        m.add_scaled(w, &ComplexMatrix::outer(&c, &c));
    }
    Ok((DensityMatrix::from_unnormalized(m)?, tail))
}

pub fn p_mixture_state(mu: &DiscreteMeasure, d: usize) -> Result<DensityMatrix> {
    Ok(p_mixture_state_with_tail(mu, d)?.0)
}

/// `W₂²` between the Husimi measures of `ρ` and `σ` on a common grid.
pub fn husimi_w2(rho: &DensityMatrix, sigma: &DensityMatrix, grid: &GridSpec) -> Result<f64> {
    let (a, _) = husimi(rho, grid)?;
    let (b, _) = husimi(sigma, grid)?;
    Ok(w2_discrete(&a, &b)?.value)
}

/// `Tr[ρ a]` for a mixture of coherent states, `Σ w z`, as a reference.
pub fn p_mixture_mean(mu: &DiscreteMeasure) -> C64 {
    mu.mean()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::lowering;

    #[test]
    fn single_atom_at_origin_is_vacuum() {
        let rho = p_mixture_state(&DiscreteMeasure::dirac(C64::new(0.0, 0.0)), 6).unwrap();
        assert_eq!(rho, DensityMatrix::basis(6, 0).unwrap());
    }

    #[test]
    fn symmetric_pair_has_zero_field() {
        let mu = DiscreteMeasure::uniform(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]).unwrap();
        let rho = p_mixture_state(&mu, 20).unwrap();
        assert!(rho.expectation(&lowering(20)).norm() < 1e-14);
    }

    #[test]
    fn purity_from_overlaps() {
        let mu = DiscreteMeasure::new(
            vec![C64::new(0.5, 0.0), C64::new(-0.2, 0.4), C64::new(0.0, -0.6)],
            vec![0.2, 0.5, 0.3],
        )
        .unwrap();
        let rho = p_mixture_state(&mu, 30).unwrap();
        let mut expect = 0.0;
        for (z, a) in mu.atoms() {
            for (w, b) in mu.atoms() {
                expect += a * b * (-(z - w).norm_sqr()).exp();
            }
        }
        assert!((rho.purity() - expect).abs() < 1e-10);
    }

    #[test]
    fn same_state_zero_distance() {
        let rho = DensityMatrix::basis(10, 0).unwrap();
        let g = GridSpec { radius: 4.0, step: 0.4 };
        assert!(husimi_w2(&rho, &rho, &g).unwrap().abs() < 1e-12);
    }
}
