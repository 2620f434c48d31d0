//! Closed-form distance between thermal states and the covariance-level optimum.
use qot::transport::{gaussian_cov_qot, thermal_qot};

fn main() -> qot::Result<()> {
    println!("{:>5} {:>5} {:>10} {:>8} {:>8} {:>10}", "nu", "nu'", "D^2", "kappa", "eta", "c*");
    for (nu, nup) in [(0.5, 0.5), (0.5, 1.5), (1.0, 2.0), (1.5, 3.0)] {
        let t = thermal_qot(nu, nup, 1)?;
        let g = gaussian_cov_qot(nu, nup)?;
        println!(
            "{nu:>5} {nup:>5} {:>10.6} {:>8.4} {:>8.4} {:>10.6}",
            t.value, t.kappa, t.eta, g.c_star
        );
        assert!((g.value - t.value).abs() < 1e-12);
        assert!(g.sigma_star.uncertainty_min_eigenvalue()? >= -1e-12);
    }
    println!("three modes, (1, 2): {:.6}", thermal_qot(1.0, 2.0, 3)?.value);
    Ok(())
}
