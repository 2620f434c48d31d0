//! The coupling SDP: thermal pairs against the closed form, and a random pair.
use qot::fock::{fock_mode, thermal_state};
use qot::states::{random_density_seeded, random_hermitian, rng_from_seed};
use qot::transport::{solve_qot, thermal_qot, ADMMConfig, CostOperator};

fn main() -> qot::Result<()> {
    let d = 12;
    let cost = CostOperator::gaussian(&fock_mode(d)?)?;
    for (nu, nup) in [(0.5, 0.5), (0.5, 1.5), (0.6, 0.9)] {
        let sol = solve_qot(&thermal_state(nu, d)?, &thermal_state(nup, d)?, &cost, &ADMMConfig::default())?;
        println!(
            "({nu}, {nup}) sdp {:.6} closed {:.6} iterations {} converged {} blocks {}",
            sol.value,
            thermal_qot(nu, nup, 1)?.value,
            sol.iterations,
            sol.converged,
            sol.block_count
        );
    }

    let rho = random_density_seeded(3, 3, 4)?;
    let sigma = random_density_seeded(3, 2, 5)?;
    let c = CostOperator::new(vec![random_hermitian(3, &mut rng_from_seed(6))], 1.0)?;
    for (name, cfg) in [("plain", ADMMConfig::default()), ("accelerated", ADMMConfig::accelerated())] {
        let sol = solve_qot(&rho, &sigma, &c, &cfg)?;
        println!(
            "{name:>11}: value {:.8} in {} iterations, marginal error {:.1e}",
            sol.value, sol.iterations, sol.marginal_error
        );
    }
    Ok(())
}
