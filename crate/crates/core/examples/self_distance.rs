//! Self-transport cost three ways: closed form, commutators, finite differences.
use qot::fock::{coherent_state, fock_mode, thermal_state};
use qot::lab::j_trace_fd;
use qot::states::random_density_seeded;
use qot::transport::CostOperator;
use qot::C64;

fn main() -> qot::Result<()> {
    let d = 14;
    let cost = CostOperator::gaussian(&fock_mode(d)?)?;
    let states = [
        ("vacuum", thermal_state(0.5, d)?),
        ("thermal 1.2", thermal_state(1.2, d)?),
        ("coherent", coherent_state(C64::new(0.5, 0.3), d)?),
        ("random rank 2", random_density_seeded(d, 2, 9)?),
    ];
    for (name, rho) in &states {
        println!(
            "{name:>14}: closed {:.9} commutator {:.9} finite-difference {:.6}",
            cost.self_distance(rho)?,
            cost.commutator_form(rho)?,
            j_trace_fd(rho, &cost, 1e-3)?
        );
    }
    Ok(())
}
