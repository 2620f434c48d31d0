//! Amplifier and attenuator plans between thermal states and their cost.
use qot::fock::fock_mode;
use qot::transport::{coupling_cost, optimal_plan_coupling, thermal_qot, CostOperator, PlanKind};

fn main() -> qot::Result<()> {
    let d = 20;
    let cost = CostOperator::gaussian(&fock_mode(d)?)?;
    for (nu, nup) in [(0.5, 1.5), (0.8, 1.2)] {
        let closed = thermal_qot(nu, nup, 1)?.value;
        for kind in [PlanKind::Amplifier, PlanKind::Attenuator] {
            let (pi, tail) = optimal_plan_coupling(kind, nu, nup, d)?;
            let err = pi.marginal_error()?;
            println!(
                "({nu}, {nup}) {kind:?}: cost {:.6} closed form {closed:.6} tail {tail:.1e} marginal error {:.1e}",
                coupling_cost(&pi, &cost)?,
                err.max_marginal()
            );
        }
    }
    Ok(())
}
