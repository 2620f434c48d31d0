//! Truncated single-mode states, displacement, the beamsplitter and Husimi samples.
use qot::fock::{coherent_state, displace_state, fock_mode, husimi, mix_two_modes, thermal_state, GridSpec, TwoModeKind};
use qot::C64;

fn main() -> qot::Result<()> {
    let d = 16;
    let mode = fock_mode(d)?;
    let th = thermal_state(1.0, d)?;
    println!("thermal nu=1: <n> = {:.6}", th.expectation(&mode.number()).re);

    let z = C64::new(0.6, -0.2);
    let coh = coherent_state(z, d)?;
    let (shifted, tail) = displace_state(&thermal_state(0.5, d)?, z, d)?;
    println!("D(z)|0> vs |z>: {:.2e} (tail {tail:.1e})", shifted.matrix().dist(coh.matrix()));

    let (mixed, tail) = mix_two_modes(TwoModeKind::Beamsplitter { eta: 0.5 }, &coh, &thermal_state(0.5, d)?, d)?;
    println!("half of a coherent state: <n> = {:.6} (tail {tail:.1e})", mixed.expectation(&mode.number()).re);

    let (q, raw) = husimi(&coh, &GridSpec::default())?;
    println!("Husimi sample: {} atoms, mean {:.4}, raw grid mass {raw:.6}", q.len(), q.mean());
    Ok(())
}
