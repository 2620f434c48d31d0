//! Exact discrete W2 by network simplex, and W2 between Husimi functions.
use qot::classical::{husimi_w2, p_mixture_state, w2_discrete, DiscreteMeasure};
use qot::fock::GridSpec;
use qot::C64;

fn main() -> qot::Result<()> {
    let mu = DiscreteMeasure::new(
        vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0)],
        vec![0.5, 0.25, 0.25],
    )?;
    let nu = DiscreteMeasure::uniform(vec![C64::new(0.5, 0.5), C64::new(-0.5, 0.0)])?;
    let r = w2_discrete(&mu, &nu)?;
    println!("W2^2 = {:.10} after {} pivots", r.value, r.pivots);
    println!("plan {:?}", r.plan.to_dense());

    let d = 16;
    let rho = p_mixture_state(&mu, d)?;
    let sigma = p_mixture_state(&nu, d)?;
    let grid = GridSpec { radius: 4.0, step: 0.25 };
    println!("W2^2 between Husimi functions: {:.6}", husimi_w2(&rho, &sigma, &grid)?);
    Ok(())
}
