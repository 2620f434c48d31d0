//! Transport plans as channels: channel -> coupling -> channel, and the swap.
use qot::states::{
    apply_channel, channel_to_coupling, coupling_to_channel_default, random_channel, random_density, rng_from_seed,
    swap_transpose,
};

fn main() -> qot::Result<()> {
    let mut rng = rng_from_seed(7);
    let d = 3;
    let rho = random_density(d, d, &mut rng)?;
    let phi = random_channel(d, d, 2, &mut rng)?;

    let pi = channel_to_coupling(&phi, &rho)?;
    let sigma = apply_channel(&phi, &rho)?;
    println!("target marginal error {:.2e}", pi.target_marginal().dist(sigma.matrix()));
    println!("source marginal error {:.2e}", pi.source_marginal().dist(&rho.transpose()));

    let phi_back = coupling_to_channel_default(&pi, &rho)?;
    let again = channel_to_coupling(&phi_back, &rho)?;
    println!("round trip error {:.2e}", again.matrix().dist(pi.matrix()));

    let swapped = swap_transpose(&pi);
    println!(
        "swap exchanges marginals: {:.2e}",
        swapped.target_marginal().dist(&pi.source_marginal().transpose())
    );
    Ok(())
}
