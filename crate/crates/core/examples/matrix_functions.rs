//! Hermitian eigendecomposition and the matrix functions built on it.
use qot::linalg::{exp_antihermitian, hermitian_eig, kron, partial_trace, psd_sqrt_default, ComplexMatrix, Factor};
use qot::states::{random_density_seeded, random_hermitian, rng_from_seed};
use qot::C64;

fn main() -> qot::Result<()> {
    let rho = random_density_seeded(4, 3, 1)?;
    let eig = hermitian_eig(rho.matrix())?;
    println!("spectrum {:?}", eig.eigenvalues);

    let s = psd_sqrt_default(rho.matrix())?;
    println!("|sqrt(rho)^2 - rho| = {:.2e}", s.matmul(&s).dist(rho.matrix()));

    let h = random_hermitian(4, &mut rng_from_seed(2));
    let u = exp_antihermitian(&h.scale_c(C64::new(0.0, -1.0)))?;
    let id = ComplexMatrix::identity(4);
    println!("|U U^dag - I| = {:.2e}", u.matmul(&u.adjoint()).dist(&id));

    let sigma = random_density_seeded(3, 3, 3)?;
    let joint = kron(rho.matrix(), sigma.matrix());
    let back = partial_trace(&joint, 4, 3, Factor::Second)?;
    println!("|Tr_2(rho x sigma) - rho| = {:.2e}", back.dist(rho.matrix()));
    Ok(())
}
