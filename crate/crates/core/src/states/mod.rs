//! Quantum states, channels, couplings and the correspondence between plans
//! and couplings.

pub mod channel;
pub mod coupling;
pub mod density;
pub mod random;

pub use channel::{apply_channel, KrausChannel, TP_TOL};
pub use coupling::{
    channel_to_coupling, coupling_to_channel, coupling_to_channel_default, purify, swap_transpose,
    transpose_op, Coupling, MarginalError, PurificationVector, MARGINAL_TOL,
};
pub use density::{DensityMatrix, STATE_TOL};
pub use random::{
    derive_seed, ginibre, random_channel, random_density, random_density_seeded, random_hermitian,
    random_unitary, rng_from_seed,
};
