//! Truncated bosonic modes and the Gaussian states, unitaries and channels
//! built on them.

pub mod cov;
pub mod husimi;
pub mod mode;
pub mod states;
pub mod twomode;

pub use cov::{symplectic_form, GaussianCov};
pub use husimi::{husimi, husimi_density, GridSpec, GRID_DEFICIT_LIMIT};
pub use mode::{fock_mode, lowering, FockMode};
pub(crate) use states::check_tail;
pub use states::{
    coherent_amplitudes, coherent_state, coherent_tail, displace_state, displaced_thermal,
    displacement, thermal_state, ThermalParam, TAIL_LIMIT, TAIL_WARN,
};
pub use twomode::{
    gaussian_channel, gaussian_channel_with_tail, gaussian_kraus, gaussian_kraus_channel,
    mix_two_modes, two_mode_unitary, GaussianChannelKind, TwoModeKind,
};
