//! Channel-based quantum optimal transport.
//!
//! A transport plan between two quantum states is a quantum channel; each
//! channel corresponds to exactly one coupling, a joint state on `H ⊗ H*`
//! whose marginals are the target state and the transposed source state.
//! The squared distance `D²(ρ, σ)` is the minimal expectation of a
//! quadratic cost operator over all couplings, computed here by an ADMM
//! semidefinite solver.
//!
//! Modules:
//!
//! * [`linalg`]: dense complex matrices, Hermitian eigendecomposition and the
//!   matrix functions built on it.
//! * [`states`]: density matrices, Kraus channels, couplings and the
//!   channel/coupling correspondence.
//! * [`fock`]: truncated bosonic modes, thermal and coherent states,
//!   displacement, beamsplitter, squeezer, attenuator and amplifier, Husimi
//!   sampling and covariance-level Gaussian data.
//! * [`transport`]: cost operators, the coupling SDP, thermal closed forms and
//!   the optimal attenuator/amplifier plans.
//! * [`classical`]: exact discrete `W₂²` by network simplex and semiclassical
//!   state construction.
//! * [`lab`]: structured checks of the inequalities satisfied by `D²`.
//! * [`runner`]: configuration, batch execution and reporting behind the
//!   `qot` binary.

pub mod classical;
pub mod error;
pub mod fock;
pub mod lab;
pub mod linalg;
pub mod runner;
pub mod states;
pub mod transport;

pub use error::{QotError, Result};
pub use linalg::ComplexMatrix;
pub use num_complex::Complex64 as C64;
