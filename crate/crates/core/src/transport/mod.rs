//! Quantum optimal transport: cost operators, the coupling SDP and the
//! Gaussian closed forms.

mod admm;
mod cost;
mod thermal;

pub use admm::{affine_project, solve_qot, ADMMConfig, QOTSolution};
pub use cost::{coupling_cost, self_distance, CostOperator};
pub use thermal::{gaussian_cov_qot, optimal_plan_coupling, thermal_qot, GaussianQot, PlanKind, ThermalQot};
