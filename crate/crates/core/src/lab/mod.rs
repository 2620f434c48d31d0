//! Numerical checks of the transport inequalities and the suite runner.

pub mod checks;
pub mod report;
pub mod suite;

pub use checks::*;
pub use report::{reports_csv, tally, truncation_bound, write_reports_csv, write_reports_json, Budget, CheckReport, Tally};
pub use suite::{random_measure, run_check, run_suite, CheckSpec, SuiteManifest};
