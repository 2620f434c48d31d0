use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::{Command, ExperimentConfig};
use super::write_atomic;
use crate::error::{QotError, Result};
use crate::fock::{fock_mode, thermal_state, ThermalParam};
use crate::lab::{
    check_sandwich, random_measure, reports_csv, run_suite, tally, truncation_bound, CheckReport, SuiteManifest,
};
use crate::states::{derive_seed, rng_from_seed, DensityMatrix};
use crate::transport::{
    coupling_cost, optimal_plan_coupling, solve_qot, thermal_qot, ADMMConfig, CostOperator, QOTSolution,
};

/// How a run ended, ordered from best to worst.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    NotConverged,
    CheckFailed,
}

/// Process exit code: 0 success, 1 validation or input, 2 solver
/// non-convergence, 3 truncation budget, 4 failed check.
pub fn exit_code(outcome: &Result<Status>) -> i32 {
    match outcome {
        Ok(Status::Ok) => 0,
        Ok(Status::NotConverged) => 2,
        Ok(Status::CheckFailed) => 4,
        Err(QotError::NonConvergence { .. }) => 2,
        Err(QotError::TruncationBudget { .. }) => 3,
        Err(_) => 1,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalRow {
    pub nu: f64,
    pub nu_prime: f64,
    pub modes: usize,
    pub closed_form: f64,
    pub sdp: Option<f64>,
    pub gap: Option<f64>,
    pub kappa: f64,
    pub eta: f64,
    pub converged: Option<bool>,
    pub iterations: Option<usize>,
    pub primal_residual: Option<f64>,
    pub solver_tolerance: f64,
    pub truncation_bound: f64,
}

/// Result of one `run`: the JSON document written to `result.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunOutput {
    pub command: Command,
    pub status: Status,
    pub config: ExperimentConfig,
    pub result: Value,
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| QotError::InvalidParameter(format!("thread pool: {e}")))
}

/// Solves with an optional iteration log that lands at `out/name` atomically.
fn solve_logged(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    cost: &CostOperator,
    cfg: &ExperimentConfig,
    name: &str,
) -> Result<QOTSolution> {
    if !cfg.log_iterations {
        return solve_qot(rho, sigma, cost, &ADMMConfig { log_path: None, ..cfg.admm.clone() });
    }
    std::fs::create_dir_all(&cfg.out)?;
    let partial = cfg.out.join(format!(".{name}.partial"));
    let admm = ADMMConfig {
        log_path: Some(partial.clone()),
        ..cfg.admm.clone()
    };
    let sol = solve_qot(rho, sigma, cost, &admm)?;
    std::fs::rename(&partial, cfg.out.join(name))?;
    Ok(sol)
}

fn solution_json(s: &QOTSolution, tol: f64) -> Value {
    let mut v = serde_json::to_value(s).expect("solution serializes");
    v["solver_tolerance"] = json!(tol);
    v
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| QotError::Io(std::io::Error::other(e.to_string())))
}

fn reports_status(reports: &[CheckReport]) -> Status {
    let t = tally(reports);
    if t.violations > 0 {
        Status::CheckFailed
    } else if t.inconclusive > 0 {
        Status::NotConverged
    } else {
        Status::Ok
    }
}

fn thermal_row(cfg: &ExperimentConfig, nu: f64, nu_prime: f64, k: usize, many: bool) -> Result<ThermalRow> {
    let t = thermal_qot(nu, nu_prime, cfg.modes)?;
    let mut row = ThermalRow {
        nu,
        nu_prime,
        modes: cfg.modes,
        closed_form: t.value,
        sdp: None,
        gap: None,
        kappa: t.kappa,
        eta: t.eta,
        converged: None,
        iterations: None,
        primal_residual: None,
        solver_tolerance: cfg.admm.tol_primal,
        truncation_bound: 0.0,
    };
    if cfg.solve_sdp && cfg.modes == 1 {
        let d = cfg.cutoff;
        let rho = thermal_state(nu, d)?;
        let sigma = thermal_state(nu_prime, d)?;
        let tail = ThermalParam::new(nu)?.tail(d) + ThermalParam::new(nu_prime)?.tail(d);
        let cost = CostOperator::gaussian(&fock_mode(d)?)?;
        let name = if many {
            format!("iterations_{k}.csv")
        } else {
            "iterations.csv".into()
        };
        let sol = solve_logged(&rho, &sigma, &cost, cfg, &name)?;
        row.sdp = Some(sol.value);
        row.gap = Some(sol.value - t.value);
        row.converged = Some(sol.converged);
        row.iterations = Some(sol.iterations);
        row.primal_residual = Some(sol.primal_residual);
        row.truncation_bound = truncation_bound(d, tail);
    }
    Ok(row)
}

fn run_thermal(cfg: &ExperimentConfig) -> Result<(Status, Value, Vec<u8>)> {
    let pairs = cfg.thermal_pairs();
    let many = pairs.len() > 1;
    let rows: Vec<ThermalRow> = pool(cfg.jobs)?.install(|| {
        pairs
            .par_iter()
            .enumerate()
            .map(|(k, &(a, b))| thermal_row(cfg, a, b, k, many))
            .collect::<Result<_>>()
    })?;
    let status = if rows.iter().any(|r| r.converged == Some(false)) {
        Status::NotConverged
    } else {
        Status::Ok
    };
    let csv = csv_bytes(&rows)?;
    Ok((status, json!({ "rows": rows }), csv))
}

fn run_sdp(cfg: &ExperimentConfig) -> Result<(Status, Value, Vec<u8>)> {
    let d = cfg.cutoff;
    let (rho, t_rho) = cfg.state.build(d, cfg.seed, "state")?;
    let (sigma, t_sigma) = cfg.target.build(d, cfg.seed, "target")?;
    let cost = CostOperator::gaussian(&fock_mode(d)?)?;
    let sol = solve_logged(&rho, &sigma, &cost, cfg, "iterations.csv")?;
    let lower = 0.5 * (cost.self_distance(&rho)? + cost.self_distance(&sigma)?);
    let bound = truncation_bound(d, t_rho + t_sigma);
    let status = if sol.converged { Status::Ok } else { Status::NotConverged };
    #[derive(Serialize)]
    struct Line {
        source: String,
        target: String,
        cutoff: usize,
        value: f64,
        lower_bound: f64,
        converged: bool,
        iterations: usize,
        primal_residual: f64,
        dual_residual: f64,
        marginal_error: f64,
        min_eigenvalue: f64,
        solver_tolerance: f64,
        truncation_bound: f64,
    }
    let line = Line {
        source: cfg.state.to_string(),
        target: cfg.target.to_string(),
        cutoff: d,
        value: sol.value,
        lower_bound: lower,
        converged: sol.converged,
        iterations: sol.iterations,
        primal_residual: sol.primal_residual,
        dual_residual: sol.dual_residual,
        marginal_error: sol.marginal_error,
        min_eigenvalue: sol.min_eigenvalue,
        solver_tolerance: cfg.admm.tol_primal,
        truncation_bound: bound,
    };
    let result = json!({
        "solution": solution_json(&sol, cfg.admm.tol_primal),
        "lower_bound": lower,
        "truncation": {"source_tail": t_rho, "target_tail": t_sigma, "bound": bound},
    });
    Ok((status, result, csv_bytes(&[line])?))
}

/// Agreement required between the two self-distance formulas.
const SELF_TOL: f64 = 1e-9;

fn run_self(cfg: &ExperimentConfig) -> Result<(Status, Value, Vec<u8>)> {
    let d = cfg.cutoff;
    let (rho, tail) = cfg.state.build(d, cfg.seed, "state")?;
    let cost = CostOperator::gaussian(&fock_mode(d)?)?;
    let closed = cost.self_distance(&rho)?;
    let commutator = cost.commutator_form(&rho)?;
    #[derive(Serialize)]
    struct Line {
        state: String,
        cutoff: usize,
        self_distance: f64,
        commutator_form: f64,
        difference: f64,
        tolerance: f64,
        truncation_bound: f64,
    }
    let line = Line {
        state: cfg.state.to_string(),
        cutoff: d,
        self_distance: closed,
        commutator_form: commutator,
        difference: (closed - commutator).abs(),
        tolerance: SELF_TOL,
        truncation_bound: truncation_bound(d, tail),
    };
    let status = if line.difference <= SELF_TOL * closed.abs().max(1.0) {
        Status::Ok
    } else {
        Status::CheckFailed
    };
    let result = serde_json::to_value(&line)?;
    Ok((status, result, csv_bytes(&[line])?))
}

fn run_plan(cfg: &ExperimentConfig) -> Result<(Status, Value, Vec<u8>)> {
    let d = cfg.cutoff;
    let (pi, tail) = optimal_plan_coupling(cfg.plan, cfg.nu, cfg.nu_prime, d)?;
    let cost = CostOperator::gaussian(&fock_mode(d)?)?;
    let plan_cost = coupling_cost(&pi, &cost)?;
    let closed = thermal_qot(cfg.nu, cfg.nu_prime, 1)?.value;
    let marginal = pi.marginal_error()?;
    let bound = truncation_bound(d, tail);
    let mut result = json!({
        "kind": cfg.plan, "nu": cfg.nu, "nu_prime": cfg.nu_prime, "cutoff": d,
        "plan_cost": plan_cost, "closed_form": closed,
        "marginal_error": marginal.max_marginal(), "min_eigenvalue": marginal.min_eigenvalue,
        "tail": tail, "truncation_bound": bound,
    });
    let mut reports = Vec::new();
    if cfg.solve_sdp {
        let rho = thermal_state(cfg.nu, d)?;
        let sigma = thermal_state(cfg.nu_prime, d)?;
        let sol = solve_logged(&rho, &sigma, &cost, cfg, "iterations.csv")?;
        let meta = json!({"kind": cfg.plan, "cutoff": d, "sdp": solution_json(&sol, cfg.admm.tol_primal)});
        // pass iff plan_cost - sdp <= tolerance
        reports.push(CheckReport::graded(
            "plan_optimality",
            plan_cost - sol.value,
            0.0,
            cfg.plan_tol + bound,
            meta,
            sol.converged,
        ));
    }
    let status = reports_status(&reports);
    result["reports"] = serde_json::to_value(&reports)?;
    let csv = reports_csv(&reports)?;
    Ok((status, result, csv))
}

fn run_sandwich(cfg: &ExperimentConfig) -> Result<(Status, Value, Vec<u8>)> {
    let mut rng = rng_from_seed(derive_seed(cfg.seed, "sandwich"));
    let mu = match &cfg.mu {
        Some(m) => m.clone(),
        None => random_measure(&mut rng, cfg.max_atoms, cfg.radius)?,
    };
    let nu = match &cfg.nu_measure {
        Some(m) => m.clone(),
        None => random_measure(&mut rng, cfg.max_atoms, cfg.radius)?,
    };
    let (upper, lower) = check_sandwich(&mu, &nu, &cfg.grid, cfg.cutoff, &cfg.admm, cfg.sandwich_tol)?;
    let reports = vec![upper, lower];
    let status = reports_status(&reports);
    let result = json!({"mu": mu, "nu": nu, "reports": reports});
    Ok((status, result, reports_csv(&reports)?))
}

fn suite_manifest(cfg: &ExperimentConfig) -> Result<SuiteManifest> {
    match cfg.suite.as_str() {
        "default" | "acceptance" => Ok(SuiteManifest::acceptance(cfg.seed)),
        "smoke" => Ok(SuiteManifest::smoke(cfg.seed)),
        path => SuiteManifest::from_path(Path::new(path)),
    }
}

fn run_checks(cfg: &ExperimentConfig) -> Result<(Status, Value, Vec<u8>)> {
    let manifest = suite_manifest(cfg)?;
    let reports = run_suite(&manifest, cfg.jobs)?;
    let status = reports_status(&reports);
    let result = json!({"suite": cfg.suite, "seed": manifest.seed, "tally": tally(&reports), "reports": reports});
    Ok((status, result, reports_csv(&reports)?))
}

/// Executes `cfg` and writes `result.json` and `summary.csv` into `cfg.out`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let (status, result, summary) = match cfg.command {
        Command::Thermal => run_thermal(cfg)?,
        Command::Sdp => run_sdp(cfg)?,
        Command::SelfDistance => run_self(cfg)?,
        Command::Plan => run_plan(cfg)?,
        Command::Sandwich => run_sandwich(cfg)?,
        Command::Checks => run_checks(cfg)?,
    };
    let out = RunOutput {
        command: cfg.command,
        status,
        config: cfg.clone(),
        result,
    };
    write_atomic(&cfg.out.join("result.json"), serde_json::to_string_pretty(&out)?.as_bytes())?;
    write_atomic(&cfg.out.join("summary.csv"), &summary)?;
    Ok(out)
}
