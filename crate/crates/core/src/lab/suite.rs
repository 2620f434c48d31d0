//! Seeded suites of checks described by a JSON manifest.
//!
//! Every instance draws its inputs from `derive_seed(seed, "<check>/<k>")`,
//! so a report can be regenerated from the manifest alone.

use std::path::Path;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::classical::{p_mixture_state, DiscreteMeasure};
use crate::error::{QotError, Result};
use crate::fock::{displaced_thermal, thermal_state, GridSpec};
use crate::states::{
    channel_to_coupling, derive_seed, ginibre, random_channel, random_density, random_hermitian, rng_from_seed,
    DensityMatrix,
};
use crate::transport::{ADMMConfig, CostOperator};

use super::checks::*;
use super::report::CheckReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    /// Random full-rank triples with one random observable, `w = 1`.
    Triangle { count: usize, dim: usize, tol: f64 },
    /// Couplings `Π_Φ` of random channels on random states.
    ThmZero { count: usize, dim: usize, tol: f64 },
    /// Qubit pairs with independent random observables.
    Additivity { count: usize, tol: f64 },
    /// Random states of the given rank; also emits a `self_transport` report.
    WyConsistency {
        count: usize,
        dim: usize,
        rank: usize,
        tol_ab: f64,
        tol_c: f64,
        sdp_tol: f64,
    },
    /// Thermal and displaced-thermal inputs, `η` cycling through `etas`.
    Stam { count: usize, cutoff: usize, etas: Vec<f64>, tol: f64 },
    /// Random P-measures with up to `max_atoms` atoms in a disk of `radius`.
    Sandwich {
        count: usize,
        cutoff: usize,
        max_atoms: usize,
        radius: f64,
        grid: GridSpec,
        tol: f64,
    },
    LemmaRx { count: usize, min_dim: usize, max_dim: usize, tol: f64 },
    /// `count` configurations at each cutoff.
    BeamsplitterConvexity { count: usize, cutoffs: Vec<usize>, tol: f64 },
    /// `count` configurations at each cutoff.
    NoiseSubadditivity { count: usize, cutoffs: Vec<usize>, tol: f64 },
}

impl CheckSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CheckSpec::Triangle { .. } => "triangle",
            CheckSpec::ThmZero { .. } => "thm_zero",
            CheckSpec::Additivity { .. } => "additivity",
            CheckSpec::WyConsistency { .. } => "wy_consistency",
            CheckSpec::Stam { .. } => "stam",
            CheckSpec::Sandwich { .. } => "sandwich",
            CheckSpec::LemmaRx { .. } => "lemma_rx",
            CheckSpec::BeamsplitterConvexity { .. } => "beamsplitter_convexity",
            CheckSpec::NoiseSubadditivity { .. } => "noise_subadditivity",
        }
    }

    /// Number of instances.
    pub fn instances(&self) -> usize {
        match self {
            CheckSpec::Triangle { count, .. }
            | CheckSpec::ThmZero { count, .. }
            | CheckSpec::Additivity { count, .. }
            | CheckSpec::WyConsistency { count, .. }
            | CheckSpec::Stam { count, .. }
            | CheckSpec::Sandwich { count, .. }
            | CheckSpec::LemmaRx { count, .. } => *count,
            CheckSpec::BeamsplitterConvexity { count, cutoffs, .. }
            | CheckSpec::NoiseSubadditivity { count, cutoffs, .. } => count * cutoffs.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteManifest {
    pub seed: u64,
    #[serde(default)]
    pub admm: ADMMConfig,
    pub checks: Vec<CheckSpec>,
}

impl SuiteManifest {
    pub fn from_path(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// The property suites at the sizes of the acceptance gate.
    pub fn acceptance(seed: u64) -> Self {
        Self {
            seed,
            admm: ADMMConfig::accelerated(),
            checks: vec![
                CheckSpec::ThmZero { count: 100, dim: 3, tol: 1e-8 },
                CheckSpec::Triangle { count: 100, dim: 3, tol: 1e-5 },
                CheckSpec::Additivity { count: 20, tol: 1e-4 },
                CheckSpec::WyConsistency {
                    count: 20,
                    dim: 10,
                    rank: 2,
                    tol_ab: 1e-8,
                    tol_c: 1e-4,
                    sdp_tol: 1e-5,
                },
                CheckSpec::Stam {
                    count: 20,
                    cutoff: 16,
                    etas: vec![0.25, 0.5, 0.75],
                    tol: 1e-4,
                },
                CheckSpec::Sandwich {
                    count: 10,
                    cutoff: 20,
                    max_atoms: 3,
                    radius: 1.0,
                    grid: GridSpec::default(),
                    tol: 3e-2,
                },
                CheckSpec::LemmaRx {
                    count: 1000,
                    min_dim: 2,
                    max_dim: 6,
                    tol: 1e-9,
                },
                CheckSpec::BeamsplitterConvexity {
                    count: 10,
                    cutoffs: vec![12, 16],
                    tol: 2e-2,
                },
                CheckSpec::NoiseSubadditivity {
                    count: 10,
                    cutoffs: vec![12, 16],
                    tol: 2e-2,
                },
            ],
        }
    }

    /// A few instances of every check, for smoke runs.
    pub fn smoke(seed: u64) -> Self {
        let mut m = Self::acceptance(seed);
        for c in &mut m.checks {
            match c {
                CheckSpec::Triangle { count, .. }
                | CheckSpec::ThmZero { count, .. }
                | CheckSpec::Additivity { count, .. }
                | CheckSpec::WyConsistency { count, .. }
                | CheckSpec::Stam { count, .. }
                | CheckSpec::LemmaRx { count, .. } => *count = 3,
                CheckSpec::Sandwich { count, grid, .. } => {
                    *count = 1;
                    *grid = GridSpec { radius: 4.0, step: 0.4 };
                }
                CheckSpec::BeamsplitterConvexity { count, cutoffs, .. }
                | CheckSpec::NoiseSubadditivity { count, cutoffs, .. } => {
                    *count = 2;
                    *cutoffs = vec![12];
                }
            }
        }
        m
    }
}

fn uniform_in_disk(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    C64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Between 1 and `max_atoms` atoms uniform in the disk of `radius`, random weights.
pub fn random_measure(rng: &mut ChaCha8Rng, max_atoms: usize, radius: f64) -> Result<DiscreteMeasure> {
    let n = rng.random_range(1..=max_atoms);
    let pts = (0..n).map(|_| uniform_in_disk(rng, radius)).collect();
    let w = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    DiscreteMeasure::new(pts, w)
}

/// Zero-mean measure: `±z` with equal weight, optionally with an atom at 0.
fn zero_mean_measure(rng: &mut ChaCha8Rng, radius: f64) -> Result<DiscreteMeasure> {
    let z = uniform_in_disk(rng, radius);
    if rng.random_bool(0.5) {
        DiscreteMeasure::new(vec![z, -z], vec![0.5, 0.5])
    } else {
        let p = rng.random_range(0.1..0.45);
        DiscreteMeasure::new(vec![z, -z, C64::new(0.0, 0.0)], vec![p, p, 1.0 - 2.0 * p])
    }
}

/// `½(|m+a><m+a| + |m-a><m-a|)`, mean `m`.
fn coherent_pair(m: C64, a: C64, d: usize) -> Result<DensityMatrix> {
    p_mixture_state(&DiscreteMeasure::new(vec![m + a, m - a], vec![0.5, 0.5])?, d)
}

fn single_observable(rng: &mut ChaCha8Rng, d: usize) -> Result<CostOperator> {
    CostOperator::new(vec![random_hermitian(d, rng)], 1.0)
}

fn run_instance(spec: &CheckSpec, k: usize, seed: u64, admm: &ADMMConfig) -> Result<Vec<CheckReport>> {
    let inst_seed = derive_seed(seed, &format!("{}/{k}", spec.name()));
    let mut rng = rng_from_seed(inst_seed);
    let rng = &mut rng;
    let tag = |mut r: CheckReport| {
        if let serde_json::Value::Object(m) = &mut r.metadata {
            m.insert("seed".into(), json!(seed));
            m.insert("instance".into(), json!(k));
            m.insert("instance_seed".into(), json!(inst_seed));
        }
        r
    };
    let reports = match spec {
        CheckSpec::Triangle { dim, tol, .. } => {
            let cost = single_observable(rng, *dim)?;
            let [a, b, c] = [(); 3].map(|_| random_density(*dim, *dim, rng));
            vec![check_triangle(&a?, &b?, &c?, &cost, admm, *tol)?]
        }
        CheckSpec::ThmZero { dim, tol, .. } => {
            let cost = single_observable(rng, *dim)?;
            let rho = random_density(*dim, *dim, rng)?;
            let n_kraus = rng.random_range(1..=*dim);
            let ch = random_channel(*dim, *dim, n_kraus, rng)?;
            vec![check_thm_zero(&channel_to_coupling(&ch, &rho)?, &cost, *tol)?]
        }
        CheckSpec::Additivity { tol, .. } => {
            let c1 = single_observable(rng, 2)?;
            let c2 = single_observable(rng, 2)?;
            let s: Vec<DensityMatrix> = (0..4).map(|_| random_density(2, 2, rng)).collect::<Result<_>>()?;
            vec![check_additivity(&s[0], &s[1], &c1, &s[2], &s[3], &c2, admm, *tol)?]
        }
        CheckSpec::WyConsistency {
            dim,
            rank,
            tol_ab,
            tol_c,
            sdp_tol,
            ..
        } => {
            let rho = random_density(*dim, *rank, rng)?;
            let cost = CostOperator::gaussian(&crate::fock::fock_mode(*dim)?)?;
            vec![
                wy_consistency(&rho, *tol_ab, *tol_c)?,
                check_self_transport(&rho, &cost, admm, *sdp_tol)?,
            ]
        }
        CheckSpec::Stam { cutoff, etas, tol, .. } => {
            let eta = etas[k % etas.len()];
            let d = *cutoff;
            let mut draw = |displaced: bool| -> Result<DensityMatrix> {
                let nu = rng.random_range(0.5..1.2);
                if displaced {
                    Ok(displaced_thermal(nu, uniform_in_disk(rng, 0.5), d)?.0)
                } else {
                    thermal_state(nu, d)
                }
            };
            let rho0 = draw(k % 2 == 1)?;
            let rho1 = draw(k % 4 >= 2)?;
            vec![check_stam(&rho0, &rho1, eta, d, *tol)?]
        }
        CheckSpec::Sandwich {
            cutoff,
            max_atoms,
            radius,
            grid,
            tol,
            ..
        } => {
            let mu = random_measure(rng, *max_atoms, *radius)?;
            let nu = random_measure(rng, *max_atoms, *radius)?;
            let (up, low) = check_sandwich(&mu, &nu, grid, *cutoff, admm, *tol)?;
            vec![up, low]
        }
        CheckSpec::LemmaRx {
            min_dim, max_dim, tol, ..
        } => {
            if *min_dim == 0 || min_dim > max_dim {
                return Err(QotError::InvalidParameter(format!("dimension range {min_dim}..={max_dim}")));
            }
            let d = rng.random_range(*min_dim..=*max_dim);
            let x = ginibre(d, d, rng);
            let r = random_hermitian(d, rng);
            vec![check_lemma_rx(&x, &r, *tol)?]
        }
        CheckSpec::BeamsplitterConvexity { count, cutoffs, tol } => {
            let d = cutoffs[k / count];
            let eta = rng.random_range(0.05..0.95);
            let mut pair = |thermal: bool| -> Result<(DensityMatrix, DensityMatrix)> {
                if thermal {
                    let nu = rng.random_range(0.5..1.0);
                    Ok((thermal_state(0.5, d)?, thermal_state(nu, d)?))
                } else {
                    let m = uniform_in_disk(rng, 0.3);
                    let a = uniform_in_disk(rng, 0.4);
                    let b = uniform_in_disk(rng, 0.4);
                    Ok((coherent_pair(m, a, d)?, coherent_pair(m, b, d)?))
                }
            };
            let (rho0, sigma0) = pair(k % 3 == 0)?;
            let (rho1, sigma1) = pair(k % 3 == 0)?;
            vec![check_beamsplitter_convexity(&rho0, &rho1, &sigma0, &sigma1, eta, d, admm, *tol)?]
        }
        CheckSpec::NoiseSubadditivity { count, cutoffs, tol } => {
            let d = cutoffs[k / count];
            let (rho0, sigma0) = if k % 3 == 0 {
                (thermal_state(0.5, d)?, thermal_state(rng.random_range(0.5..0.9), d)?)
            } else {
                let zero = C64::new(0.0, 0.0);
                (
                    coherent_pair(zero, uniform_in_disk(rng, 0.3), d)?,
                    coherent_pair(zero, uniform_in_disk(rng, 0.3), d)?,
                )
            };
            let mu = zero_mean_measure(rng, 0.4)?;
            let nu = zero_mean_measure(rng, 0.4)?;
            vec![check_noise_subadditivity(&rho0, &sigma0, &mu, &nu, d, admm, *tol)?]
        }
    };
    Ok(reports.into_iter().map(tag).collect())
}

/// Runs every instance of every check on `jobs` threads (`0` = rayon
/// default). Reports come back in manifest order. An instance that errors
/// (for instance a violated hypothesis) yields an inconclusive report
/// carrying the error message.
pub fn run_suite(manifest: &SuiteManifest, jobs: usize) -> Result<Vec<CheckReport>> {
    manifest.admm.validate()?;
    let work: Vec<(&CheckSpec, usize)> = manifest
        .checks
        .iter()
        .flat_map(|c| (0..c.instances()).map(move |k| (c, k)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| QotError::InvalidParameter(format!("thread pool: {e}")))?;
    let out: Vec<Vec<CheckReport>> = pool.install(|| {
        work.par_iter()
            .map(|&(spec, k)| match run_instance(spec, k, manifest.seed, &manifest.admm) {
                Ok(r) => r,
                Err(e) => vec![CheckReport::inconclusive(
                    spec.name(),
                    f64::NAN,
                    f64::NAN,
                    0.0,
                    json!({"seed": manifest.seed, "instance": k, "error": e.to_string()}),
                )],
            })
            .collect()
    });
    Ok(out.into_iter().flatten().collect())
}

/// Runs a single check kind from a manifest.
pub fn run_check(manifest: &SuiteManifest, name: &str, jobs: usize) -> Result<Vec<CheckReport>> {
    let checks: Vec<CheckSpec> = manifest.checks.iter().filter(|c| c.name() == name).cloned().collect();
    if checks.is_empty() {
        return Err(QotError::InvalidInput(format!("no check named {name:?} in the manifest")));
    }
    run_suite(
        &SuiteManifest {
            checks,
            ..manifest.clone()
        },
        jobs,
    )
}
