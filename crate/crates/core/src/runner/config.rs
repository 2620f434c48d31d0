use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classical::DiscreteMeasure;
use crate::error::{QotError, Result};
use crate::fock::{coherent_state, displaced_thermal, thermal_state, GridSpec, ThermalParam};
use crate::states::{derive_seed, random_density, rng_from_seed, DensityMatrix};
use crate::transport::{ADMMConfig, PlanKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Thermal,
    Sdp,
    #[serde(rename = "self")]
    SelfDistance,
    Plan,
    Sandwich,
    Checks,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Thermal => "thermal",
            Command::Sdp => "sdp",
            Command::SelfDistance => "self",
            Command::Plan => "plan",
            Command::Sandwich => "sandwich",
            Command::Checks => "checks",
        }
    }
}

/// A single-mode state at a given cutoff, written as
/// `vacuum`, `thermal:NU`, `coherent:RE,IM`, `displaced_thermal:NU,RE,IM`,
/// `fock:N` or `random:RANK` (drawn from the experiment seed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StateSpec {
    Vacuum,
    Thermal(f64),
    Coherent(C64),
    DisplacedThermal(f64, C64),
    Fock(usize),
    Random(usize),
}

fn floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| QotError::InvalidInput(format!("{what}: {e}")))?;
    if v.len() != n {
        return Err(QotError::InvalidInput(format!("{what} takes {n} numbers, got {}", v.len())));
    }
    Ok(v)
}

impl FromStr for StateSpec {
    type Err = QotError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        match kind.trim() {
            "vacuum" => Ok(Self::Vacuum),
            "thermal" => Ok(Self::Thermal(floats(args, 1, "thermal")?[0])),
            "coherent" => {
                let v = floats(args, 2, "coherent")?;
                Ok(Self::Coherent(C64::new(v[0], v[1])))
            }
            "displaced_thermal" => {
                let v = floats(args, 3, "displaced_thermal")?;
                Ok(Self::DisplacedThermal(v[0], C64::new(v[1], v[2])))
            }
            "fock" | "random" => {
                let n: usize = args
                    .trim()
                    .parse()
                    .map_err(|e| QotError::InvalidInput(format!("{kind}: {e}")))?;
                Ok(if kind == "fock" { Self::Fock(n) } else { Self::Random(n) })
            }
            other => Err(QotError::InvalidInput(format!("unknown state {other:?}"))),
        }
    }
}

impl TryFrom<String> for StateSpec {
    type Error = QotError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<StateSpec> for String {
    fn from(s: StateSpec) -> String {
        s.to_string()
    }
}

impl std::fmt::Display for StateSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Vacuum => write!(f, "vacuum"),
            Self::Thermal(nu) => write!(f, "thermal:{nu}"),
            Self::Coherent(z) => write!(f, "coherent:{},{}", z.re, z.im),
            Self::DisplacedThermal(nu, z) => write!(f, "displaced_thermal:{nu},{},{}", z.re, z.im),
            Self::Fock(n) => write!(f, "fock:{n}"),
            Self::Random(r) => write!(f, "random:{r}"),
        }
    }
}

impl StateSpec {
    /// The state at cutoff `d` and its truncation tail. `stream` names the
    /// random stream for `random:R`.
    pub fn build(&self, d: usize, seed: u64, stream: &str) -> Result<(DensityMatrix, f64)> {
        match *self {
            Self::Vacuum => Ok((thermal_state(0.5, d)?, 0.0)),
            Self::Thermal(nu) => Ok((thermal_state(nu, d)?, ThermalParam::new(nu)?.tail(d))),
            Self::Coherent(z) => Ok((coherent_state(z, d)?, crate::fock::coherent_tail(z, d))),
            Self::DisplacedThermal(nu, z) => displaced_thermal(nu, z, d),
            Self::Fock(n) => {
                if n >= d {
                    return Err(QotError::InvalidParameter(format!("Fock level {n} at cutoff {d}")));
                }
                Ok((DensityMatrix::basis(d, n)?, 0.0))
            }
            Self::Random(rank) => {
                let mut rng = rng_from_seed(derive_seed(seed, stream));
                Ok((random_density(d, rank, &mut rng)?, 0.0))
            }
        }
    }
}

fn default_cutoff() -> usize {
    20
}
fn half() -> f64 {
    0.5
}
fn one() -> usize {
    1
}
fn yes() -> bool {
    true
}
fn default_atoms() -> usize {
    3
}
fn default_radius() -> f64 {
    1.0
}
fn default_sandwich_tol() -> f64 {
    3e-2
}
fn default_plan_tol() -> f64 {
    3e-2
}
fn default_suite() -> String {
    "default".into()
}
fn default_out() -> PathBuf {
    PathBuf::from("qot-out")
}
fn vacuum() -> StateSpec {
    StateSpec::Vacuum
}

/// One experiment. Every field has a default, so `{"command": "thermal"}` is
/// a complete document; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; `0` lets rayon decide.
    #[serde(default)]
    pub jobs: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,

    #[serde(default = "half")]
    pub nu: f64,
    #[serde(default = "half")]
    pub nu_prime: f64,
    #[serde(default = "one")]
    pub modes: usize,
    /// Thermal table grid; every pair with `ν <= ν'` is evaluated. Empty
    /// means the single pair `(nu, nu_prime)`.
    #[serde(default)]
    pub nu_grid: Vec<f64>,
    #[serde(default)]
    pub nu_prime_grid: Vec<f64>,
    /// Also solve the SDP (single mode only) in `thermal` and `plan`.
    #[serde(default = "yes")]
    pub solve_sdp: bool,

    /// Source state for `sdp` and `self`.
    #[serde(default = "vacuum")]
    pub state: StateSpec,
    /// Target state for `sdp`.
    #[serde(default = "vacuum")]
    pub target: StateSpec,

    #[serde(default = "default_plan_kind")]
    pub plan: PlanKind,
    #[serde(default = "default_plan_tol")]
    pub plan_tol: f64,

    /// Sandwich measures; drawn from the seed when absent.
    #[serde(default)]
    pub mu: Option<DiscreteMeasure>,
    #[serde(default)]
    pub nu_measure: Option<DiscreteMeasure>,
    #[serde(default = "default_atoms")]
    pub max_atoms: usize,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_sandwich_tol")]
    pub sandwich_tol: f64,

    /// `default`, `smoke`, or a path to a suite manifest.
    #[serde(default = "default_suite")]
    pub suite: String,

    #[serde(default)]
    pub admm: ADMMConfig,
    /// Write `iterations.csv` for each solve.
    #[serde(default)]
    pub log_iterations: bool,
}

fn default_plan_kind() -> PlanKind {
    PlanKind::Amplifier
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        serde_json::from_value(serde_json::json!({ "command": command })).expect("defaults are valid")
    }

    /// Reads `path` (if any), applies `key=value` overrides in order and
    /// validates the result.
    pub fn load(path: Option<&Path>, command: Option<Command>, overrides: &[String]) -> Result<Self> {
        let mut doc = match path {
            Some(p) => serde_json::from_str::<Value>(&std::fs::read_to_string(p)?)?,
            None => Value::Object(Default::default()),
        };
        if !doc.is_object() {
            return Err(QotError::InvalidInput("config must be a JSON object".into()));
        }
        if let Some(c) = command {
            match doc.get("command") {
                Some(existing) if *existing != serde_json::to_value(c)? => {
                    return Err(QotError::InvalidInput(format!(
                        "config is for command {existing}, invoked as {}",
                        c.name()
                    )))
                }
                _ => {
                    doc["command"] = serde_json::to_value(c)?;
                }
            }
        }
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: Self = serde_json::from_value(doc)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(QotError::InvalidParameter(m));
        if self.cutoff < 2 || self.cutoff > 200 {
            return bad(format!("cutoff {} outside 2..=200", self.cutoff));
        }
        if self.modes == 0 {
            return bad("modes must be at least 1".into());
        }
        for &nu in [self.nu, self.nu_prime].iter().chain(&self.nu_grid).chain(&self.nu_prime_grid) {
            ThermalParam::new(nu)?;
        }
        if self.nu_grid.is_empty() != self.nu_prime_grid.is_empty() {
            return bad("nu_grid and nu_prime_grid go together".into());
        }
        if self.max_atoms == 0 || !(self.radius >= 0.0) || !self.radius.is_finite() {
            return bad("max_atoms must be positive and radius finite".into());
        }
        for t in [self.sandwich_tol, self.plan_tol] {
            if !(t >= 0.0) || !t.is_finite() {
                return bad(format!("tolerance {t}"));
            }
        }
        self.grid.validate()?;
        self.admm.validate()?;
        if self.command == Command::Plan && self.nu > self.nu_prime {
            return bad(format!("plan needs nu <= nu_prime, got ({}, {})", self.nu, self.nu_prime));
        }
        Ok(())
    }

    /// `(ν, ν')` pairs of the thermal table, sorted.
    pub fn thermal_pairs(&self) -> Vec<(f64, f64)> {
        let mut pairs: Vec<(f64, f64)> = if self.nu_grid.is_empty() {
            vec![(self.nu, self.nu_prime)]
        } else {
            self.nu_grid
                .iter()
                .flat_map(|&a| self.nu_prime_grid.iter().map(move |&b| (a, b)))
                .filter(|(a, b)| a <= b)
                .collect()
        };
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        pairs.dedup();
        pairs
    }
}

/// `a.b.c=VALUE`; the value is parsed as JSON and kept as a string otherwise.
pub fn apply_override(doc: &mut Value, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| QotError::InvalidInput(format!("override {spec:?} is not KEY=VALUE")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(QotError::InvalidInput(format!("empty key segment in {key:?}")));
        }
        let obj = match node {
            Value::Object(m) => m,
            _ => return Err(QotError::InvalidInput(format!("{key:?}: {part:?} is not inside an object"))),
        };
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("split yields at least one segment")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_nest_and_unknown_keys_fail() {
        let cfg = ExperimentConfig::load(
            None,
            Some(Command::Sdp),
            &["admm.max_iter=7".into(), "state=thermal:0.8".into(), "cutoff=10".into()],
        )
        .unwrap();
        assert_eq!(cfg.admm.max_iter, 7);
        assert_eq!(cfg.state, StateSpec::Thermal(0.8));
        assert_eq!(cfg.cutoff, 10);
        assert!(ExperimentConfig::load(None, Some(Command::Sdp), &["colour=red".into()]).is_err());
        assert!(ExperimentConfig::load(None, Some(Command::Sdp), &["admm.speed=1".into()]).is_err());
        assert!(ExperimentConfig::load(None, Some(Command::Sdp), &["nu=0.2".into()]).is_err());
    }

    #[test]
    fn state_specs_roundtrip() {
        for s in ["vacuum", "thermal:1.5", "coherent:0.3,-0.1", "displaced_thermal:0.7,0.2,0", "fock:2", "random:3"] {
            let spec: StateSpec = s.parse().unwrap();
            assert_eq!(spec.to_string().parse::<StateSpec>().unwrap(), spec);
        }
        assert!("thermal:".parse::<StateSpec>().is_err());
        assert!("squeezed:1".parse::<StateSpec>().is_err());
    }

    #[test]
    fn thermal_pairs_are_ordered() {
        let mut cfg = ExperimentConfig::new(Command::Thermal);
        cfg.nu_grid = vec![1.0, 0.5];
        cfg.nu_prime_grid = vec![2.0, 0.5];
        assert_eq!(cfg.thermal_pairs(), vec![(0.5, 0.5), (0.5, 2.0), (1.0, 2.0)]);
    }
}
