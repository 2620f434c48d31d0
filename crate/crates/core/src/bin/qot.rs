use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use qot::runner::{exit_code, merge, run, write_merged, Command, ExperimentConfig};
use qot::QotError;

#[derive(Parser)]
#[command(name = "qot", version, about = "Quantum optimal transport experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form thermal distances, optionally against the SDP.
    Thermal(RunArgs),
    /// Solve the coupling SDP between two states.
    Sdp(RunArgs),
    /// Self-distance of a state.
    #[command(name = "self")]
    SelfDistance(RunArgs),
    /// Cost of the amplifier or attenuator plan between thermal states.
    Plan(RunArgs),
    /// Semiclassical upper and lower bounds for two P-measures.
    Sandwich(RunArgs),
    /// Run an inequality suite.
    Checks(RunArgs),
    /// Merge result files and summarize margins.
    Report {
        paths: Vec<PathBuf>,
        #[arg(long, default_value = "qot-report")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set admm.max_iter=2000`. Repeatable.
    #[arg(long = "set", value_name = "K=V")]
    set: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long = "nu-prime")]
    nu_prime: Option<f64>,
    #[arg(short = 'm', long)]
    modes: Option<usize>,
    /// State, e.g. `vacuum`, `thermal:1.5`, `coherent:0.3,0`, `random:2`.
    #[arg(long)]
    state: Option<String>,
    #[arg(long)]
    target: Option<String>,
    /// `amplifier` or `attenuator`.
    #[arg(long)]
    kind: Option<String>,
    /// `default`, `smoke`, or a manifest path.
    #[arg(long)]
    suite: Option<String>,
    /// Skip the SDP in `thermal` and `plan`.
    #[arg(long)]
    no_sdp: bool,
    /// Write iterations.csv for each solve.
    #[arg(long)]
    log_iterations: bool,
}

impl RunArgs {
    fn overrides(&self) -> Vec<String> {
        let mut o = Vec::new();
        let mut push = |k: &str, v: serde_json::Value| o.push(format!("{k}={v}"));
        if let Some(v) = &self.out {
            push("out", json!(v));
        }
        if let Some(v) = self.seed {
            push("seed", json!(v));
        }
        if let Some(v) = self.jobs {
            push("jobs", json!(v));
        }
        if let Some(v) = self.cutoff {
            push("cutoff", json!(v));
        }
        if let Some(v) = self.nu {
            push("nu", json!(v));
        }
        if let Some(v) = self.nu_prime {
            push("nu_prime", json!(v));
        }
        if let Some(v) = self.modes {
            push("modes", json!(v));
        }
        if let Some(v) = &self.state {
            push("state", json!(v));
        }
        if let Some(v) = &self.target {
            push("target", json!(v));
        }
        if let Some(v) = &self.kind {
            push("plan", json!(v));
        }
        if let Some(v) = &self.suite {
            push("suite", json!(v));
        }
        if self.no_sdp {
            push("solve_sdp", json!(false));
        }
        if self.log_iterations {
            push("log_iterations", json!(true));
        }
        o.extend(self.set.iter().cloned());
        o
    }
}

fn execute(command: Command, args: &RunArgs) -> qot::Result<qot::runner::Status> {
    let cfg = ExperimentConfig::load(args.config.as_deref(), Some(command), &args.overrides())?;
    let out = run(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&out.result)?);
    eprintln!("{}: {:?}, artifacts in {}", command.name(), out.status, cfg.out.display());
    Ok(out.status)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (command, args) = match cli.cmd {
        Cmd::Thermal(a) => (Command::Thermal, a),
        Cmd::Sdp(a) => (Command::Sdp, a),
        Cmd::SelfDistance(a) => (Command::SelfDistance, a),
        Cmd::Plan(a) => (Command::Plan, a),
        Cmd::Sandwich(a) => (Command::Sandwich, a),
        Cmd::Checks(a) => (Command::Checks, a),
        Cmd::Report { paths, out } => {
            let outcome = merge(&paths).and_then(|m| {
                write_merged(&m, &out)?;
                print!("{}", m.text());
                Ok(m.status())
            });
            if let Err(e) = &outcome {
                eprintln!("error: {e}");
            }
            return ExitCode::from(exit_code(&outcome) as u8);
        }
    };
    let outcome = execute(command, &args);
    if let Err(e) = &outcome {
        eprintln!("error: {e}");
        if matches!(e, QotError::Json(_)) {
            eprintln!("(check the config keys and value types)");
        }
    }
    ExitCode::from(exit_code(&outcome) as u8)
}
