//! Driving the runner from code: config, overrides, artifacts, merged report.
use qot::runner::{merge, run, Command, ExperimentConfig};

fn main() -> qot::Result<()> {
    let out = std::env::temp_dir().join("qot-example-run");
    let overrides = [
        "nu_grid=[0.5, 1.0]".to_string(),
        "nu_prime_grid=[0.5, 1.5]".to_string(),
        "cutoff=12".to_string(),
        format!("out={:?}", out.display().to_string()),
    ];
    let cfg = ExperimentConfig::load(None, Some(Command::Thermal), &overrides)?;
    let result = run(&cfg)?;
    println!("status {:?}", result.status);
    println!("{}", std::fs::read_to_string(out.join("summary.csv"))?);

    let merged = merge(&[out.join("result.json")])?;
    print!("{}", merged.text());
    Ok(())
}
