//! Experiment configuration and the command implementations behind the CLI.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

mod commands;
mod config;
mod report;

pub use commands::{exit_code, run, RunOutput, Status, ThermalRow};
pub use config::{apply_override, Command, ExperimentConfig, StateSpec};
pub use report::{merge, write_merged, FamilySummary, MergedReport};

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
