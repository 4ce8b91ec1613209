//! Library half of the `qjulia` command: JSON configs and the jobs they drive.

pub mod commands;
pub mod config;

pub use commands::{run_render, run_slice, run_sweep, Overrides, RenderSummary, SweepRow};
pub use config::{parse_config, serialize_config, ConfigError, RenderConfig};

use std::path::Path;

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> anyhow::Result<RenderConfig> {
    use anyhow::Context;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}
