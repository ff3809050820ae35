//! Scenario files, built-in presets and the artifact writer behind the
//! `lcse` command.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod presets;
pub mod runner;

pub use config::{parse_config, Mode, ScenarioConfig};
pub use error::CliError;
pub use runner::{run, RunManifest};

use std::path::Path;

/// Reads and parses a scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text).map_err(CliError::Config)
}

/// Looks up a preset by name.
pub fn preset_config(name: &str) -> Result<ScenarioConfig, CliError> {
    presets::find(name)
        .map(|p| p.config())
        .ok_or_else(|| CliError::UnknownPreset(name.to_string()))
}
