//! Experiment harness: acceptance checks, presets, TOML configs, run
//! manifests and reports.

pub mod checks;
pub mod config;
pub mod execute;
pub mod manifest;
pub mod presets;
pub mod report;
pub mod table;
