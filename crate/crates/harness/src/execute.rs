//! Runs a preset or a config file into an output directory.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nsk_core::solver::{run, RunStatus};
use serde_json::json;

use crate::checks::{trajectory_table, Size};
use crate::config::{parse_config, RunConfig};
use crate::manifest::{config_hash, hash_file, Artifact, LastHealthy, Manifest, Status, Versions};
use crate::presets::{find_preset, Preset, PRESETS};
use crate::table::Table;

pub const TRAJECTORY: &str = "trajectory";
pub const CONFIG_ECHO: &str = "config.toml";

fn record(dir: &Path, table: &Table, artifacts: &mut Vec<Artifact>) -> Result<()> {
    table.write_csv(dir)?;
    let file = table.file_name();
    artifacts.push(Artifact {
        sha256: hash_file(&dir.join(&file))?,
        file,
        summary: table.summary,
    });
    Ok(())
}

pub fn run_preset(preset: &Preset, size: Size, seed: u64, out: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut checks = Vec::new();
    let mut artifacts = Vec::new();
    let mut names = BTreeSet::new();
    for &c in preset.criteria {
        let outcome = c.run(size, seed)?;
        for table in &outcome.tables {
            if !names.insert(table.name.clone()) {
                bail!("preset {} writes table {} twice", preset.id, table.name);
            }
            record(out, table, &mut artifacts)?;
        }
        checks.push(outcome);
    }
    let config = json!({
        "preset": preset.id,
        "size": size,
        "seed": seed,
        "criteria": preset.criteria,
    });
    let status = if checks.iter().all(|c| c.passed) { Status::Passed } else { Status::Failed };
    let manifest = Manifest {
        name: preset.id.to_string(),
        seed,
        size: Some(size),
        config_hash: config_hash(&config),
        config,
        versions: Versions::current(),
        status,
        checks,
        artifacts,
    };
    manifest.write(out)?;
    Ok(manifest)
}

pub fn run_config(name: &str, cfg: &RunConfig, seed: u64, out: &Path) -> Result<Manifest> {
    let sim = cfg.to_sim_config(seed)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let traj = run(&sim)?;
    let mut artifacts = Vec::new();
    record(out, &trajectory_table(TRAJECTORY, &traj), &mut artifacts)?;
    std::fs::write(out.join(CONFIG_ECHO), cfg.to_toml()?)?;
    artifacts.push(Artifact {
        file: CONFIG_ECHO.to_string(),
        sha256: hash_file(&out.join(CONFIG_ECHO))?,
        summary: false,
    });
    let status = match &traj.status {
        RunStatus::Healthy => Status::Passed,
        RunStatus::Diverged { t, reason } => Status::Diverged {
            t: *t,
            reason: reason.clone(),
            last_healthy: traj.diagnostics.iter().rev().find(|d| d.is_finite()).map(|d| LastHealthy {
                t: d.t,
                energy: d.energy,
                smallness: d.smallness,
                low: d.low,
                a_high: d.a_high,
                u_high: d.u_high,
            }),
        },
    };
    let config = json!({ "config": cfg, "seed": seed });
    let manifest = Manifest {
        name: name.to_string(),
        seed,
        size: None,
        config_hash: config_hash(&config),
        config,
        versions: Versions::current(),
        status,
        checks: Vec::new(),
        artifacts,
    };
    manifest.write(out)?;
    Ok(manifest)
}

/// A preset id, or a path to a TOML config.
pub fn run_target(target: &str, size: Size, seed: u64, out: &Path) -> Result<Manifest> {
    if let Some(p) = find_preset(target) {
        return run_preset(p, size, seed, out);
    }
    let path = PathBuf::from(target);
    if path.extension().is_some_and(|e| e == "toml") || path.is_file() {
        let cfg = parse_config(&path)?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        return run_config(&name, &cfg, seed, out);
    }
    let ids: Vec<_> = PRESETS.iter().map(|p| p.id).collect();
    bail!("unknown preset `{target}` (known: {}); config files need a .toml path", ids.join(", "))
}

pub fn default_out_dir(target: &str, seed: u64) -> PathBuf {
    let stem = Path::new(target)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| target.to_string());
    PathBuf::from("runs").join(format!("{stem}-seed{seed}"))
}
