use anyhow::Result;

use super::{CheckOutcome, Criterion, Size};
use crate::execute::run_preset;
use crate::presets::PRESETS;

/// Runs every preset twice at small size and compares the CSV artifacts byte
/// for byte. The size argument is ignored: repeating the full-size runs
/// would double the cost of the suite without exercising anything new.
pub fn determinism(_size: Size, seed: u64) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new(Criterion::Determinism);
    let dirs = [tempfile::tempdir()?, tempfile::tempdir()?];
    let mut files = 0;
    let mut differing = Vec::new();
    for p in &PRESETS {
        let runs = dirs
            .iter()
            .map(|d| run_preset(p, Size::Small, seed, &d.path().join(p.id)))
            .collect::<Result<Vec<_>>>()?;
        if runs[0].config_hash != runs[1].config_hash {
            differing.push(format!("{}/config", p.id));
        }
        for (a, b) in runs[0].artifacts.iter().zip(&runs[1].artifacts) {
            files += 1;
            let same = a.file == b.file
                && std::fs::read(dirs[0].path().join(p.id).join(&a.file))?
                    == std::fs::read(dirs[1].path().join(p.id).join(&b.file))?;
            if !same {
                differing.push(format!("{}/{}", p.id, a.file));
            }
        }
        if runs[0].artifacts.len() != runs[1].artifacts.len() {
            differing.push(format!("{}: artifact count", p.id));
        }
    }
    out.require(
        differing.is_empty(),
        format!("{} presets, {files} CSV files compared, differing: {differing:?}", PRESETS.len()),
    );
    Ok(out)
}
