//! Text summary of a run directory.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;

use crate::execute::TRAJECTORY;
use crate::manifest::{hash_file, Manifest, Status};
use crate::table::{short, Table};

pub fn emit_report(dir: &Path) -> Result<String> {
    let m = Manifest::read(dir)?;
    let mut s = String::new();
    let size = m.size.map(|z| format!(" size {z:?}").to_lowercase()).unwrap_or_default();
    writeln!(s, "{} seed {}{size} config {}", m.name, m.seed, &m.config_hash[..12])?;
    for c in &m.checks {
        writeln!(s, "{}", c.line())?;
    }
    for a in &m.artifacts {
        let path = dir.join(&a.file);
        match hash_file(&path) {
            Ok(h) if h == a.sha256 => {}
            Ok(_) => writeln!(s, "WARNING {} changed since the run", a.file)?,
            Err(_) => writeln!(s, "WARNING {} is missing", a.file)?,
        }
        if a.summary && path.exists() {
            let t = Table::read_csv(&path)?;
            writeln!(s, "\n{}", t.render())?;
        }
    }
    if m.artifacts.iter().any(|a| a.file == format!("{TRAJECTORY}.csv")) {
        let t = Table::read_csv(&dir.join(format!("{TRAJECTORY}.csv")))?;
        if let Some(last) = t.rows.last() {
            let fields: Vec<String> = t.columns.iter().zip(last).map(|(c, v)| format!("{c}={v}")).collect();
            writeln!(s, "final: {}", fields.join(" "))?;
        }
    }
    match &m.status {
        Status::Passed => writeln!(s, "status: passed")?,
        Status::Failed => {
            let n = m.checks.iter().filter(|c| !c.passed).count();
            writeln!(s, "status: failed ({n} of {} checks)", m.checks.len())?
        }
        Status::Diverged { t, reason, last_healthy } => {
            write!(s, "DIVERGED at t={t} ({reason})")?;
            match last_healthy {
                Some(h) => writeln!(
                    s,
                    " with last healthy norms at t={}: energy={} smallness={} low={} a_high={} u_high={}",
                    h.t,
                    short(h.energy),
                    short(h.smallness),
                    short(h.low),
                    short(h.a_high),
                    short(h.u_high)
                )?,
                None => writeln!(s, " before any healthy output")?,
            }
        }
    }
    Ok(s)
}
