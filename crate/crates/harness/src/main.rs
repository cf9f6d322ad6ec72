use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use nsk_harness::checks::Size;
use nsk_harness::execute::{default_out_dir, run_target};
use nsk_harness::manifest::Manifest;
use nsk_harness::presets::PRESETS;
use nsk_harness::report::emit_report;

/// Experiments for the linearized and nonlinear capillary compressible flow.
#[derive(Parser)]
#[command(name = "nsk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a TOML config and write CSVs plus manifest.json.
    Run {
        /// Preset id (see `list-presets`) or path to a .toml file.
        target: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory; defaults to runs/<target>-seed<seed>.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Size::Default)]
        size: Size,
    },
    /// Print the summary of a run directory.
    Report { dir: PathBuf },
    /// List the preset ids.
    ListPresets,
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("NSK_THREADS") {
        let n: usize = v.parse().with_context(|| format!("NSK_THREADS = {v:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn exit_for(m: &Manifest) -> ExitCode {
    if m.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main_inner() -> Result<ExitCode> {
    let cli = Cli::parse();
    init_threads()?;
    match cli.command {
        Command::Run { target, seed, out, size } => {
            let out = out.unwrap_or_else(|| default_out_dir(&target, seed));
            let m = run_target(&target, size, seed, &out)?;
            print!("{}", emit_report(&out)?);
            println!("wrote {}", out.display());
            Ok(exit_for(&m))
        }
        Command::Report { dir } => {
            print!("{}", emit_report(&dir)?);
            Ok(exit_for(&Manifest::read(&dir)?))
        }
        Command::ListPresets => {
            for p in &PRESETS {
                let ids: Vec<String> = p.criteria.iter().map(|c| format!("c{:02}", c.number())).collect();
                println!("{:<20} [{}] {}", p.id, ids.join(" "), p.description);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
