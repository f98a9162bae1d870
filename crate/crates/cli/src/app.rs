//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};
use swarmbeam_core::{run_sweep, run_sweep_with_workers};

use crate::config::FileConfig;
use crate::plot::{plot_svg, PlotOptions};
use crate::preset::{PresetId, DEFAULT_SEED};
use crate::report::write_csv;
use crate::verify::{render_table, run_checks};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "swarmbeam", version, about = "Wideband beamforming gain of random satellite swarms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct SweepArgs {
    /// Master seed; overrides the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for the CSV and SVG files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, env = "SWARMBEAM_WORKERS")]
    workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a sweep described by a TOML config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Run one of the built-in setups (fig3..fig8).
    Preset {
        #[arg(value_parser = clap::value_parser!(PresetId))]
        id: PresetId,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Run the built-in self-checks and print a PASS/FAIL table.
    Verify {
        /// Smaller sample counts; skips the beamwidth checks.
        #[arg(long)]
        quick: bool,
    },
    /// Render a sweep CSV as SVG.
    Plot {
        csv: PathBuf,
        /// Plot gains in dB.
        #[arg(long)]
        db: bool,
        /// Output file (default: next to the CSV).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl clap::builder::ValueParserFactory for PresetId {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<PresetId>())
    }
}

fn default_plot_path(csv: &Path, db: bool) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv.with_file_name(format!("{stem}{}.svg", if db { "_db" } else { "" }))
}

fn sweep_to_files(mut cfg: FileConfig, name: &str, args: &SweepArgs) -> anyhow::Result<()> {
    if let Some(seed) = args.seed {
        cfg.sweep.master_seed = seed;
    }
    let exp = cfg.resolve()?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot write output directory {}", args.out.display()))?;
    let result = match args.workers {
        Some(w) => run_sweep_with_workers(&exp, w),
        None => run_sweep(&exp),
    }?;
    let csv = args.out.join(format!("{name}.csv"));
    write_csv(&result, &cfg, &csv)
        .with_context(|| format!("cannot write output directory {}", args.out.display()))?;
    for db in [false, true] {
        let svg = default_plot_path(&csv, db);
        plot_svg(&csv, &svg, PlotOptions { db })?;
    }
    println!("{}", csv.display());
    Ok(())
}

fn dispatch(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Run { config, sweep } => {
            let cfg = FileConfig::load(&config)?;
            let name = cfg
                .name
                .clone()
                .or_else(|| config.file_stem().map(|s| s.to_string_lossy().into_owned()))
                .unwrap_or_else(|| "sweep".to_string());
            sweep_to_files(cfg, &name, &sweep)?;
        }
        Command::Preset { id, sweep } => {
            let cfg = id.file_config(sweep.seed.unwrap_or(DEFAULT_SEED));
            sweep_to_files(cfg, id.name(), &sweep)?;
        }
        Command::Verify { quick } => {
            let checks = run_checks(quick);
            print!("{}", render_table(&checks));
            if checks.iter().any(|c| !c.pass) {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
        Command::Plot { csv, db, out } => {
            let svg = out.unwrap_or_else(|| default_plot_path(&csv, db));
            plot_svg(&csv, &svg, PlotOptions { db })?;
            println!("{}", svg.display());
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => {
            let _ = std::io::stdout().flush();
            code
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INVALID
        }
    }
}
