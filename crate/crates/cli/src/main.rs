//! `survscan`: batch front end for the survey workflows.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error,
//! 3 accuracy verdict "fail".

mod commands;
mod config;
mod manifest;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use config::ConfigFile;
use manifest::{manifest_path, sha256_file, InputDigest, RunManifest};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl From<survscan::Error> for CliError {
    fn from(e: survscan::Error) -> CliError {
        CliError::Data(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "survscan", version, about = "Terrestrial laser-scan survey toolkit")]
pub struct Cli {
    /// Config file (default: ./survscan.conf if present).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (fallback: SURVSCAN_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Manifest path (default: beside the primary output).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Remove duplicates and statistical outliers.
    Filter(commands::FilterArgs),
    /// Label ground and non-ground points.
    Classify(commands::ClassifyArgs),
    /// Keep points inside a box or polygon.
    Crop(commands::CropArgs),
    /// Rigid registration from correspondence pairs, optional ICP refinement.
    Register(commands::RegisterArgs),
    /// Move a cloud into a georeferenced frame through control points.
    Georef(commands::GeorefArgs),
    /// Rasterise a DSM and write it as ESRI ASCII grid.
    Dsm(commands::DsmArgs),
    /// Stockpile volume and footprint area.
    Volume(commands::VolumeArgs),
    /// Vertical change between two epochs.
    Diff(commands::DiffArgs),
    /// Delaunay TIN exported as OBJ.
    Tin(commands::TinArgs),
    /// Repeated-scan target distance statistics.
    Accuracy(commands::AccuracyArgs),
    /// Mean nearest-neighbour spacing.
    Spacing(commands::SpacingArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Filter(_) => "filter",
            Command::Classify(_) => "classify",
            Command::Crop(_) => "crop",
            Command::Register(_) => "register",
            Command::Georef(_) => "georef",
            Command::Dsm(_) => "dsm",
            Command::Volume(_) => "volume",
            Command::Diff(_) => "diff",
            Command::Tin(_) => "tin",
            Command::Accuracy(_) => "accuracy",
            Command::Spacing(_) => "spacing",
        }
    }
}

/// What a subcommand read and wrote.
#[derive(Debug, Default)]
pub struct Outcome {
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub config: std::collections::BTreeMap<String, String>,
    pub exit: u8,
}

fn resolve_threads(cli: &Cli, cfg: &ConfigFile) -> Result<(usize, String), CliError> {
    let global = cfg.section("global");
    let env = match std::env::var("SURVSCAN_THREADS") {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
            CliError::Usage(format!("SURVSCAN_THREADS must be a positive integer, got '{v}'"))
        })?),
        Err(_) => None,
    };
    let n = global.opt("threads", cli.threads.or(env))?.unwrap_or(0);
    global.finish()?;
    if cli.threads == Some(0) {
        return Err(CliError::Usage("--threads must be ≥ 1".into()));
    }
    let n = if n == 0 { std::thread::available_parallelism().map_or(1, |n| n.get()) } else { n };
    Ok((n, n.to_string()))
}

fn run(cli: Cli, argv: Vec<String>) -> Result<u8, CliError> {
    let started = Instant::now();
    let cfg = ConfigFile::locate(cli.config.as_deref())?;
    let (threads, _) = resolve_threads(&cli, &cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} worker threads: {e}")))?;
    let name = cli.command.name();
    let outcome = pool.install(|| commands::dispatch(&cli.command, &cfg.section(name)))?;

    let inputs = outcome
        .inputs
        .iter()
        .map(|p| {
            Ok(InputDigest {
                path: p.clone(),
                sha256: sha256_file(p)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let m = RunManifest {
        toolkit: "survscan",
        version: env!("CARGO_PKG_VERSION"),
        command_line: argv,
        subcommand: name.to_string(),
        config_file: cfg.path.clone(),
        config: outcome.config.clone(),
        threads,
        inputs,
        outputs: outcome.outputs.clone(),
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    let path = cli
        .manifest
        .clone()
        .unwrap_or_else(|| manifest_path(outcome.outputs.first().map(|p| p.as_path()), name));
    m.write(&path)?;
    Ok(outcome.exit)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, argv) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(m)) => {
            eprintln!("survscan: usage error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Data(m)) => {
            eprintln!("survscan: {m}");
            ExitCode::from(2)
        }
    }
}
