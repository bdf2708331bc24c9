//! `allocnet`: graph, percolation, and allocation-experiment harness.
//!
//! Exit codes: 0 success, 1 usage, 2 config, 3 numeric failure. Every error
//! path prints a single line `error: <category>: <reason>` to stderr.

mod commands;
mod config;
mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use error::single_line;

#[derive(Parser)]
#[command(name = "allocnet", version, about = "Sum-preserving resource allocation over lossy networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it in edge-list format.
    Generate(GenerateArgs),
    /// Laplacian spectral summary of an edge-list graph.
    Spectrum(SpectrumArgs),
    /// Bond-percolation threshold, analytic or Monte-Carlo, as CSV.
    Percolation(PercolationArgs),
    /// Minimum connectivity window B* for a drop rate and threshold.
    Bstar(BstarArgs),
    /// Execute an experiment config: trace CSV plus summary.
    Run(RunArgs),
    /// Sweep one config key over a value list; one summary row per run.
    Sweep(SweepArgs),
    /// Rebuild the canonical lossy-allocation experiment end to end.
    ReplicatePaper(ReplicateArgs),
}

#[derive(Args)]
pub struct GenerateArgs {
    /// er | sw | sf | grid
    #[arg(long)]
    model: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    min_degree: Option<usize>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Redraw weights uniformly from (low, high].
    #[arg(long)]
    weight_low: Option<f64>,
    #[arg(long)]
    weight_high: Option<f64>,
    #[arg(long)]
    weight_seed: Option<u64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SpectrumArgs {
    /// Edge-list file.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
pub struct PercolationArgs {
    /// er | sw | sf | grid
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    min_degree: Option<usize>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// Erdos-Renyi threshold from a measured mean degree.
    #[arg(long)]
    mean_degree: Option<f64>,
    /// Monte-Carlo estimate instead of the closed form.
    #[arg(long)]
    mc: bool,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0.02)]
    step: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
pub struct BstarArgs {
    /// Per-direction packet drop rate.
    #[arg(long)]
    pd: Option<f64>,
    /// Link removal rate (alternative input; B* is computed from it directly).
    #[arg(long)]
    pl: Option<f64>,
    /// Heterogeneous per-link drop rates, one probability per line.
    #[arg(long)]
    rates_file: Option<PathBuf>,
    /// Bond-percolation threshold.
    #[arg(long)]
    pc: f64,
}

#[derive(Args)]
pub struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: the config's `[output]` dir, else $ALLOCNET_OUT_DIR, else `.`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// `key=v1,v2,...`; keys: seed, dynamics.eta, dynamics.max_iters,
    /// drops.p_d, audit.window.
    #[arg(long)]
    vary: String,
    /// Seed list crossed with the vary values (default: the config seed).
    #[arg(long)]
    seeds: Option<String>,
    /// Write the CSV matrix here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ReplicateArgs {
    /// Artifact directory (default: $ALLOCNET_OUT_DIR/replication or ./replication).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Iteration count override.
    #[arg(long)]
    iters: Option<u64>,
}

fn main() {
    // Die quietly on closed pipes (`allocnet ... | head`) instead of
    // panicking in the stdout writer.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    std::process::exit(0);
                }
                _ => {
                    eprintln!("error: usage: {}", single_line(&e.to_string()));
                    std::process::exit(1);
                }
            }
        }
    };
    let result = match cli.command {
        Command::Generate(args) => commands::generate::run(args),
        Command::Spectrum(args) => commands::spectrum::run(args),
        Command::Percolation(args) => commands::percolation::run(args),
        Command::Bstar(args) => commands::bstar::run(args),
        Command::Run(args) => commands::run::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
        Command::ReplicatePaper(args) => commands::replicate::run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {}: {}", e.category(), single_line(e.message()));
        std::process::exit(e.exit_code());
    }
}

/// Default output directory: flag, then config, then env, then cwd.
pub(crate) fn resolve_out_dir(flag: Option<PathBuf>, config_dir: Option<&str>) -> PathBuf {
    flag.or_else(|| config_dir.map(PathBuf::from))
        .or_else(|| std::env::var("ALLOCNET_OUT_DIR").ok().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}
