//! Batch front end for the pinning-model laboratory.
//!
//! Every computation in `pinlab-core` is exposed as a subcommand that reads
//! its parameters from flags and/or a JSON config file (flags win), writes
//! CSV/JSON outputs with fixed 17-significant-digit formatting, and records
//! a run manifest with seeds, horizons, tolerances and output digests.
//! Re-running with `--config <manifest.json>` reproduces the outputs byte
//! for byte; grid points are dispatched to a worker pool but rows are always
//! written in grid order, so results do not depend on thread count.

pub mod commands;
pub mod config;
pub mod fmt;
pub mod manifest;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

/// Exit codes: 0 success, 2 usage, 3 domain/validity, 4 truncation
/// insufficient, 1 anything else.
pub fn exit_code_for(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<config::UsageError>().is_some()
        || err.downcast_ref::<clap::Error>().is_some()
    {
        return 2;
    }
    match err.downcast_ref::<pinlab_core::Error>() {
        Some(pinlab_core::Error::Truncation { .. }) => 4,
        Some(_) => 3,
        None => 1,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "pinlab",
    version,
    about = "Numerical laboratory for a randomly pinned interface model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic critical curves and bounds over a (beta, s) grid → CSV.
    Curves(commands::curves::Args),
    /// Quenched/annealed finite-n free energies over a parameter grid → CSV.
    #[command(name = "free-energy")]
    FreeEnergy(commands::free_energy::Args),
    /// Numerical bracket of the localization transition in h → CSV.
    #[command(name = "phase-bracket")]
    PhaseBracket(commands::phase_bracket::Args),
    /// Tilt constants, inequality margins, paired estimators, bound bracket → JSON.
    #[command(name = "tilt-audit")]
    TiltAudit(commands::tilt_audit::Args),
    /// Stochastic-dominance reports for the excursion-law pairs → JSON.
    Dominance(commands::dominance::Args),
    /// Endpoint law, tail profile and occupation observables → CSV.
    Path(commands::path::Args),
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Curves(a) => commands::curves::run(a),
        Command::FreeEnergy(a) => commands::free_energy::run(a),
        Command::PhaseBracket(a) => commands::phase_bracket::run(a),
        Command::TiltAudit(a) => commands::tilt_audit::run(a),
        Command::Dominance(a) => commands::dominance::run(a),
        Command::Path(a) => commands::path::run(a),
    }
}

/// Parse the given argument vector and run it; used by `main` and by tests.
pub fn run_args<I, T>(args: I) -> anyhow::Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run(Cli::try_parse_from(args)?)
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Disorder spec: `rademacher`, `gaussian`, or an inline JSON object.
    #[arg(long)]
    pub spec: Option<String>,
    /// Base seed; replicas derive deterministic sub-streams from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Chain length.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of disorder replicas.
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Truncation horizon for excursion-law tables.
    #[arg(long)]
    pub trunc: Option<usize>,
    /// Output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the run manifest (JSON).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// JSON config file (flag names as keys); flags override it. A run
    /// manifest is accepted and replayed.
    #[arg(long)]
    pub config: Option<PathBuf>,
}
