//! `nla`: effective parameters, equivalence checks, loss suppression,
//! phase curves and Wigner grids for NLA-after-channel scenarios.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nla_core::NlaError;

#[derive(Debug, Parser)]
#[command(
    name = "nla",
    version,
    about = "Noiseless linear amplification after Gaussian channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Effective parameters of channel-then-NLA.
    Params {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Simulate both sides of the equivalence on one input state.
    Verify {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        state: StateArgs,
        /// Use the GENERAL reduction with this amplifier gain.
        #[arg(long)]
        amp_gain: Option<f64>,
        #[arg(long, default_value_t = nla_core::equivalence::DEFAULT_TOL_FIDELITY)]
        tol_f: f64,
        #[arg(long, default_value_t = nla_core::equivalence::DEFAULT_TOL_MU)]
        tol_mu: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Noiseless attenuator, channel, NLA, compared with the residual channel.
    Suppress {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Phase uncertainty of an amplified coherent state against added noise.
    Phase {
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.5)]
        g: f64,
        /// Comma-separated noise values; defaults to an even grid on [0, eps_lim).
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        /// Grid size when --eps is not given.
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Evaluate points one after another.
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Wigner function on a square phase-space grid.
    Wigner {
        #[command(flatten)]
        state: StateArgs,
        /// Half-width of the grid in each quadrature.
        #[arg(long, default_value_t = 4.0)]
        range: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct ChannelArgs {
    /// Channel transmission.
    #[arg(long = "T", default_value_t = 0.6)]
    t: f64,
    /// Input-referred excess noise.
    #[arg(long, default_value_t = 0.2)]
    eps: f64,
    /// NLA gain.
    #[arg(long, default_value_t = 1.5)]
    g: f64,
}

#[derive(Debug, Args)]
struct StateArgs {
    #[arg(long, value_enum, default_value_t = StateKind::Coherent)]
    state: StateKind,
    /// Amplitude (coherent, cat), λ (thermal) or photon number (fock).
    #[arg(long)]
    param: Option<f64>,
    #[arg(long, value_enum, default_value_t = Parity::Odd)]
    parity: Parity,
    /// Fock-space truncation.
    #[arg(long, env = "NLA_DEFAULT_DIM", default_value_t = 40)]
    dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StateKind {
    Vacuum,
    Coherent,
    Thermal,
    Fock,
    Cat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Bad flag combination detected after parsing.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Verification ran but did not pass; the report has already been written.
#[derive(Debug)]
struct VerifyFailed;

impl std::fmt::Display for VerifyFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("verification failed")
    }
}

impl std::error::Error for VerifyFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.is::<UsageError>() {
        return 2;
    }
    match err.downcast_ref::<NlaError>() {
        Some(NlaError::Physicality { .. } | NlaError::Domain { .. } | NlaError::InfeasibleReduction { .. }) => 2,
        Some(NlaError::TruncationInsufficient { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
