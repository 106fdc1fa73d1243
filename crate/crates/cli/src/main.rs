//! `progtherm` — exact program-ensemble thermodynamics on a toy universal
//! machine, from the command line.
//!
//! Exit codes: 0 success, 2 invalid config or arguments, 3 request that the
//! enumerated machine cannot satisfy, 1 anything else.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use commands::WorkMode;
use config::{Config, ConfigError};

#[derive(Parser)]
#[command(
    name = "progtherm",
    version,
    about = "Exact program-ensemble thermodynamics on a toy prefix-free universal machine"
)]
struct Cli {
    /// TOML config file; defaults are the documented desk-scale setup.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Cap the worker-thread count (only meaningful with the parallel build).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate cores; print counts, ground lengths and spectra.
    Enumerate {
        /// Also export the core table as CSV.
        #[arg(long, value_name = "FILE")]
        export: Option<PathBuf>,
    },
    /// Reversible work between "contains x" and "contains x and y".
    Work {
        #[arg(long)]
        x: u32,
        #[arg(long)]
        y: u32,
        /// Inverse temperature.
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Excess window; defaults to the config value.
        #[arg(long)]
        excess: Option<u32>,
        #[arg(long, value_enum, default_value_t = WorkMode::Direct)]
        mode: WorkMode,
        /// Coupling strength for ti/jarzynski; defaults to the config value.
        #[arg(long)]
        coupling: Option<f64>,
        /// Quadrature nodes for ti.
        #[arg(long, default_value_t = 64)]
        nodes: u32,
        /// Seed override for jarzynski.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the full study (sweep, force, convergence, estimator) to CSV.
    Sweep {
        /// Output directory; defaults to the config value.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Jarzynski estimator with a per-trajectory work log.
    Jarzynski {
        #[arg(long)]
        x: u32,
        #[arg(long)]
        y: u32,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        excess: Option<u32>,
    },
    /// Wrapper counts and the growth rate of the avoidance automaton.
    WrapperStats {
        /// Report wrapper lengths up to marker length plus this.
        #[arg(long, default_value_t = 12)]
        max_excess: u32,
    },
    /// Uniform predicate-counting check (every pair sits in 2^(n-2) subsets).
    Udt,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    configure_threads(cli.threads);
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Enumerate { export } => commands::cmd_enumerate(&config, export.as_deref()),
        Command::Work {
            x,
            y,
            beta,
            excess,
            mode,
            coupling,
            nodes,
            seed,
        } => commands::cmd_work(&config, x, y, beta, excess, mode, coupling, nodes, seed),
        Command::Sweep { out } => commands::cmd_sweep(&config, out),
        Command::Jarzynski {
            x,
            y,
            out,
            seed,
            excess,
        } => commands::cmd_jarzynski(&config, x, y, out, seed, excess),
        Command::WrapperStats { max_excess } => commands::cmd_wrapper_stats(&config, max_excess),
        Command::Udt => commands::cmd_udt(&config),
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        // ignore failure: the pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_threads: Option<usize>) {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    if let Some(e) = err.downcast_ref::<progtherm::Error>() {
        use progtherm::Error::*;
        return match e {
            Unsatisfiable { .. } | WindowTooLarge { .. } | EmptyStateSpace => 3,
            UniverseSize(_)
            | LabelCount { .. }
            | ObjectOutOfRange { .. }
            | InvalidMarker(..)
            | EmptyCore
            | EmptyTarget
            | CoreBoundTooLarge(_)
            | ZeroBeta
            | NonPositiveBeta(_)
            | HardCouplingForce
            | NonPositiveCoupling(_)
            | TooFewNodes(_)
            | SelfPair(_)
            | UniverseTooLargeForCheck(_)
            | BadSchedule(_)
            | TooFewTrajectories(_) => 2,
            _ => 1,
        };
    }
    1
}
