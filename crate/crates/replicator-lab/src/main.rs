use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use replicator_lab::{cli, Error};

#[derive(Parser)]
#[command(
    name = "replicator-lab",
    version,
    about = "Analyze and simulate the strategy-share dynamics of a symmetric two-strategy league"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full stability, certificate and Nash report as JSON
    Analyze {
        /// Path to the JSON config ({"payoffs": {...}, "tolerance": ...})
        #[arg(long)]
        config: PathBuf,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the share dynamics from one initial condition to CSV
    Integrate {
        #[arg(long)]
        config: PathBuf,
        /// Initial two-point share in [0, 1]
        #[arg(long)]
        x0: f64,
        #[arg(long)]
        horizon: f64,
        /// Integration tolerance
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep one payoff entry, tracing the interior branch and its loci
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Which entry to vary: alpha, beta, gamma or delta
        #[arg(long)]
        param: String,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        /// Number of grid points (>= 2)
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate finite leagues across seeds: CSV per run plus a JSON summary
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// League size N
        #[arg(long)]
        teams: u64,
        /// Initial number of two-point teams
        #[arg(long)]
        n1: u64,
        #[arg(long)]
        horizon: f64,
        #[arg(long)]
        seed: u64,
        /// Number of runs, seeded seed..seed+replicas-1
        #[arg(long)]
        replicas: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        // I/O and serialization failures are internal; everything else is a
        // config or validation problem.
        Error::Io(_) | Error::Json(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = cli::configure_thread_pool_from_env() {
        eprintln!("replicator-lab: {e}");
        return ExitCode::from(2);
    }

    let result = match cli.command {
        Command::Analyze { config, out } => cli::cmd_analyze(&config, out.as_deref()),
        Command::Integrate {
            config,
            x0,
            horizon,
            tol,
            out,
        } => cli::cmd_integrate(&config, x0, horizon, tol, &out),
        Command::Sweep {
            config,
            param,
            lo,
            hi,
            steps,
            out,
        } => cli::cmd_sweep(&config, &param, lo, hi, steps, &out),
        Command::Simulate {
            config,
            teams,
            n1,
            horizon,
            seed,
            replicas,
            out_dir,
        } => cli::cmd_simulate(&config, teams, n1, horizon, seed, replicas, &out_dir),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("replicator-lab: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
