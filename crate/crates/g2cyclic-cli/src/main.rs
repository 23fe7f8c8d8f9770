use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use g2cyclic_cli::config::{ConfigFile, Overrides, RunConfig};
use g2cyclic_cli::tables::StabilityArgs;
use g2cyclic_cli::Command;

#[derive(Parser)]
#[command(name = "g2cyclic", version, about = "Split octonion algebra, cyclic Higgs bundle tables and a Hitchin equation solver")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Configuration file (key = value with [sections]).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the randomized sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Solver tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Disable parallel residual assembly.
    #[arg(long, global = true)]
    serial: bool,
    /// Echo the report on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact certificate for the split octonions.
    AlgebraCheck,
    /// Exact certificate for g2' and its grading.
    LieCheck,
    /// Stability verdicts for cyclic Higgs data.
    Stability {
        #[arg(long)]
        genus: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        d: Option<i64>,
        /// Every degree from -1 to 6g - 5.
        #[arg(long)]
        all_d: bool,
        #[arg(long)]
        beta: Option<bool>,
        #[arg(long)]
        delta: Option<bool>,
        /// CSV with header g,d,beta,delta.
        #[arg(long)]
        batch: Option<PathBuf>,
    },
    /// Moduli dimensions and components.
    Moduli {
        #[arg(long)]
        genus: Option<i64>,
        #[arg(long)]
        d: Option<i64>,
    },
    /// Solve the Hitchin equation on a chart.
    Solve,
    /// Rebuild the curve from a solved metric.
    Reconstruct {
        /// Metric CSV written by `solve`.
        #[arg(long)]
        metric: Option<PathBuf>,
    },
    /// Solve, reconstruct and check.
    Pipeline,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    let cmd = match cli.cmd {
        Cmd::AlgebraCheck => Command::AlgebraCheck,
        Cmd::LieCheck => Command::LieCheck,
        Cmd::Stability { genus, d, all_d, beta, delta, batch } => Command::Stability(StabilityArgs { genus, d, all_d, beta, delta, batch }),
        Cmd::Moduli { genus, d } => Command::Moduli { genus, d },
        Cmd::Solve => Command::Solve,
        Cmd::Reconstruct { metric } => Command::Reconstruct { metric },
        Cmd::Pipeline => Command::Pipeline,
    };
    let file = match g.config.as_deref().map(ConfigFile::load).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let mut cfg = RunConfig::new(file, &Overrides { out: g.out, seed: g.seed, tol: g.tol, serial: g.serial });
    cfg.verbose |= g.verbose;
    match g2cyclic_cli::run(&cmd, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("some checks failed; see {}", cfg.out.join("report.txt").display());
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
