//! Front end of the g2cyclic toolkit: configuration, subcommands and the
//! summary/report writers. The `g2cyclic` binary is a thin wrapper.

pub mod algebra;
pub mod config;
pub mod lie_check;
pub mod pipeline;
pub mod summary;
pub mod tables;

use std::path::PathBuf;

use anyhow::Result;

use config::RunConfig;
use summary::Outcome;
use tables::StabilityArgs;

#[derive(Debug, Clone)]
pub enum Command {
    AlgebraCheck,
    LieCheck,
    Stability(StabilityArgs),
    Moduli { genus: Option<i64>, d: Option<i64> },
    Solve,
    Reconstruct { metric: Option<PathBuf> },
    Pipeline,
}

pub fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        Command::AlgebraCheck => algebra::run(cfg),
        Command::LieCheck => lie_check::run(cfg),
        Command::Stability(a) => tables::stability(cfg, a.clone()),
        Command::Moduli { genus, d } => tables::moduli(cfg, *genus, *d),
        Command::Solve => pipeline::solve(cfg),
        Command::Reconstruct { metric } => pipeline::reconstruct_cmd(cfg, metric.as_deref()),
        Command::Pipeline => pipeline::pipeline(cfg),
    }
}

/// Runs a subcommand and writes `summary.json` and `report.txt`. Returns
/// whether every check passed.
pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<bool> {
    let out = dispatch(cmd, cfg)?;
    if cfg.verbose {
        eprint!("{}", out.report_text());
    }
    out.finish(cfg.seed)
}
