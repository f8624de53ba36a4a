//! Command-line surface. Each subcommand resolves to a [`RunConfig`]; with
//! `--config FILE` the file supplies every parameter except `--out`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use wsqaoa::experiment::DropPolicy;
use wsqaoa::{OptimizerConfig, StepRule};

use crate::config::{
    GenConfig, GraphSource, MethodChoice, QaoaWsConfig, RunConfig, SolveConfig, SweepRunConfig,
    TheoryConfig,
};
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "wsqaoa",
    version,
    about = "QAOA and warm-start QAOA experiments on weighted 3-regular MAX-CUT"
)]
pub struct Cli {
    /// Worker threads; defaults to the number of available cores.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate seeded w3R instances and their exact solutions.
    Gen(GenArgs),
    /// Optimise a single instance and print the descent.
    Solve(SolveArgs),
    /// Fidelity sweep over bias strength, Hamming distance and depth.
    Sweep(SweepArgs),
    /// Closed-form initial fidelity and critical-distance curves.
    Theory(TheoryArgs),
    /// QAOA proposes warm starts, WS-QAOA refines them.
    QaoaWs(QaoaWsArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Auto,
    Ri,
    Interp,
}

impl From<MethodArg> for MethodChoice {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => MethodChoice::Auto,
            MethodArg::Ri => MethodChoice::Ri,
            MethodArg::Interp => MethodChoice::Interp,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StepRuleArg {
    Spectral,
    Fixed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DropArg {
    Refill,
    Shrink,
}

#[derive(Debug, Args)]
pub struct OptimizerArgs {
    /// Initial gradient-descent step.
    #[arg(long = "lr", default_value_t = 0.1)]
    pub learning_rate: f64,
    /// Stop when the largest gradient component falls below this.
    #[arg(long, default_value_t = 1e-4)]
    pub grad_threshold: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    /// Random initialisations per RI run.
    #[arg(long, default_value_t = 50)]
    pub restarts: usize,
    /// `fixed` restarts every iteration from `--lr`.
    #[arg(long, value_enum, default_value_t = StepRuleArg::Spectral)]
    pub step_rule: StepRuleArg,
}

impl OptimizerArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            learning_rate: self.learning_rate,
            grad_threshold: self.grad_threshold,
            max_iters: self.max_iters,
            restarts: self.restarts,
            step_rule: match self.step_rule {
                StepRuleArg::Spectral => StepRule::Spectral,
                StepRuleArg::Fixed => StepRule::Fixed,
            },
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Vertex count of generated instances.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of generated instances.
    #[arg(long, default_value_t = 20)]
    pub instances: usize,
    /// Read instances from a `gen` output directory instead.
    #[arg(long, conflicts_with = "n")]
    pub graphs: Option<PathBuf>,
}

impl SourceArgs {
    fn source(&self) -> Result<GraphSource> {
        match (&self.graphs, self.n) {
            (Some(dir), _) => Ok(GraphSource::Dir(dir.clone())),
            (None, Some(n)) => Ok(GraphSource::Generate {
                n,
                instances: self.instances,
            }),
            (None, None) => Err(CliError::Usage("either --n or --graphs is required".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub instances: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Instance to solve.
    #[arg(long, default_value_t = 0)]
    pub graph_id: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.4)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Bias strengths; `0` is the QAOA baseline.
    #[arg(long = "alpha", default_values_t = [0.0, 0.4])]
    pub alphas: Vec<f64>,
    /// Hamming distances of the warm starts.
    #[arg(long = "d", default_values_t = [0, 1, 2, 3])]
    pub ds: Vec<usize>,
    #[arg(long = "p", default_values_t = [3])]
    pub ps: Vec<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// Keep instances with more than one optimal pair.
    #[arg(long)]
    pub include_degenerate: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[arg(long = "n")]
    pub ns: Vec<usize>,
    #[arg(long = "alpha", default_values_t = [0.0, 0.4, 1.0])]
    pub alphas: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QaoaWsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    /// Number of warm starts taken from the QAOA distribution.
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    #[arg(long, default_value_t = 0.4)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// What replaces the solution pair when QAOA ranks it among the top M.
    #[arg(long, value_enum, default_value_t = DropArg::Refill)]
    pub drop_policy: DropArg,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[arg(long)]
    pub include_degenerate: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn required_out(out: &Option<PathBuf>) -> Result<PathBuf> {
    out.clone()
        .ok_or_else(|| CliError::Usage("--out is required".into()))
}

/// Loads `--config`, checks it is for `command`, and applies `--out`.
fn from_file(path: &Path, command: &str, out: &Option<PathBuf>) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(path)?;
    if cfg.name() != command {
        return Err(CliError::Usage(format!(
            "{} holds a {} config, not {command}",
            path.display(),
            cfg.name()
        )));
    }
    if let Some(out) = out {
        cfg.set_out(out.clone());
    }
    Ok(cfg)
}

impl Command {
    pub fn resolve(&self) -> Result<RunConfig> {
        match self {
            Command::Gen(a) => match &a.config {
                Some(path) => from_file(path, "gen", &a.out),
                None => Ok(RunConfig::Gen(GenConfig {
                    n: a.n
                        .ok_or_else(|| CliError::Usage("--n is required".into()))?,
                    instances: a.instances,
                    seed: a.seed,
                    out: required_out(&a.out)?,
                })),
            },
            Command::Solve(a) => match &a.config {
                Some(path) => from_file(path, "solve", &a.out),
                None => Ok(RunConfig::Solve(SolveConfig {
                    source: a.source.source()?,
                    graph_id: a.graph_id,
                    seed: a.seed,
                    alpha: a.alpha,
                    d: a.d,
                    p: a.p,
                    method: a.method.into(),
                    optimizer: a.optimizer.config(),
                    out: a.out.clone(),
                })),
            },
            Command::Sweep(a) => match &a.config {
                Some(path) => from_file(path, "sweep", &a.out),
                None => Ok(RunConfig::Sweep(SweepRunConfig {
                    source: a.source.source()?,
                    seed: a.seed,
                    alphas: a.alphas.clone(),
                    ds: a.ds.clone(),
                    ps: a.ps.clone(),
                    method: a.method.into(),
                    optimizer: a.optimizer.config(),
                    include_degenerate: a.include_degenerate,
                    out: required_out(&a.out)?,
                })),
            },
            Command::Theory(a) => match &a.config {
                Some(path) => from_file(path, "theory", &a.out),
                None => {
                    if a.ns.is_empty() {
                        return Err(CliError::Usage("at least one --n is required".into()));
                    }
                    Ok(RunConfig::Theory(TheoryConfig {
                        ns: a.ns.clone(),
                        alphas: a.alphas.clone(),
                        out: required_out(&a.out)?,
                    }))
                }
            },
            Command::QaoaWs(a) => match &a.config {
                Some(path) => from_file(path, "qaoa-ws", &a.out),
                None => Ok(RunConfig::QaoaWs(QaoaWsConfig {
                    source: a.source.source()?,
                    seed: a.seed,
                    p: a.p,
                    m: a.m,
                    alpha: a.alpha,
                    method: a.method.into(),
                    optimizer: a.optimizer.config(),
                    drop_policy: match a.drop_policy {
                        DropArg::Refill => DropPolicy::Refill,
                        DropArg::Shrink => DropPolicy::Shrink,
                    },
                    include_degenerate: a.include_degenerate,
                    out: required_out(&a.out)?,
                })),
            },
        }
    }
}
