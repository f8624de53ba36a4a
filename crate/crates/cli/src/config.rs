//! Serialized run configurations. A command re-run from its `config.json`
//! reproduces its data tables byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wsqaoa::experiment::DropPolicy;
use wsqaoa::{Method, OptimizerConfig};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodChoice {
    /// Consult the default method table.
    #[default]
    Auto,
    Ri,
    Interp,
}

impl MethodChoice {
    pub fn forced(self) -> Option<Method> {
        match self {
            MethodChoice::Auto => None,
            MethodChoice::Ri => Some(Method::Ri),
            MethodChoice::Interp => Some(Method::Interp),
        }
    }
}

/// Where instances come from: generated in memory from the master seed, or
/// read from a directory written by `gen`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphSource {
    Generate { n: usize, instances: usize },
    Dir(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n: usize,
    pub instances: usize,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub source: GraphSource,
    pub graph_id: usize,
    pub seed: u64,
    /// `0` runs plain QAOA and ignores `d`.
    pub alpha: f64,
    pub d: usize,
    pub p: usize,
    pub method: MethodChoice,
    pub optimizer: OptimizerConfig,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRunConfig {
    pub source: GraphSource,
    pub seed: u64,
    pub alphas: Vec<f64>,
    pub ds: Vec<usize>,
    pub ps: Vec<usize>,
    pub method: MethodChoice,
    pub optimizer: OptimizerConfig,
    pub include_degenerate: bool,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryConfig {
    pub ns: Vec<usize>,
    pub alphas: Vec<f64>,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaWsConfig {
    pub source: GraphSource,
    pub seed: u64,
    pub p: usize,
    pub m: usize,
    pub alpha: f64,
    pub method: MethodChoice,
    pub optimizer: OptimizerConfig,
    pub drop_policy: DropPolicy,
    pub include_degenerate: bool,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Gen(GenConfig),
    Solve(SolveConfig),
    Sweep(SweepRunConfig),
    Theory(TheoryConfig),
    QaoaWs(QaoaWsConfig),
}

impl RunConfig {
    pub fn name(&self) -> &'static str {
        match self {
            RunConfig::Gen(_) => "gen",
            RunConfig::Solve(_) => "solve",
            RunConfig::Sweep(_) => "sweep",
            RunConfig::Theory(_) => "theory",
            RunConfig::QaoaWs(_) => "qaoa-ws",
        }
    }

    pub fn out(&self) -> Option<&Path> {
        match self {
            RunConfig::Gen(c) => Some(&c.out),
            RunConfig::Solve(c) => c.out.as_deref(),
            RunConfig::Sweep(c) => Some(&c.out),
            RunConfig::Theory(c) => Some(&c.out),
            RunConfig::QaoaWs(c) => Some(&c.out),
        }
    }

    pub fn set_out(&mut self, out: PathBuf) {
        match self {
            RunConfig::Gen(c) => c.out = out,
            RunConfig::Solve(c) => c.out = Some(out),
            RunConfig::Sweep(c) => c.out = out,
            RunConfig::Theory(c) => c.out = out,
            RunConfig::QaoaWs(c) => c.out = out,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path).map_err(CliError::io(path))?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json() + "\n").map_err(CliError::io(path))
    }
}
