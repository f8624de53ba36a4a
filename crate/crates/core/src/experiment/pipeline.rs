//! QAOA+WS: QAOA proposes warm starts, WS-QAOA refines each of them, and the
//! resulting distributions are averaged.

use serde::{Deserialize, Serialize};

use super::{cell_seed, optimize_depths, pipeline_seed, Instance};
use crate::ansatz::AnsatzSpec;
use crate::error::{Error, Result};
use crate::graph::{ising_from_graph, pair_distance, Assignment, SolutionPair};
use crate::optimize::{Method, MethodTable, OptResult, OptimizerConfig};
use crate::statevector::{distribution_fidelity, Distribution};

/// What to do when the exact solution pair is among the top-`M` strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DropPolicy {
    /// Skip the solution pair and keep taking strings until `M` are found.
    Refill,
    /// Take the top `M` and drop the solution pair, running fewer warm starts.
    Shrink,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub optimizer: OptimizerConfig,
    pub methods: MethodTable,
    pub method_override: Option<Method>,
    pub drop_policy: DropPolicy,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            optimizer: OptimizerConfig::default(),
            methods: MethodTable::default(),
            method_override: None,
            drop_policy: DropPolicy::Refill,
        }
    }
}

impl PipelineConfig {
    fn method(&self, alpha: f64, p: usize, d: usize) -> Method {
        self.method_override
            .unwrap_or_else(|| self.methods.select(alpha, p, d))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WarmStartRun {
    pub m_index: usize,
    pub x0: Assignment,
    /// Pair distance of `x0` to the solution.
    pub distance: usize,
    pub method: Method,
    pub distribution: Distribution,
    pub fidelity: f64,
    pub result: OptResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    pub qaoa: OptResult,
    pub qaoa_method: Method,
    pub qaoa_distribution: Distribution,
    pub qaoa_fidelity: f64,
    /// Mean of the warm-start distributions.
    pub distribution: Distribution,
    /// Mean of the warm-start fidelities.
    pub fidelity: f64,
    pub runs: Vec<WarmStartRun>,
}

/// Most probable bit string, ties to the smallest basis index.
pub fn highest_probability_string(dist: &Distribution) -> Assignment {
    let (k, _) = dist
        .probs()
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, &p)| {
            if p > best.1 {
                (k, p)
            } else {
                best
            }
        });
    Assignment::from_index(k, dist.n_qubits())
}

pub fn average_distributions(ds: &[Distribution]) -> Result<Distribution> {
    let first = ds.first().ok_or(Error::Empty("distribution list"))?;
    let len = first.probs().len();
    let mut acc = vec![0.0; len];
    for d in ds {
        if d.probs().len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                found: d.probs().len(),
            });
        }
        for (a, p) in acc.iter_mut().zip(d.probs()) {
            *a += p;
        }
    }
    let m = ds.len() as f64;
    acc.iter_mut().for_each(|a| *a /= m);
    Distribution::new(acc)
}

/// The `m` most probable strings outside the solution pair, most probable
/// first, ties to the smallest index.
pub fn top_candidates(
    dist: &Distribution,
    sol: &SolutionPair,
    m: usize,
    policy: DropPolicy,
) -> Result<Vec<Assignment>> {
    let total = dist.probs().len();
    let available = total - 2;
    if m == 0 || m > available {
        return Err(Error::TooManyWarmStarts {
            requested: m,
            available,
        });
    }
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&a, &b| {
        dist.probs()[b]
            .partial_cmp(&dist.probs()[a])
            .expect("finite probabilities")
            .then(a.cmp(&b))
    });
    let (s0, s1) = sol.indices();
    let is_solution = |k: &usize| *k == s0 || *k == s1;
    let picked: Vec<usize> = match policy {
        DropPolicy::Refill => order
            .into_iter()
            .filter(|k| !is_solution(k))
            .take(m)
            .collect(),
        DropPolicy::Shrink => order
            .into_iter()
            .take(m)
            .filter(|k| !is_solution(k))
            .collect(),
    };
    if picked.is_empty() {
        return Err(Error::Empty("warm starts after dropping the solution pair"));
    }
    Ok(picked
        .into_iter()
        .map(|k| Assignment::from_index(k, dist.n_qubits()))
        .collect())
}

/// Runs QAOA+WS on one instance at depth `p` with `m` warm starts of bias `alpha`.
///
/// The QAOA stage uses the same cell seed as an `alpha = 0` sweep cell, so its
/// fidelity matches the sweep baseline. Warm-start run `i` is seeded by its
/// index alone, so the first `k` runs do not depend on `m`.
pub fn qaoa_plus_ws(
    inst: &Instance,
    p: usize,
    m: usize,
    alpha: f64,
    cfg: &PipelineConfig,
    master_seed: u64,
) -> Result<PipelineResult> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!(
            "warm-start bias must be > 0, got {alpha}"
        )));
    }
    let prob = ising_from_graph(&inst.graph);
    let qaoa_method = cfg.method(0.0, p, 0);
    let stage1 = optimize_depths(
        &AnsatzSpec::qaoa(1),
        &prob,
        &[(p, qaoa_method)],
        &cfg.optimizer,
        |q| cell_seed(master_seed, inst.id, 0.0, 0, q),
    )?
    .pop()
    .expect("one depth requested");
    let qaoa_state = stage1.ansatz.state(&stage1.result.params)?;
    let qaoa_distribution = qaoa_state.probabilities();
    let qaoa_fidelity = distribution_fidelity(&qaoa_distribution, &inst.solution)?;

    let candidates = top_candidates(&qaoa_distribution, &inst.solution, m, cfg.drop_policy)?;
    let mut runs = Vec::with_capacity(candidates.len());
    for (m_index, x0) in candidates.into_iter().enumerate() {
        let distance = pair_distance(&x0, &inst.solution)?;
        let method = cfg.method(alpha, p, distance);
        let outcome = optimize_depths(
            &AnsatzSpec::warm_start(x0.clone(), alpha, 1),
            &prob,
            &[(p, method)],
            &cfg.optimizer,
            |q| pipeline_seed(master_seed, inst.id, alpha, q, m_index),
        )?
        .pop()
        .expect("one depth requested");
        let distribution = outcome
            .ansatz
            .state(&outcome.result.params)?
            .probabilities();
        let fidelity = distribution_fidelity(&distribution, &inst.solution)?;
        runs.push(WarmStartRun {
            m_index,
            x0,
            distance,
            method,
            distribution,
            fidelity,
            result: outcome.result,
        });
    }
    let distribution = average_distributions(
        &runs
            .iter()
            .map(|r| r.distribution.clone())
            .collect::<Vec<_>>(),
    )?;
    let fidelity = runs.iter().map(|r| r.fidelity).sum::<f64>() / runs.len() as f64;
    Ok(PipelineResult {
        qaoa: stage1.result,
        qaoa_method,
        qaoa_distribution,
        qaoa_fidelity,
        distribution,
        fidelity,
        runs,
    })
}
