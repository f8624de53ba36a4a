//! Reproduction studies: fidelity sweeps over Hamming distance, bias strength
//! and depth; the closed-form initial-state theory; critical-distance
//! estimation; and the QAOA+WS pipeline.

mod pipeline;
mod sweep;
pub mod theory;

pub use pipeline::{
    average_distributions, highest_probability_string, qaoa_plus_ws, top_candidates, DropPolicy,
    PipelineConfig, PipelineResult, WarmStartRun,
};
pub use sweep::{
    aggregate, estimate_dc, generate_instances, mean_and_sem, run_ws_sweep, AggregateRow, Instance,
    SweepConfig, SweepRecord,
};
pub use theory::{
    initial_fidelity_at, theoretical_dc_over_n, theoretical_initial_fidelity, Branch, TheoryKind,
    TheoryPoint,
};

use crate::ansatz::{Ansatz, AnsatzSpec};
use crate::error::Result;
use crate::graph::IsingProblem;
use crate::optimize::{descend, interp_extend, ri_on, Method, OptResult, OptimizerConfig};
use crate::seed;

const TAG_GRAPH: u64 = 1;
const TAG_FLIP: u64 = 2;
const TAG_CELL: u64 = 3;
const TAG_PIPELINE: u64 = 4;

/// Seed for one optimisation cell. INTERP chains use `p = 0`.
pub fn cell_seed(master: u64, graph_id: usize, alpha: f64, d: usize, p: usize) -> u64 {
    seed::derive(
        master,
        &[
            TAG_CELL,
            graph_id as u64,
            alpha.to_bits(),
            d as u64,
            p as u64,
        ],
    )
}

/// Seed for the bit flips producing the warm start at distance `d`.
/// Independent of `alpha` and `p`, so every bias strength sees the same `x0`.
pub fn flip_seed(master: u64, graph_id: usize, d: usize) -> u64 {
    seed::derive(master, &[TAG_FLIP, graph_id as u64, d as u64])
}

pub fn graph_seed(master: u64, graph_id: usize) -> u64 {
    seed::derive(master, &[TAG_GRAPH, graph_id as u64])
}

pub(crate) fn pipeline_seed(master: u64, graph_id: usize, alpha: f64, p: usize, m: usize) -> u64 {
    seed::derive(
        master,
        &[
            TAG_PIPELINE,
            graph_id as u64,
            alpha.to_bits(),
            p as u64,
            m as u64,
        ],
    )
}

/// One optimised depth within a cell.
#[derive(Debug, Clone)]
pub(crate) struct DepthOutcome {
    pub p: usize,
    pub method: Method,
    pub seed: u64,
    pub result: OptResult,
    pub ansatz: Ansatz,
    pub elapsed_ms: u64,
}

/// Optimises `spec` at each requested depth with the given methods.
///
/// All INTERP depths share one incremental chain (seeded with `p = 0`); each RI
/// depth gets its own multistart run. `seed_of(p)` supplies the cell seeds.
pub(crate) fn optimize_depths(
    spec: &AnsatzSpec,
    prob: &IsingProblem,
    plan: &[(usize, Method)],
    cfg: &OptimizerConfig,
    seed_of: impl Fn(usize) -> u64,
) -> Result<Vec<DepthOutcome>> {
    let mut out = Vec::with_capacity(plan.len());
    let chain_top = plan
        .iter()
        .filter(|(_, m)| *m == Method::Interp)
        .map(|(p, _)| *p)
        .max();
    if let Some(top) = chain_top {
        let chain_seed = seed_of(0);
        let start = std::time::Instant::now();
        let mut prev: Option<OptResult> = None;
        for p in 1..=top {
            let ansatz = Ansatz::new(&spec.with_depth(p), prob)?;
            let result = match &prev {
                None => ri_on(&ansatz, spec.alpha, cfg, chain_seed)?,
                Some(r) => descend(&ansatz, &interp_extend(&r.params), cfg, None)?,
            };
            if plan.contains(&(p, Method::Interp)) {
                out.push(DepthOutcome {
                    p,
                    method: Method::Interp,
                    seed: chain_seed,
                    result: result.clone(),
                    ansatz: ansatz.clone(),
                    elapsed_ms: start.elapsed().as_millis() as u64,
                });
            }
            prev = Some(result);
        }
    }
    for &(p, method) in plan {
        if method == Method::Ri {
            let start = std::time::Instant::now();
            let ansatz = Ansatz::new(&spec.with_depth(p), prob)?;
            let seed = seed_of(p);
            let result = ri_on(&ansatz, spec.alpha, cfg, seed)?;
            out.push(DepthOutcome {
                p,
                method,
                seed,
                result,
                ansatz,
                elapsed_ms: start.elapsed().as_millis() as u64,
            });
        }
    }
    out.sort_by_key(|o| o.p);
    Ok(out)
}
