use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cell_seed, flip_seed, graph_seed, optimize_depths};
use crate::ansatz::AnsatzSpec;
use crate::error::{Error, Result};
use crate::graph::{
    brute_force_solve, flip_bits, generate_w3r, ising_from_graph, pair_distance, Graph,
    SolutionPair,
};
use crate::optimize::{Method, MethodTable, OptimizerConfig};
use crate::statevector::fidelity;

use super::pipeline::highest_probability_string;

/// A graph together with its exact solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub id: usize,
    pub seed: u64,
    pub graph: Graph,
    pub solution: SolutionPair,
}

impl Instance {
    pub fn solve(id: usize, seed: u64, graph: Graph) -> Result<Self> {
        let solution = brute_force_solve(&graph)?;
        Ok(Instance {
            id,
            seed,
            graph,
            solution,
        })
    }
}

/// `count` w3R instances with ids `0..count`, each solved by brute force.
pub fn generate_instances(n: usize, count: usize, master_seed: u64) -> Result<Vec<Instance>> {
    (0..count)
        .into_par_iter()
        .map(|id| {
            let seed = graph_seed(master_seed, id);
            Instance::solve(id, seed, generate_w3r(n, seed)?)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub alphas: Vec<f64>,
    pub ds: Vec<usize>,
    pub ps: Vec<usize>,
    pub optimizer: OptimizerConfig,
    /// Forces one method for every cell instead of consulting `methods`.
    pub method_override: Option<Method>,
    pub methods: MethodTable,
    /// Keep instances whose maximum cut is attained by more than one pair.
    pub include_degenerate: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            alphas: vec![0.0, 0.4],
            ds: vec![0, 1, 2, 3],
            ps: vec![3],
            optimizer: OptimizerConfig::default(),
            method_override: None,
            methods: MethodTable::default(),
            include_degenerate: false,
        }
    }
}

impl SweepConfig {
    pub(crate) fn method(&self, alpha: f64, p: usize, d: usize) -> Method {
        self.method_override
            .unwrap_or_else(|| self.methods.select(alpha, p, d))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub graph_id: usize,
    pub n: usize,
    pub alpha: f64,
    pub d: usize,
    pub p: usize,
    pub method: Method,
    pub seed: u64,
    pub fidelity: f64,
    pub objective_value: f64,
    /// Pair distance of the most probable bit string to the solution.
    pub d_hp: usize,
    pub converged: bool,
    pub runtime_ms: u64,
}

fn sorted_unique<T: Copy + PartialOrd>(v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    out.dedup();
    out
}

/// Runs every `(instance, alpha, d, p)` cell.
///
/// The warm start at distance `d` comes from flipping `d` bits of the exact
/// solution. QAOA cells (`alpha = 0`) ignore the warm start, so they are
/// optimised once per instance and reported under every `d`. Records are
/// sorted by `(graph_id, alpha, d, p)`, independent of scheduling.
pub fn run_ws_sweep(
    instances: &[Instance],
    cfg: &SweepConfig,
    master_seed: u64,
) -> Result<Vec<SweepRecord>> {
    cfg.optimizer.validate()?;
    if cfg.alphas.iter().any(|a| !(*a >= 0.0 && a.is_finite())) {
        return Err(Error::Domain("alphas must be finite and >= 0".into()));
    }
    if cfg.ps.contains(&0) {
        return Err(Error::Domain("depths must be >= 1".into()));
    }
    let alphas = sorted_unique(&cfg.alphas);
    let ds = sorted_unique(&cfg.ds);
    let ps = sorted_unique(&cfg.ps);
    for inst in instances {
        if let Some(&d) = ds.iter().find(|&&d| d > inst.graph.n()) {
            return Err(Error::FlipOutOfRange {
                d,
                n: inst.graph.n(),
            });
        }
    }

    // (instance, alpha, Some(d)) for warm starts, (instance, 0, None) for QAOA
    let mut jobs = Vec::new();
    for inst in instances
        .iter()
        .filter(|i| cfg.include_degenerate || !i.solution.degenerate)
    {
        for &alpha in &alphas {
            if alpha == 0.0 {
                jobs.push((inst, alpha, None));
            } else {
                jobs.extend(ds.iter().map(|&d| (inst, alpha, Some(d))));
            }
        }
    }

    let batches = jobs
        .into_par_iter()
        .map(|(inst, alpha, d)| run_cell(inst, alpha, d, &ds, &ps, cfg, master_seed))
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<SweepRecord> = batches.into_iter().flatten().collect();
    records.sort_by(|a, b| {
        (a.graph_id, a.alpha, a.d, a.p)
            .partial_cmp(&(b.graph_id, b.alpha, b.d, b.p))
            .expect("finite keys")
    });
    Ok(records)
}

fn run_cell(
    inst: &Instance,
    alpha: f64,
    d: Option<usize>,
    ds: &[usize],
    ps: &[usize],
    cfg: &SweepConfig,
    master_seed: u64,
) -> Result<Vec<SweepRecord>> {
    let prob = ising_from_graph(&inst.graph);
    let key_d = d.unwrap_or(0);
    let spec = match d {
        None => AnsatzSpec::qaoa(1),
        Some(d) => {
            let x0 = flip_bits(
                &inst.solution.solution,
                d,
                flip_seed(master_seed, inst.id, d),
            )?;
            AnsatzSpec::warm_start(x0, alpha, 1)
        }
    };
    let plan: Vec<_> = ps
        .iter()
        .map(|&p| (p, cfg.method(alpha, p, key_d)))
        .collect();
    let outcomes = optimize_depths(&spec, &prob, &plan, &cfg.optimizer, |p| {
        cell_seed(master_seed, inst.id, alpha, key_d, p)
    })?;

    let report_ds: Vec<usize> = match d {
        Some(d) => vec![d],
        None => ds.to_vec(),
    };
    let mut out = Vec::with_capacity(outcomes.len() * report_ds.len());
    for o in &outcomes {
        let state = o.ansatz.state(&o.result.params)?;
        let dist = state.probabilities();
        let f = fidelity(&state, &inst.solution)?;
        let d_hp = pair_distance(&highest_probability_string(&dist), &inst.solution)?;
        for &d in &report_ds {
            out.push(SweepRecord {
                graph_id: inst.id,
                n: inst.graph.n(),
                alpha,
                d,
                p: o.p,
                method: o.method,
                seed: o.seed,
                fidelity: f,
                objective_value: o.result.objective_value,
                d_hp,
                converged: o.result.converged,
                runtime_ms: o.elapsed_ms,
            });
        }
    }
    Ok(out)
}

/// Sample mean and standard error of the mean (`NaN` s.e.m. below two samples).
pub fn mean_and_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub n: usize,
    pub alpha: f64,
    pub d: usize,
    pub p: usize,
    pub count: usize,
    pub mean_fidelity: f64,
    pub sem: f64,
}

/// Mean fidelity and s.e.m. per `(n, alpha, d, p)`, in key order.
pub fn aggregate(records: &[SweepRecord]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(usize, u64, usize, usize), Vec<f64>> = BTreeMap::new();
    for r in records {
        // alpha >= 0, so its bit pattern orders like the value
        groups
            .entry((r.n, r.alpha.to_bits(), r.d, r.p))
            .or_default()
            .push(r.fidelity);
    }
    groups
        .into_iter()
        .map(|((n, alpha, d, p), f)| {
            let (mean_fidelity, sem) = mean_and_sem(&f);
            AggregateRow {
                n,
                alpha: f64::from_bits(alpha),
                d,
                p,
                count: f.len(),
                mean_fidelity,
                sem,
            }
        })
        .collect()
}

/// Largest distance `d` at which the mean WS-QAOA fidelity (bias `alpha`,
/// depth `p`) beats the mean QAOA fidelity; 0 if it never does.
///
/// Records at other depths are ignored. The QAOA baseline is averaged once per
/// instance, since a sweep repeats it under every `d`.
pub fn estimate_dc(records: &[SweepRecord], alpha: f64, p: usize) -> Result<usize> {
    let mut seen = BTreeSet::new();
    let baseline: Vec<f64> = records
        .iter()
        .filter(|r| r.p == p && r.alpha == 0.0 && seen.insert(r.graph_id))
        .map(|r| r.fidelity)
        .collect();
    if baseline.is_empty() {
        return Err(Error::MissingBaseline(p));
    }
    let base = mean_and_sem(&baseline).0;
    let mut by_d: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in records
        .iter()
        .filter(|r| r.p == p && r.alpha == alpha && alpha != 0.0)
    {
        by_d.entry(r.d).or_default().push(r.fidelity);
    }
    Ok(by_d
        .into_iter()
        .filter(|(_, f)| mean_and_sem(f).0 > base)
        .map(|(d, _)| d)
        .max()
        .unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(alpha: f64, d: usize, graph_id: usize, fidelity: f64) -> SweepRecord {
        SweepRecord {
            graph_id,
            n: 10,
            alpha,
            d,
            p: 3,
            method: Method::Interp,
            seed: 0,
            fidelity,
            objective_value: 0.0,
            d_hp: 0,
            converged: true,
            runtime_ms: 0,
        }
    }

    #[test]
    fn dc_threshold_crossing() {
        let mut rs = vec![
            rec(0.0, 1, 0, 0.3),
            rec(0.0, 2, 0, 0.3),
            rec(0.0, 3, 0, 0.3),
        ];
        rs.extend([
            rec(0.4, 1, 0, 0.9),
            rec(0.4, 2, 0, 0.5),
            rec(0.4, 3, 0, 0.2),
        ]);
        assert_eq!(estimate_dc(&rs, 0.4, 3).unwrap(), 2);

        let low = vec![
            rec(0.0, 1, 0, 0.3),
            rec(0.4, 1, 0, 0.1),
            rec(0.4, 2, 0, 0.05),
        ];
        assert_eq!(estimate_dc(&low, 0.4, 3).unwrap(), 0);

        let no_base = vec![rec(0.4, 1, 0, 0.9)];
        assert_eq!(
            estimate_dc(&no_base, 0.4, 3),
            Err(Error::MissingBaseline(3))
        );
        assert_eq!(estimate_dc(&rs, 0.4, 2), Err(Error::MissingBaseline(2)));
    }

    #[test]
    fn sem_definition() {
        let (m, s) = mean_and_sem(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        let sd = (((1.5f64).powi(2) * 2.0 + (0.5f64).powi(2) * 2.0) / 3.0).sqrt();
        assert!((s - sd / 2.0).abs() < 1e-15);
        assert!(mean_and_sem(&[1.0]).1.is_nan());
    }

    #[test]
    fn aggregate_groups_by_key() {
        let rs = vec![
            rec(0.4, 1, 0, 0.5),
            rec(0.4, 1, 1, 0.7),
            rec(0.0, 1, 0, 0.2),
        ];
        let agg = aggregate(&rs);
        assert_eq!(agg.len(), 2);
        assert_eq!(agg[0].alpha, 0.0);
        assert_eq!(agg[1].count, 2);
        assert!((agg[1].mean_fidelity - 0.6).abs() < 1e-15);
    }
}
