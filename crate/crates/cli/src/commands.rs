//! Command implementations. Every command computes its results in memory,
//! merges them in a fixed order, then writes its tables once.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;
use wsqaoa::experiment::{
    aggregate, cell_seed, flip_seed, highest_probability_string, qaoa_plus_ws, run_ws_sweep,
    theoretical_dc_over_n, theoretical_initial_fidelity, Branch, Instance, PipelineConfig,
    PipelineResult, SweepConfig, SweepRecord,
};
use wsqaoa::optimize::{descend, DescentLog};
use wsqaoa::{
    fidelity, flip_bits, interp_extend, ising_from_graph, pair_distance, run_ri, Ansatz,
    AnsatzSpec, Method, MethodTable,
};

use crate::config::{
    GenConfig, QaoaWsConfig, RunConfig, SolveConfig, SweepRunConfig, TheoryConfig,
};
use crate::error::{CliError, Result};
use crate::io::{
    bit_string, create_dir, fmt_f64, graph_file_name, graph_to_json, load_instance, load_instances,
    write_table, write_text, Manifest, MANIFEST,
};

pub const RECORDS_HEADER: [&str; 11] = [
    "graph_id",
    "n",
    "alpha",
    "d",
    "p",
    "method",
    "seed",
    "fidelity",
    "objective",
    "d_hp",
    "converged",
];
pub const TIMINGS_HEADER: [&str; 5] = ["graph_id", "alpha", "d", "p", "runtime_ms"];
pub const AGGREGATE_HEADER: [&str; 7] = ["n", "alpha", "d", "p", "count", "mean_fidelity", "sem"];
pub const F0_HEADER: [&str; 4] = ["n", "alpha", "d", "f0"];
pub const DC_HEADER: [&str; 4] = ["n", "alpha", "dc_plus", "dc_minus"];
pub const PIPELINE_HEADER: [&str; 9] = [
    "graph_id",
    "n",
    "p",
    "alpha",
    "m",
    "qaoa_method",
    "qaoa_fidelity",
    "qaoa_ws_fidelity",
    "warm_starts",
];
pub const WARM_START_HEADER: [&str; 8] = [
    "graph_id",
    "m_index",
    "x0",
    "d",
    "method",
    "fidelity",
    "objective",
    "converged",
];
pub const SOLVE_HEADER: [&str; 10] = [
    "p",
    "method",
    "seed",
    "iterations",
    "objective",
    "grad_norm",
    "converged",
    "fidelity",
    "d_hp",
    "best_string",
];

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    version: &'a str,
    workers: usize,
    started_unix_s: u64,
    wall_clock_ms: u128,
    config: &'a RunConfig,
}

/// Runs `cfg` on a pool of `workers` threads (all cores when `None`) and
/// returns a human-readable summary.
pub fn run(cfg: &RunConfig, workers: Option<usize>) -> Result<String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    let started_unix_s = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let clock = Instant::now();
    let report = pool.install(|| match cfg {
        RunConfig::Gen(c) => cmd_gen(c),
        RunConfig::Solve(c) => cmd_solve(c),
        RunConfig::Sweep(c) => cmd_sweep(c),
        RunConfig::Theory(c) => cmd_theory(c),
        RunConfig::QaoaWs(c) => cmd_qaoa_ws(c),
    })?;
    if let Some(out) = cfg.out() {
        cfg.save(&out.join("config.json"))?;
        let meta = Metadata {
            command: cfg.name(),
            version: env!("CARGO_PKG_VERSION"),
            workers: pool.current_num_threads(),
            started_unix_s,
            wall_clock_ms: clock.elapsed().as_millis(),
            config: cfg,
        };
        let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
        write_text(&out.join("metadata.json"), &(text + "\n"))?;
    }
    Ok(report)
}

fn check_alphas(alphas: &[f64]) -> Result<()> {
    match alphas.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
        Some(a) => Err(CliError::Usage(format!(
            "alpha must be finite and >= 0, got {a}"
        ))),
        None => Ok(()),
    }
}

pub fn cmd_gen(cfg: &GenConfig) -> Result<String> {
    let mut report = String::new();
    let instances = wsqaoa::experiment::generate_instances(cfg.n, cfg.instances, cfg.seed)?;
    create_dir(&cfg.out)?;
    for inst in &instances {
        write_text(
            &cfg.out.join(graph_file_name(inst.id)),
            &graph_to_json(&inst.graph, inst.seed),
        )?;
    }
    let manifest = Manifest::new(cfg.n, cfg.seed, &instances);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_text(&cfg.out.join(MANIFEST), &(text + "\n"))?;
    let degenerate = instances.iter().filter(|i| i.solution.degenerate).count();
    let _ = writeln!(
        report,
        "wrote {} graphs (n = {}, {degenerate} degenerate) to {}",
        instances.len(),
        cfg.n,
        cfg.out.display()
    );
    Ok(report)
}

pub fn sweep_records(cfg: &SweepRunConfig) -> Result<Vec<SweepRecord>> {
    check_alphas(&cfg.alphas)?;
    let instances = load_instances(&cfg.source, cfg.seed)?;
    let sweep = SweepConfig {
        alphas: cfg.alphas.clone(),
        ds: cfg.ds.clone(),
        ps: cfg.ps.clone(),
        optimizer: cfg.optimizer.clone(),
        method_override: cfg.method.forced(),
        methods: MethodTable::default(),
        include_degenerate: cfg.include_degenerate,
    };
    Ok(run_ws_sweep(&instances, &sweep, cfg.seed)?)
}

pub fn record_row(r: &SweepRecord) -> Vec<String> {
    vec![
        r.graph_id.to_string(),
        r.n.to_string(),
        fmt_f64(r.alpha),
        r.d.to_string(),
        r.p.to_string(),
        r.method.to_string(),
        r.seed.to_string(),
        fmt_f64(r.fidelity),
        fmt_f64(r.objective_value),
        r.d_hp.to_string(),
        r.converged.to_string(),
    ]
}

/// Writes `records.csv`, `aggregate.csv` and `timings.csv`. Wall-clock times
/// live in their own table so that the other two are reproducible byte for byte.
pub fn write_sweep_tables(out: &Path, records: &[SweepRecord]) -> Result<()> {
    create_dir(out)?;
    let rows: Vec<_> = records.iter().map(record_row).collect();
    write_table(&out.join("records.csv"), &RECORDS_HEADER, &rows)?;
    let agg: Vec<_> = aggregate(records)
        .iter()
        .map(|a| {
            vec![
                a.n.to_string(),
                fmt_f64(a.alpha),
                a.d.to_string(),
                a.p.to_string(),
                a.count.to_string(),
                fmt_f64(a.mean_fidelity),
                fmt_f64(a.sem),
            ]
        })
        .collect();
    write_table(&out.join("aggregate.csv"), &AGGREGATE_HEADER, &agg)?;
    let times: Vec<_> = records
        .iter()
        .map(|r| {
            vec![
                r.graph_id.to_string(),
                fmt_f64(r.alpha),
                r.d.to_string(),
                r.p.to_string(),
                r.runtime_ms.to_string(),
            ]
        })
        .collect();
    write_table(&out.join("timings.csv"), &TIMINGS_HEADER, &times)
}

pub fn cmd_sweep(cfg: &SweepRunConfig) -> Result<String> {
    let mut report = String::new();
    let records = sweep_records(cfg)?;
    write_sweep_tables(&cfg.out, &records)?;
    for a in aggregate(&records) {
        let _ = writeln!(
            report,
            "n={} alpha={} d={} p={}: F = {:.4} +- {:.4} ({} graphs)",
            a.n, a.alpha, a.d, a.p, a.mean_fidelity, a.sem, a.count
        );
    }
    Ok(report)
}

type Rows = Vec<Vec<String>>;

pub fn theory_tables(cfg: &TheoryConfig) -> Result<(Rows, Rows)> {
    check_alphas(&cfg.alphas)?;
    let mut f0 = Vec::new();
    let mut dc = Vec::new();
    for &n in &cfg.ns {
        for &alpha in &cfg.alphas {
            for d in 0..=n {
                f0.push(vec![
                    n.to_string(),
                    fmt_f64(alpha),
                    d.to_string(),
                    fmt_f64(theoretical_initial_fidelity(n, d, alpha)?),
                ]);
            }
            if alpha > 0.0 {
                dc.push(vec![
                    n.to_string(),
                    fmt_f64(alpha),
                    fmt_f64(theoretical_dc_over_n(n, alpha, Branch::Plus)?),
                    fmt_f64(theoretical_dc_over_n(n, alpha, Branch::Minus)?),
                ]);
            }
        }
    }
    Ok((f0, dc))
}

/// `f0.csv` holds the initial fidelity at every integer distance; `dc.csv` the
/// two branches of the critical relative distance `d_c / n` for each `alpha > 0`.
pub fn cmd_theory(cfg: &TheoryConfig) -> Result<String> {
    let mut report = String::new();
    let (f0, dc) = theory_tables(cfg)?;
    create_dir(&cfg.out)?;
    write_table(&cfg.out.join("f0.csv"), &F0_HEADER, &f0)?;
    write_table(&cfg.out.join("dc.csv"), &DC_HEADER, &dc)?;
    let _ = writeln!(
        report,
        "wrote {} f0 rows and {} dc rows",
        f0.len(),
        dc.len()
    );
    Ok(report)
}

pub fn pipeline_results(cfg: &QaoaWsConfig) -> Result<Vec<(Instance, PipelineResult)>> {
    if cfg.m == 0 || cfg.p == 0 {
        return Err(CliError::Usage("--m and --p must be at least 1".into()));
    }
    let instances: Vec<_> = load_instances(&cfg.source, cfg.seed)?
        .into_iter()
        .filter(|i| cfg.include_degenerate || !i.solution.degenerate)
        .collect();
    let pcfg = PipelineConfig {
        optimizer: cfg.optimizer.clone(),
        methods: MethodTable::default(),
        method_override: cfg.method.forced(),
        drop_policy: cfg.drop_policy,
    };
    let results = instances
        .par_iter()
        .map(|inst| qaoa_plus_ws(inst, cfg.p, cfg.m, cfg.alpha, &pcfg, cfg.seed))
        .collect::<wsqaoa::Result<Vec<_>>>()?;
    Ok(instances.into_iter().zip(results).collect())
}

pub fn cmd_qaoa_ws(cfg: &QaoaWsConfig) -> Result<String> {
    let mut report = String::new();
    let results = pipeline_results(cfg)?;
    let mut summary = Vec::new();
    let mut runs = Vec::new();
    for (inst, r) in &results {
        summary.push(vec![
            inst.id.to_string(),
            inst.graph.n().to_string(),
            cfg.p.to_string(),
            fmt_f64(cfg.alpha),
            cfg.m.to_string(),
            r.qaoa_method.to_string(),
            fmt_f64(r.qaoa_fidelity),
            fmt_f64(r.fidelity),
            r.runs.len().to_string(),
        ]);
        for w in &r.runs {
            runs.push(vec![
                inst.id.to_string(),
                w.m_index.to_string(),
                bit_string(&w.x0),
                w.distance.to_string(),
                w.method.to_string(),
                fmt_f64(w.fidelity),
                fmt_f64(w.result.objective_value),
                w.result.converged.to_string(),
            ]);
        }
    }
    create_dir(&cfg.out)?;
    write_table(&cfg.out.join("pipeline.csv"), &PIPELINE_HEADER, &summary)?;
    write_table(&cfg.out.join("warm_starts.csv"), &WARM_START_HEADER, &runs)?;
    if !results.is_empty() {
        let k = results.len() as f64;
        let q = results.iter().map(|(_, r)| r.qaoa_fidelity).sum::<f64>() / k;
        let ws = results.iter().map(|(_, r)| r.fidelity).sum::<f64>() / k;
        let _ = writeln!(
            report,
            "{} graphs: QAOA F = {q:.4}, QAOA+WS F = {ws:.4}",
            results.len()
        );
    }
    Ok(report)
}

/// Optimises one instance at depths `1..=p` and prints each descent.
///
/// Seeds match a sweep cell with the same master seed, so the reported
/// fidelities agree with `sweep` rows.
pub fn cmd_solve(cfg: &SolveConfig) -> Result<String> {
    let mut report = String::new();
    check_alphas(&[cfg.alpha])?;
    if cfg.p == 0 {
        return Err(CliError::Usage("--p must be at least 1".into()));
    }
    let inst = load_instance(&cfg.source, cfg.seed, cfg.graph_id)?;
    let n = inst.graph.n();
    let prob = ising_from_graph(&inst.graph);
    let key_d = if cfg.alpha == 0.0 { 0 } else { cfg.d };
    let spec = if cfg.alpha == 0.0 {
        AnsatzSpec::qaoa(1)
    } else {
        let x0 = flip_bits(
            &inst.solution.solution,
            cfg.d,
            flip_seed(cfg.seed, inst.id, cfg.d),
        )?;
        let _ = writeln!(
            report,
            "warm start x0 = {} (d = {})",
            bit_string(&x0),
            cfg.d
        );
        AnsatzSpec::warm_start(x0, cfg.alpha, 1)
    };
    let _ = writeln!(
        report,
        "graph {} (n = {n}): solution {} max cut {:.6}{}",
        inst.id,
        bit_string(&inst.solution.solution),
        inst.solution.max_cut,
        if inst.solution.degenerate {
            " (degenerate)"
        } else {
            ""
        }
    );
    let method = cfg
        .method
        .forced()
        .unwrap_or_else(|| MethodTable::default().select(cfg.alpha, cfg.p, key_d));
    let depths: Vec<usize> = match method {
        Method::Interp => (1..=cfg.p).collect(),
        Method::Ri => vec![cfg.p],
    };
    let mut rows = Vec::new();
    let mut prev = None;
    for p in depths {
        let ansatz = Ansatz::new(&spec.with_depth(p), &prob)?;
        let mut log = DescentLog::new();
        let (seed, result) = match (&prev, method) {
            (Some(r), Method::Interp) => {
                let r = descend(&ansatz, &interp_extend(r), &cfg.optimizer, Some(&mut log))?;
                (cell_seed(cfg.seed, inst.id, cfg.alpha, key_d, 0), r)
            }
            _ => {
                let seed = match method {
                    Method::Interp => cell_seed(cfg.seed, inst.id, cfg.alpha, key_d, 0),
                    Method::Ri => cell_seed(cfg.seed, inst.id, cfg.alpha, key_d, p),
                };
                (
                    seed,
                    run_ri(&spec.with_depth(p), &prob, &cfg.optimizer, seed)?,
                )
            }
        };
        let state = ansatz.state(&result.params)?;
        let f = fidelity(&state, &inst.solution)?;
        let best = highest_probability_string(&state.probabilities());
        let d_hp = pair_distance(&best, &inst.solution)?;
        let _ = writeln!(
            report,
            "p={p} {method}: {} iterations, objective {:.10}, |grad| {:.2e}, converged {}, F = {:.6}, d_hp = {d_hp}",
            result.iterations,
            result.objective_value,
            result.grad_norm_final,
            result.converged,
            f
        );
        if !log.is_empty() {
            let shown: Vec<String> = log
                .iter()
                .step_by((log.len() / 10).max(1))
                .map(|v| format!("{v:.6}"))
                .collect();
            let _ = writeln!(report, "  descent: {}", shown.join(" "));
        }
        rows.push(vec![
            p.to_string(),
            method.to_string(),
            seed.to_string(),
            result.iterations.to_string(),
            fmt_f64(result.objective_value),
            fmt_f64(result.grad_norm_final),
            result.converged.to_string(),
            fmt_f64(f),
            d_hp.to_string(),
            bit_string(&best),
        ]);
        prev = Some(result.params);
    }
    if let Some(out) = &cfg.out {
        create_dir(out)?;
        write_table(&out.join("solve.csv"), &SOLVE_HEADER, &rows)?;
    }
    Ok(report)
}
