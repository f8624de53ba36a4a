use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use proptest::prelude::*;
use wsqaoa::experiment::DropPolicy;
use wsqaoa::{evaluate_cut, OptimizerConfig, StepRule};
use wsqaoa_cli::commands::{
    AGGREGATE_HEADER, DC_HEADER, F0_HEADER, PIPELINE_HEADER, RECORDS_HEADER, WARM_START_HEADER,
};
use wsqaoa_cli::io::{graph_from_json, graph_to_json, parse_bit_string, read_graph, Manifest};
use wsqaoa_cli::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wsqaoa"))
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

fn fast_optimizer() -> OptimizerConfig {
    OptimizerConfig {
        restarts: 4,
        ..OptimizerConfig::default()
    }
}

fn small_sweep(out: PathBuf) -> SweepRunConfig {
    SweepRunConfig {
        source: GraphSource::Generate { n: 6, instances: 3 },
        seed: 11,
        alphas: vec![0.0, 0.4],
        ds: vec![1, 2],
        ps: vec![1, 2],
        method: MethodChoice::Auto,
        optimizer: fast_optimizer(),
        include_degenerate: false,
        out,
    }
}

fn optimizer_strategy() -> impl Strategy<Value = OptimizerConfig> {
    (
        1e-4f64..1.0,
        1e-8f64..1e-2,
        1usize..10_000,
        1usize..100,
        any::<bool>(),
    )
        .prop_map(|(lr, thr, iters, restarts, fixed)| OptimizerConfig {
            learning_rate: lr,
            grad_threshold: thr,
            max_iters: iters,
            restarts,
            step_rule: if fixed {
                StepRule::Fixed
            } else {
                StepRule::Spectral
            },
            ..OptimizerConfig::default()
        })
}

fn source_strategy() -> impl Strategy<Value = GraphSource> {
    prop_oneof![
        (2usize..=10, 1usize..100).prop_map(|(h, instances)| GraphSource::Generate {
            n: 2 * h,
            instances
        }),
        "[a-z/]{1,12}".prop_map(|s| GraphSource::Dir(PathBuf::from(s))),
    ]
}

fn method_strategy() -> impl Strategy<Value = MethodChoice> {
    prop_oneof![
        Just(MethodChoice::Auto),
        Just(MethodChoice::Ri),
        Just(MethodChoice::Interp)
    ]
}

fn run_config_strategy() -> impl Strategy<Value = RunConfig> {
    let alphas = proptest::collection::vec(0.0f64..10.0, 1..4);
    prop_oneof![
        (2usize..=12, 1usize..60, any::<u64>()).prop_map(|(h, instances, seed)| {
            RunConfig::Gen(GenConfig {
                n: 2 * h,
                instances,
                seed,
                out: "g".into(),
            })
        }),
        (
            source_strategy(),
            any::<u64>(),
            alphas.clone(),
            proptest::collection::vec(0usize..10, 1..4),
            proptest::collection::vec(1usize..6, 1..4),
            method_strategy(),
            optimizer_strategy(),
            any::<bool>(),
        )
            .prop_map(|(source, seed, alphas, ds, ps, method, optimizer, deg)| {
                RunConfig::Sweep(SweepRunConfig {
                    source,
                    seed,
                    alphas,
                    ds,
                    ps,
                    method,
                    optimizer,
                    include_degenerate: deg,
                    out: "s".into(),
                })
            }),
        (proptest::collection::vec(1usize..30, 1..4), alphas).prop_map(|(ns, alphas)| {
            RunConfig::Theory(TheoryConfig {
                ns,
                alphas,
                out: "t".into(),
            })
        }),
        (
            source_strategy(),
            any::<u64>(),
            1usize..5,
            1usize..10,
            0.01f64..5.0,
            method_strategy(),
            optimizer_strategy(),
            any::<bool>(),
        )
            .prop_map(|(source, seed, p, m, alpha, method, optimizer, shrink)| {
                RunConfig::QaoaWs(QaoaWsConfig {
                    source,
                    seed,
                    p,
                    m,
                    alpha,
                    method,
                    optimizer,
                    drop_policy: if shrink {
                        DropPolicy::Shrink
                    } else {
                        DropPolicy::Refill
                    },
                    include_degenerate: false,
                    out: "q".into(),
                })
            }),
        (
            source_strategy(),
            0usize..5,
            any::<u64>(),
            0.0f64..3.0,
            0usize..5,
            1usize..5,
            optimizer_strategy(),
        )
            .prop_map(|(source, graph_id, seed, alpha, d, p, optimizer)| {
                RunConfig::Solve(SolveConfig {
                    source,
                    graph_id,
                    seed,
                    alpha,
                    d,
                    p,
                    method: MethodChoice::Auto,
                    optimizer,
                    out: None,
                })
            }),
    ]
}

proptest! {
    #[test]
    fn run_config_round_trips(cfg in run_config_strategy()) {
        prop_assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn graph_documents_round_trip_bit_exactly(h in 2usize..=10, seed in any::<u64>()) {
        let g = wsqaoa::generate_w3r(2 * h, seed).unwrap();
        let (back, s) = graph_from_json(&graph_to_json(&g, seed)).unwrap();
        prop_assert_eq!(s, seed);
        prop_assert_eq!(back, g);
    }
}

#[test]
fn gen_writes_solved_manifest_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = |out: PathBuf| {
        RunConfig::Gen(GenConfig {
            n: 10,
            instances: 50,
            seed: 7,
            out,
        })
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run(&cfg(a.clone()), Some(1)).unwrap();
    run(&cfg(b.clone()), Some(1)).unwrap();

    let manifest = Manifest::load(&a).unwrap();
    assert_eq!(manifest.graphs.len(), 50);
    for entry in &manifest.graphs {
        let text_a = fs::read(a.join(&entry.file)).unwrap();
        assert_eq!(text_a, fs::read(b.join(&entry.file)).unwrap());
        let (g, seed) = read_graph(&a.join(&entry.file)).unwrap();
        assert_eq!(seed, entry.seed);
        let x = parse_bit_string(&entry.solution).unwrap();
        assert_eq!(evaluate_cut(&g, &x).unwrap(), entry.max_cut);
        let solved = wsqaoa::brute_force_solve(&g).unwrap();
        assert_eq!(solved.degenerate, entry.degenerate);
    }
    assert_eq!(
        fs::read(a.join("manifest.json")).unwrap(),
        fs::read(b.join("manifest.json")).unwrap()
    );
}

#[test]
fn degenerate_instances_are_flagged() {
    // K4 with unit weights has three optimal pairs, the unit square one
    let k4 = wsqaoa::Graph::new(
        4,
        [
            (0, 1, 1.0),
            (1, 2, 1.0),
            (2, 3, 1.0),
            (3, 0, 1.0),
            (0, 2, 1.0),
            (1, 3, 1.0),
        ],
    )
    .unwrap();
    let square =
        wsqaoa::Graph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap();
    let instances = vec![
        wsqaoa::experiment::Instance::solve(0, 0, k4).unwrap(),
        wsqaoa::experiment::Instance::solve(1, 0, square).unwrap(),
    ];
    let manifest = Manifest::new(4, 0, &instances);
    assert!(manifest.graphs[0].degenerate);
    assert!(!manifest.graphs[1].degenerate);
    assert_eq!(manifest.graphs[1].solution, "0101");
    assert_eq!(manifest.graphs[1].max_cut, 4.0);
}

#[test]
fn sweep_tables_have_exact_headers_and_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_sweep(dir.path().join("s"));
    run(&RunConfig::Sweep(cfg.clone()), Some(1)).unwrap();

    let (header, rows) = read_csv(&cfg.out.join("records.csv"));
    assert_eq!(header, RECORDS_HEADER);
    assert_eq!(rows.len(), 3 * 2 * 2 * 2);

    let (agg_header, agg) = read_csv(&cfg.out.join("aggregate.csv"));
    assert_eq!(agg_header, AGGREGATE_HEADER);
    let fid = col(&header, "fidelity");
    for a in &agg {
        let key = &a[..4];
        let f: Vec<f64> = rows
            .iter()
            .filter(|r| {
                r[col(&header, "n")] == key[0]
                    && r[col(&header, "alpha")] == key[1]
                    && r[col(&header, "d")] == key[2]
                    && r[col(&header, "p")] == key[3]
            })
            .map(|r| r[fid].parse().unwrap())
            .collect();
        let count: usize = a[4].parse().unwrap();
        assert_eq!(count, f.len());
        let mean = f.iter().sum::<f64>() / count as f64;
        let sd = (f.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count as f64 - 1.0)).sqrt();
        let got_mean: f64 = a[5].parse().unwrap();
        let got_sem: f64 = a[6].parse().unwrap();
        assert!((got_mean - mean).abs() < 1e-15);
        assert!((got_sem - sd / (count as f64).sqrt()).abs() < 1e-15);
    }

    let (t_header, times) = read_csv(&cfg.out.join("timings.csv"));
    assert_eq!(t_header.last().unwrap(), "runtime_ms");
    assert_eq!(times.len(), rows.len());

    let saved = RunConfig::load(&cfg.out.join("config.json")).unwrap();
    assert_eq!(saved, RunConfig::Sweep(cfg));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("s/metadata.json")).unwrap())
            .unwrap();
    assert_eq!(meta["command"], "sweep");
    assert!(meta["wall_clock_ms"].is_u64());
}

#[test]
fn theory_rows_satisfy_the_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = TheoryConfig {
        ns: vec![2, 6, 12, 20],
        alphas: vec![0.0, 0.4, 1.0, 3.0],
        out: dir.path().into(),
    };
    run(&RunConfig::Theory(cfg), None).unwrap();

    let (header, f0) = read_csv(&dir.path().join("f0.csv"));
    assert_eq!(header, F0_HEADER);
    assert_eq!(f0.len(), 4 * (3 + 7 + 13 + 21));
    for r in &f0 {
        let n: i32 = r[0].parse().unwrap();
        let alpha: f64 = r[1].parse().unwrap();
        let v: f64 = r[3].parse().unwrap();
        if alpha == 0.0 {
            assert!((v - 2f64.powi(1 - n)).abs() < 1e-15);
        }
        if n == 2 && alpha == 1.0 && r[2] == "0" {
            assert!((v - 0.75).abs() < 1e-15);
        }
    }

    let (header, dc) = read_csv(&dir.path().join("dc.csv"));
    assert_eq!(header, DC_HEADER);
    assert_eq!(dc.len(), 4 * 3);
    for r in &dc {
        let plus: f64 = r[2].parse().unwrap();
        let minus: f64 = r[3].parse().unwrap();
        assert!((plus + minus - 1.0).abs() < 1e-12);
        assert!(plus <= 0.5);
    }
}

#[test]
fn qaoa_ws_lists_m_rows_and_matches_the_sweep_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let source = GraphSource::Generate { n: 8, instances: 3 };
    let q = QaoaWsConfig {
        source: source.clone(),
        seed: 5,
        p: 1,
        m: 3,
        alpha: 0.4,
        method: MethodChoice::Auto,
        optimizer: fast_optimizer(),
        drop_policy: DropPolicy::Refill,
        include_degenerate: false,
        out: dir.path().join("q"),
    };
    run(&RunConfig::QaoaWs(q.clone()), Some(1)).unwrap();
    let (header, summary) = read_csv(&q.out.join("pipeline.csv"));
    assert_eq!(header, PIPELINE_HEADER);
    let (w_header, runs) = read_csv(&q.out.join("warm_starts.csv"));
    assert_eq!(w_header, WARM_START_HEADER);
    assert_eq!(summary.len(), 3);
    for s in &summary {
        assert_eq!(runs.iter().filter(|r| r[0] == s[0]).count(), 3);
        assert_eq!(s[8], "3");
    }

    let sweep = SweepRunConfig {
        source,
        seed: 5,
        alphas: vec![0.0],
        ds: vec![1],
        ps: vec![1],
        method: MethodChoice::Auto,
        optimizer: fast_optimizer(),
        include_degenerate: false,
        out: dir.path().join("s"),
    };
    run(&RunConfig::Sweep(sweep.clone()), Some(1)).unwrap();
    let (header, records) = read_csv(&sweep.out.join("records.csv"));
    let fid = col(&header, "fidelity");
    for (s, r) in summary.iter().zip(&records) {
        assert_eq!(s[0], r[0]);
        assert_eq!(s[6], r[fid]);
    }
}

#[test]
fn sweep_rerun_from_config_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = small_sweep(dir.path().join("one"));
    run(&RunConfig::Sweep(first.clone()), Some(1)).unwrap();

    let out = bin()
        .args(["sweep", "--workers", "3", "--out"])
        .arg(dir.path().join("two"))
        .arg("--config")
        .arg(first.out.join("config.json"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for table in ["records.csv", "aggregate.csv"] {
        assert_eq!(
            fs::read(first.out.join(table)).unwrap(),
            fs::read(dir.path().join("two").join(table)).unwrap(),
            "{table}"
        );
    }
}

#[test]
fn exit_codes_follow_the_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code().unwrap();

    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["sweep", "--no-such-flag"]), 1);
    assert_eq!(code(&["sweep", "--n", "8"]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["sweep", "--method", "newton", "--n", "8"]), 1);

    let missing = dir.path().join("missing");
    let out = dir.path().join("o");
    let (missing, out) = (missing.to_str().unwrap(), out.to_str().unwrap());
    assert_eq!(code(&["sweep", "--graphs", missing, "--out", out]), 2);
    assert_eq!(code(&["gen", "--n", "7", "--out", out]), 2);

    let theory = dir.path().join("th");
    assert_eq!(
        code(&[
            "theory",
            "--n",
            "4",
            "--alpha",
            "1",
            "--out",
            theory.to_str().unwrap()
        ]),
        0
    );
    assert_eq!(
        code(&[
            "gen",
            "--config",
            theory.join("config.json").to_str().unwrap()
        ]),
        1
    );
}
