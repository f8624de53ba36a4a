//! On-disk formats: graph documents, the instance manifest and CSV tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use wsqaoa::experiment::{generate_instances, graph_seed, Instance};
use wsqaoa::{generate_w3r, Assignment, Graph};

use crate::config::GraphSource;
use crate::error::{CliError, Result};

pub const MANIFEST: &str = "manifest.json";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Bit `i` of the assignment is character `i`.
pub fn bit_string(x: &Assignment) -> String {
    x.bits()
        .iter()
        .map(|b| if *b == 0 { '0' } else { '1' })
        .collect()
}

pub fn parse_bit_string(s: &str) -> Result<Assignment> {
    let bits = s
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(CliError::Input(format!("bad bit string {s:?}"))),
        })
        .collect::<Result<Vec<u8>>>()?;
    Ok(Assignment::new(bits)?)
}

pub fn graph_file_name(id: usize) -> String {
    format!("graph_{id:04}.json")
}

/// `{"n": .., "seed": .., "edges": [[i, j, w], ..]}` with weights at 17
/// significant digits.
pub fn graph_to_json(g: &Graph, seed: u64) -> String {
    let mut s = format!(
        "{{\n  \"n\": {},\n  \"seed\": {},\n  \"edges\": [",
        g.n(),
        seed
    );
    for (k, e) in g.edges().iter().enumerate() {
        let sep = if k == 0 { "" } else { "," };
        write!(s, "{sep}\n    [{}, {}, {}]", e.i, e.j, fmt_f64(e.w)).unwrap();
    }
    s.push_str("\n  ]\n}\n");
    s
}

#[derive(Deserialize)]
struct GraphDoc {
    n: usize,
    seed: u64,
    edges: Vec<(usize, usize, f64)>,
}

pub fn graph_from_json(text: &str) -> Result<(Graph, u64)> {
    let doc: GraphDoc =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("bad graph: {e}")))?;
    Ok((Graph::new(doc.n, doc.edges)?, doc.seed))
}

pub fn read_graph(path: &Path) -> Result<(Graph, u64)> {
    graph_from_json(&fs::read_to_string(path).map_err(CliError::io(path))?).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: usize,
    pub file: String,
    pub seed: u64,
    pub solution: String,
    pub max_cut: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub n: usize,
    pub count: usize,
    pub master_seed: u64,
    pub graphs: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn new(n: usize, master_seed: u64, instances: &[Instance]) -> Self {
        Manifest {
            n,
            count: instances.len(),
            master_seed,
            graphs: instances
                .iter()
                .map(|inst| ManifestEntry {
                    id: inst.id,
                    file: graph_file_name(inst.id),
                    seed: inst.seed,
                    solution: bit_string(&inst.solution.solution),
                    max_cut: inst.solution.max_cut,
                    degenerate: inst.solution.degenerate,
                })
                .collect(),
        }
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path).map_err(CliError::io(&path))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

/// Instances read from a `gen` directory, re-solved by brute force.
pub fn read_instances(dir: &Path) -> Result<Vec<Instance>> {
    let manifest = Manifest::load(dir)?;
    let mut out = Vec::with_capacity(manifest.graphs.len());
    for entry in &manifest.graphs {
        let (graph, seed) = read_graph(&dir.join(&entry.file))?;
        out.push(Instance::solve(entry.id, seed, graph)?);
    }
    Ok(out)
}

pub fn load_instances(source: &GraphSource, master_seed: u64) -> Result<Vec<Instance>> {
    match source {
        GraphSource::Generate { n, instances } => {
            Ok(generate_instances(*n, *instances, master_seed)?)
        }
        GraphSource::Dir(dir) => read_instances(dir),
    }
}

/// One instance by id, without generating the others.
pub fn load_instance(source: &GraphSource, master_seed: u64, id: usize) -> Result<Instance> {
    match source {
        GraphSource::Generate { n, .. } => {
            let seed = graph_seed(master_seed, id);
            Ok(Instance::solve(id, seed, generate_w3r(*n, seed)?)?)
        }
        GraphSource::Dir(dir) => read_instances(dir)?
            .into_iter()
            .find(|i| i.id == id)
            .ok_or_else(|| CliError::Input(format!("no graph with id {id} in {}", dir.display()))),
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(CliError::io(path))
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(CliError::io(path))
}

/// Writes a CSV table with a header row.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| CliError::Internal(format!("csv: {e}"));
    w.write_record(header).map_err(internal)?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        w.write_record(row).map_err(internal)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    fs::write(path, bytes).map_err(CliError::io(path))
}
