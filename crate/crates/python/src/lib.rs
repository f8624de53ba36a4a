//! Python bindings. Bit strings cross the boundary as lists of 0/1 ints with
//! bit `i` at position `i`; statevectors as lists of complex numbers.

#![allow(clippy::useless_conversion)]

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use wsqaoa::experiment::{
    self, estimate_dc, generate_instances, run_ws_sweep, Branch, Instance, PipelineConfig,
    SweepConfig,
};
use wsqaoa::{AnsatzSpec, Assignment, Method, OptResult, OptimizerConfig, ParameterSet};

fn py_err(e: wsqaoa::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn assignment(bits: Vec<u8>) -> PyResult<Assignment> {
    Assignment::new(bits).map_err(py_err)
}

fn params(betas: Vec<f64>, gammas: Vec<f64>) -> PyResult<ParameterSet> {
    ParameterSet::new(betas, gammas).map_err(py_err)
}

fn method(name: &str) -> PyResult<Option<Method>> {
    match name {
        "auto" => Ok(None),
        "ri" => Ok(Some(Method::Ri)),
        "interp" => Ok(Some(Method::Interp)),
        other => Err(PyValueError::new_err(format!(
            "method must be auto, ri or interp, got {other:?}"
        ))),
    }
}

fn optimizer(restarts: usize) -> OptimizerConfig {
    OptimizerConfig {
        restarts,
        ..OptimizerConfig::default()
    }
}

/// Weighted undirected graph.
#[pyclass(module = "wsqaoa")]
#[derive(Clone)]
struct Graph {
    inner: wsqaoa::Graph,
}

#[pymethods]
impl Graph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        Ok(Graph {
            inner: wsqaoa::Graph::new(n, edges).map_err(py_err)?,
        })
    }

    /// Random 3-regular graph with weights in [0, 1).
    #[staticmethod]
    fn w3r(n: usize, seed: u64) -> PyResult<Self> {
        Ok(Graph {
            inner: wsqaoa::generate_w3r(n, seed).map_err(py_err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner.edges().iter().map(|e| (e.i, e.j, e.w)).collect()
    }

    fn cut(&self, bits: Vec<u8>) -> PyResult<f64> {
        wsqaoa::evaluate_cut(&self.inner, &assignment(bits)?).map_err(py_err)
    }

    /// Ising energy `sum (w/2) z_i z_j`, without the offset.
    fn energy(&self, bits: Vec<u8>) -> PyResult<f64> {
        let prob = wsqaoa::ising_from_graph(&self.inner);
        wsqaoa::ising_energy(&prob, &assignment(bits)?).map_err(py_err)
    }

    /// Offset `D = -sum w / 2`, so that cut = -(energy + D).
    #[getter]
    fn offset(&self) -> f64 {
        wsqaoa::ising_from_graph(&self.inner).offset()
    }

    /// `(solution bits, max cut, degenerate)` by exhaustive search.
    fn solve(&self) -> PyResult<(Vec<u8>, f64, bool)> {
        let s = wsqaoa::brute_force_solve(&self.inner).map_err(py_err)?;
        Ok((s.solution.bits().to_vec(), s.max_cut, s.degenerate))
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, edges={})",
            self.inner.n(),
            self.inner.edges().len()
        )
    }
}

/// Depth-`p` QAOA (`alpha = 0`) or WS-QAOA circuit on a graph.
#[pyclass(module = "wsqaoa")]
struct Ansatz {
    spec: AnsatzSpec,
    prob: wsqaoa::IsingProblem,
    inner: wsqaoa::Ansatz,
}

#[pymethods]
impl Ansatz {
    #[new]
    #[pyo3(signature = (graph, p, alpha = 0.0, x0 = None))]
    fn new(graph: &Graph, p: usize, alpha: f64, x0: Option<Vec<u8>>) -> PyResult<Self> {
        let spec = match x0 {
            Some(bits) => AnsatzSpec::warm_start(assignment(bits)?, alpha, p),
            None if alpha == 0.0 => AnsatzSpec::qaoa(p),
            None => return Err(py_err(wsqaoa::Error::MissingWarmStart(alpha))),
        };
        let prob = wsqaoa::ising_from_graph(&graph.inner);
        let inner = wsqaoa::Ansatz::new(&spec, &prob).map_err(py_err)?;
        Ok(Ansatz { spec, prob, inner })
    }

    #[getter]
    fn p(&self) -> usize {
        self.spec.p
    }

    fn objective(&self, betas: Vec<f64>, gammas: Vec<f64>) -> PyResult<f64> {
        self.inner
            .objective(&params(betas, gammas)?)
            .map_err(py_err)
    }

    /// `(objective, gradient)` with the gradient ordered betas then gammas.
    fn value_and_gradient(&self, betas: Vec<f64>, gammas: Vec<f64>) -> PyResult<(f64, Vec<f64>)> {
        self.inner
            .value_and_gradient(&params(betas, gammas)?)
            .map_err(py_err)
    }

    fn state(&self, betas: Vec<f64>, gammas: Vec<f64>) -> PyResult<Vec<Complex64>> {
        let s = self.inner.state(&params(betas, gammas)?).map_err(py_err)?;
        Ok(s.amplitudes().to_vec())
    }

    fn probabilities(&self, betas: Vec<f64>, gammas: Vec<f64>) -> PyResult<Vec<f64>> {
        let s = self.inner.state(&params(betas, gammas)?).map_err(py_err)?;
        Ok(s.probabilities().probs().to_vec())
    }

    /// Best of `restarts` gradient descents from random parameters.
    #[pyo3(signature = (seed, restarts = 50))]
    fn run_ri(&self, py: Python<'_>, seed: u64, restarts: usize) -> PyResult<PyObject> {
        let r = py
            .allow_threads(|| wsqaoa::run_ri(&self.spec, &self.prob, &optimizer(restarts), seed))
            .map_err(py_err)?;
        result_dict(py, &r)
    }
}

fn result_dict(py: Python<'_>, r: &OptResult) -> PyResult<PyObject> {
    let d = PyDict::new_bound(py);
    d.set_item("betas", r.params.betas.clone())?;
    d.set_item("gammas", r.params.gammas.clone())?;
    d.set_item("objective", r.objective_value)?;
    d.set_item("iterations", r.iterations)?;
    d.set_item("converged", r.converged)?;
    Ok(d.into())
}

#[pyfunction]
fn theoretical_initial_fidelity(n: usize, d: usize, alpha: f64) -> PyResult<f64> {
    experiment::theoretical_initial_fidelity(n, d, alpha).map_err(py_err)
}

/// Critical relative distance `d_c / n` on the `"plus"` or `"minus"` branch.
#[pyfunction]
#[pyo3(signature = (n, alpha, branch = "plus"))]
fn theoretical_dc_over_n(n: usize, alpha: f64, branch: &str) -> PyResult<f64> {
    let branch = match branch {
        "plus" => Branch::Plus,
        "minus" => Branch::Minus,
        other => {
            return Err(PyValueError::new_err(format!(
                "branch must be plus or minus, got {other:?}"
            )))
        }
    };
    experiment::theoretical_dc_over_n(n, alpha, branch).map_err(py_err)
}

#[pyfunction]
fn flip_bits(bits: Vec<u8>, d: usize, seed: u64) -> PyResult<Vec<u8>> {
    Ok(wsqaoa::flip_bits(&assignment(bits)?, d, seed)
        .map_err(py_err)?
        .bits()
        .to_vec())
}

/// Fidelity of a probability vector with the solution pair of `solution`.
#[pyfunction]
fn fidelity(probabilities: Vec<f64>, solution: Vec<u8>) -> PyResult<f64> {
    let sol = assignment(solution)?;
    let dist = wsqaoa::Distribution::new(probabilities).map_err(py_err)?;
    Ok(dist.prob(&sol) + dist.prob(&sol.complement()))
}

/// Fidelity sweep on `instances` seeded w3R graphs. Returns one dict per record.
#[pyfunction]
#[pyo3(signature = (n, instances, seed, alphas, ds, ps, method = "auto", restarts = 50))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    py: Python<'_>,
    n: usize,
    instances: usize,
    seed: u64,
    alphas: Vec<f64>,
    ds: Vec<usize>,
    ps: Vec<usize>,
    method: &str,
    restarts: usize,
) -> PyResult<Vec<PyObject>> {
    let cfg = SweepConfig {
        alphas,
        ds,
        ps,
        optimizer: optimizer(restarts),
        method_override: self::method(method)?,
        ..SweepConfig::default()
    };
    let records = py
        .allow_threads(|| {
            let inst = generate_instances(n, instances, seed)?;
            run_ws_sweep(&inst, &cfg, seed)
        })
        .map_err(py_err)?;
    records
        .iter()
        .map(|r| {
            let d = PyDict::new_bound(py);
            d.set_item("graph_id", r.graph_id)?;
            d.set_item("n", r.n)?;
            d.set_item("alpha", r.alpha)?;
            d.set_item("d", r.d)?;
            d.set_item("p", r.p)?;
            d.set_item("method", r.method.to_string())?;
            d.set_item("seed", r.seed)?;
            d.set_item("fidelity", r.fidelity)?;
            d.set_item("objective", r.objective_value)?;
            d.set_item("d_hp", r.d_hp)?;
            d.set_item("converged", r.converged)?;
            Ok(d.into())
        })
        .collect()
}

/// Critical distance from sweep output: the largest `d` whose mean WS-QAOA
/// fidelity beats the QAOA mean at depth `p`.
#[pyfunction]
#[pyo3(signature = (n, instances, seed, alpha, ds, p = 3))]
fn critical_distance(
    py: Python<'_>,
    n: usize,
    instances: usize,
    seed: u64,
    alpha: f64,
    ds: Vec<usize>,
    p: usize,
) -> PyResult<usize> {
    let cfg = SweepConfig {
        alphas: vec![0.0, alpha],
        ds,
        ps: vec![p],
        ..SweepConfig::default()
    };
    py.allow_threads(|| {
        let inst = generate_instances(n, instances, seed)?;
        estimate_dc(&run_ws_sweep(&inst, &cfg, seed)?, alpha, p)
    })
    .map_err(py_err)
}

/// QAOA+WS on one graph: QAOA at depth `p`, then `m` warm starts of bias `alpha`.
#[pyfunction]
#[pyo3(signature = (graph, p, m, alpha, seed, restarts = 50))]
fn qaoa_plus_ws(
    py: Python<'_>,
    graph: &Graph,
    p: usize,
    m: usize,
    alpha: f64,
    seed: u64,
    restarts: usize,
) -> PyResult<PyObject> {
    let cfg = PipelineConfig {
        optimizer: optimizer(restarts),
        ..PipelineConfig::default()
    };
    let g = graph.inner.clone();
    let r = py
        .allow_threads(|| {
            let inst = Instance::solve(0, seed, g)?;
            experiment::qaoa_plus_ws(&inst, p, m, alpha, &cfg, seed)
        })
        .map_err(py_err)?;
    let d = PyDict::new_bound(py);
    d.set_item("qaoa_fidelity", r.qaoa_fidelity)?;
    d.set_item("fidelity", r.fidelity)?;
    let runs: Vec<(Vec<u8>, usize, f64)> = r
        .runs
        .iter()
        .map(|w| (w.x0.bits().to_vec(), w.distance, w.fidelity))
        .collect();
    d.set_item("warm_starts", runs)?;
    Ok(d.into())
}

#[pymodule]
#[pyo3(name = "wsqaoa")]
fn wsqaoa_python(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_class::<Ansatz>()?;
    m.add_function(wrap_pyfunction!(theoretical_initial_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_dc_over_n, m)?)?;
    m.add_function(wrap_pyfunction!(flip_bits, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(critical_distance, m)?)?;
    m.add_function(wrap_pyfunction!(qaoa_plus_ws, m)?)?;
    Ok(())
}
