//! Python bindings: graphs, encodings, the exact solve pipeline, the
//! certification suites and the Tetra bound sweep.

use num_complex::Complex64;
use pyo3::exceptions::{PyMemoryError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qrao_core::analysis::{self, region_sweep};
use qrao_core::commands::{self, SolveConfig, Suite};
use qrao_core::encoding::{assign, PairingStrategy};
use qrao_core::graph::{brute_force_maxcut, parse_edge_list};
use qrao_core::hamiltonian;
use qrao_core::rounding::RoundingMethod;
use qrao_core::{Error, QracKind};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Size { .. } => PyMemoryError::new_err(e.to_string()),
        Error::Numerical(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn kind(label: &str) -> PyResult<QracKind> {
    label.parse().map_err(to_py)
}

fn pairing(label: &str, seed: u64) -> PyResult<PairingStrategy> {
    match label {
        "index" => Ok(PairingStrategy::Index),
        "random" => Ok(PairingStrategy::Random(seed)),
        "greedy" => Ok(PairingStrategy::GreedyIntra),
        other => Err(PyValueError::new_err(format!("unknown pairing `{other}`"))),
    }
}

/// Simple undirected graph on vertices `0..n`.
#[pyclass(name = "Graph", module = "qrao", frozen)]
struct PyGraph {
    inner: qrao_core::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = qrao_core::Graph::new(n_vertices, edges).map_err(to_py)?;
        Ok(PyGraph { inner })
    }

    /// Parses the edge-list format accepted by `qrao solve --graph`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyGraph { inner: parse_edge_list(text).map_err(to_py)? })
    }

    #[staticmethod]
    fn complete(n: usize) -> Self {
        PyGraph { inner: qrao_core::Graph::complete(n) }
    }

    #[staticmethod]
    fn path(n: usize) -> Self {
        PyGraph { inner: qrao_core::Graph::path(n) }
    }

    #[staticmethod]
    fn cycle(n: usize) -> Self {
        PyGraph { inner: qrao_core::Graph::cycle(n) }
    }

    #[staticmethod]
    fn star(n: usize) -> Self {
        PyGraph { inner: qrao_core::Graph::star(n) }
    }

    #[getter]
    fn n_vertices(&self) -> usize {
        self.inner.n_vertices()
    }

    #[getter]
    fn n_edges(&self) -> usize {
        self.inner.n_edges()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    fn cut_value(&self, assignment: Vec<u8>) -> PyResult<usize> {
        self.inner.cut_value(&assignment).map_err(to_py)
    }

    /// Exact maximum cut as `(value, assignment)`.
    fn maxcut(&self) -> PyResult<(usize, Vec<u8>)> {
        let s = brute_force_maxcut(&self.inner).map_err(to_py)?;
        Ok((s.cut_value, s.assignment))
    }

    fn __repr__(&self) -> String {
        format!("Graph(n_vertices={}, n_edges={})", self.inner.n_vertices(), self.inner.n_edges())
    }
}

/// Density matrix of the encoded state, row-major.
#[pyfunction]
fn encode(kind_label: &str, bits: Vec<u8>) -> PyResult<Vec<Vec<Complex64>>> {
    let e = qrao_core::qrac::encode(kind(kind_label)?, &bits).map_err(to_py)?;
    let m = e.state.matrix();
    Ok((0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect()).collect())
}

#[pyfunction]
fn success_probability(kind_label: &str) -> PyResult<f64> {
    Ok(kind(kind_label)?.success_probability())
}

/// Relaxed Hamiltonian as `(n_qubits, {pauli_label: coefficient})`; qubit 0
/// is the leftmost character.
#[pyfunction]
#[pyo3(signature = (graph, kind_label, pairing_label="index", seed=commands::DEFAULT_SEED))]
fn relaxed_hamiltonian(
    graph: &PyGraph,
    kind_label: &str,
    pairing_label: &str,
    seed: u64,
) -> PyResult<(usize, Vec<(String, f64)>)> {
    let a = assign(&graph.inner, kind(kind_label)?, pairing(pairing_label, seed)?).map_err(to_py)?;
    let h = hamiltonian::build(&graph.inner, &a).map_err(to_py)?;
    let n = h.n_qubits();
    let mut terms: Vec<(String, f64)> = h.expr.terms().map(|(w, c)| (w.to_label(n), *c)).collect();
    terms.sort_by(|x, y| x.0.cmp(&y.0));
    Ok((n, terms))
}

/// Full pipeline; returns the same text `qrao solve` prints.
#[pyfunction]
#[pyo3(signature = (
    graph,
    kind_label="31",
    rounding=None,
    shots=commands::DEFAULT_SHOTS,
    seed=commands::DEFAULT_SEED,
    pairing_label="index",
))]
fn solve(
    py: Python<'_>,
    graph: &PyGraph,
    kind_label: &str,
    rounding: Option<&str>,
    shots: usize,
    seed: u64,
    pairing_label: &str,
) -> PyResult<String> {
    let cfg = SolveConfig {
        kind: kind(kind_label)?,
        rounding: rounding.map(|r| r.parse::<RoundingMethod>()).transpose().map_err(to_py)?,
        shots,
        seed,
        pairing: pairing(pairing_label, seed)?,
    };
    let g = graph.inner.clone();
    py.detach(move || {
        let report = commands::solve_graph(&g, &cfg)?;
        commands::render_solve(&report, &cfg)
    })
    .map_err(to_py)
}

/// Exact `E[cut]/OPT` of the kind's rounding applied to the maximum eigenstate.
#[pyfunction]
fn exact_ratio(graph: &PyGraph, kind_label: &str) -> PyResult<f64> {
    let g = &graph.inner;
    let opt = brute_force_maxcut(g).map_err(to_py)?.cut_value;
    if opt == 0 {
        return Err(PyValueError::new_err("graph has no edges"));
    }
    let a = assign(g, kind(kind_label)?, PairingStrategy::Index).map_err(to_py)?;
    Ok(analysis::exact_pipeline(g, &a, opt).map_err(to_py)?.1)
}

/// Certification checks as `(name, passed, residual)` triples.
#[pyfunction]
#[pyo3(signature = (suite="all"))]
fn verify(suite: &str) -> PyResult<Vec<(String, bool, f64)>> {
    let s: Suite = suite.parse().map_err(to_py)?;
    let checks = commands::run_checks(s).map_err(to_py)?;
    Ok(checks.into_iter().map(|c| (c.name, c.passed, c.residual)).collect())
}

/// Guarantee for a kind at gain `epsilon`; `lambda` is required for Tetra.
#[pyfunction]
#[pyo3(signature = (kind_label, epsilon, lambda=None))]
fn ratio_bound(kind_label: &str, epsilon: f64, lambda: Option<f64>) -> PyResult<(f64, Option<u8>, bool)> {
    let r = analysis::ratio_bound(kind(kind_label)?, epsilon, lambda).map_err(to_py)?;
    Ok((r.nominal_ratio, r.branch, r.feasible))
}

#[pyfunction]
fn tetra_feasibility_threshold() -> f64 {
    analysis::tetra_feasibility_threshold()
}

/// `(nayak, improved, tightest)` upper bounds on a code's success probability.
#[pyfunction]
fn qrac_probability_bounds(qubits: usize, bits: usize) -> PyResult<(f64, f64, f64)> {
    let b = analysis::qrac_probability_bounds(qubits, bits).map_err(to_py)?;
    Ok((b.nayak, b.improved, b.tightest))
}

/// `(epsilon, lambda, bound, branch, feasible)`.
type SweepRow = (f64, f64, f64, u8, bool);

/// Tetra bound rows in ε-then-λ order.
#[pyfunction]
fn sweep(eps: Vec<f64>, lambdas: Vec<f64>) -> PyResult<Vec<SweepRow>> {
    let rows = region_sweep(&eps, &lambdas).map_err(to_py)?;
    Ok(rows.into_iter().map(|r| (r.epsilon, r.lambda, r.bound, r.branch, r.feasible)).collect())
}

/// Same CSV as `qrao sweep`.
#[pyfunction]
fn sweep_csv(eps: Vec<f64>, lambdas: Vec<f64>) -> PyResult<String> {
    Ok(analysis::region_csv(&region_sweep(&eps, &lambdas).map_err(to_py)?))
}

#[pymodule]
pub fn qrao(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(success_probability, m)?)?;
    m.add_function(wrap_pyfunction!(relaxed_hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(exact_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_bound, m)?)?;
    m.add_function(wrap_pyfunction!(tetra_feasibility_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(qrac_probability_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_csv, m)?)?;
    m.add("KINDS", ["11", "21", "31", "32", "tetra"])?;
    Ok(())
}
