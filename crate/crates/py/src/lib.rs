//! Python bindings. Structured results (classifications, statistics,
//! certificates) are returned as JSON strings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use stallings_core::completion::{purpose, trial_rng, Completer};
use stallings_core::graph::{based_core, core, pullback, stallings_graph, BasedGraph, GraphJson, LabeledGraph, VertexId};
use stallings_core::lifts::{exact_lift_stats, expected_lifts_leading, monte_carlo_lift_stats, LiftTarget};
use stallings_core::perm::{Perm, PermTuple};
use stallings_core::recognition::{self, DEFAULT_BUDGET};
use stallings_core::separability::{self, SearchOptions, SubgroupSpec};
use stallings_core::word::{parse_word_list, Word};
use stallings_core::Error;

fn err(e: Error) -> PyErr {
    let text = format!("{}: {e}", e.kind());
    match e {
        Error::BudgetExhausted(_) => PyRuntimeError::new_err(text),
        e if e.is_guard() => PyRuntimeError::new_err(text),
        _ => PyValueError::new_err(text),
    }
}

fn json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| err(e.into()))
}

fn words(ws: &[String], rank: usize) -> PyResult<Vec<Word>> {
    ws.iter().map(|w| Word::parse(w, rank).map_err(err)).collect()
}

/// A labeled graph over the rose, optionally based.
#[pyclass(name = "Graph", module = "stallings", frozen, from_py_object)]
#[derive(Clone)]
struct PyGraph {
    graph: LabeledGraph,
    basepoint: Option<VertexId>,
}

impl PyGraph {
    fn from_based(b: BasedGraph) -> Self {
        PyGraph { basepoint: Some(b.basepoint()), graph: b.into_graph() }
    }

    fn based(&self) -> PyResult<BasedGraph> {
        let b = self.basepoint.ok_or_else(|| PyValueError::new_err("graph has no basepoint"))?;
        BasedGraph::new(self.graph.clone(), b).map_err(err)
    }
}

#[pymethods]
impl PyGraph {
    /// Folded Stallings graph of the subgroup generated by `words`.
    #[staticmethod]
    #[pyo3(signature = (words, rank = 2))]
    fn fold(words: Vec<String>, rank: usize) -> PyResult<Self> {
        let ws = self::words(&words, rank)?;
        Ok(Self::from_based(stallings_graph(&ws, rank).map_err(err)?))
    }

    #[staticmethod]
    fn empty(rank: usize) -> Self {
        PyGraph { graph: LabeledGraph::empty(rank), basepoint: None }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let g: GraphJson = serde_json::from_str(text).map_err(|e| err(e.into()))?;
        let (graph, basepoint) = g.into_graph().map_err(err)?;
        Ok(PyGraph { graph, basepoint })
    }

    fn to_json(&self) -> PyResult<String> {
        json(&GraphJson::from_graph(&self.graph, self.basepoint))
    }

    fn core(&self) -> Self {
        PyGraph { graph: core(&self.graph), basepoint: None }
    }

    fn based_core(&self) -> PyResult<Self> {
        Ok(Self::from_based(based_core(&self.based()?)))
    }

    fn pullback(&self, other: &PyGraph) -> PyResult<Self> {
        Ok(Self::from_based(pullback(&self.based()?, &other.based()?).map_err(err)?))
    }

    #[getter]
    fn rank(&self) -> usize {
        self.graph.rank()
    }

    #[getter]
    fn basepoint(&self) -> Option<VertexId> {
        self.basepoint
    }

    fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    fn is_precover(&self) -> bool {
        self.graph.is_precover()
    }

    fn is_cover(&self) -> bool {
        self.graph.is_cover()
    }

    fn is_isomorphic(&self, other: &PyGraph) -> bool {
        self.graph.is_isomorphic(&other.graph)
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(rank={}, vertices={}, edges={}, basepoint={:?})",
            self.graph.rank(),
            self.graph.vertex_count(),
            self.graph.edge_count(),
            self.basepoint
        )
    }
}

/// A finitely generated subgroup of `F_rank`.
#[pyclass(name = "Subgroup", module = "stallings", frozen, from_py_object)]
#[derive(Clone)]
struct PySubgroup {
    spec: SubgroupSpec,
}

#[pymethods]
impl PySubgroup {
    #[new]
    #[pyo3(signature = (generators, rank = 2))]
    fn new(generators: Vec<String>, rank: usize) -> PyResult<Self> {
        Ok(PySubgroup { spec: SubgroupSpec::new(words(&generators, rank)?, rank).map_err(err)? })
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        self.spec.generators.iter().map(|w| w.to_string()).collect()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.spec.rank()
    }

    #[getter]
    fn rank_of_subgroup(&self) -> i64 {
        self.spec.rank_of_subgroup
    }

    fn based_core(&self) -> PyGraph {
        PyGraph::from_based(self.spec.based_core.clone())
    }

    fn core(&self) -> PyGraph {
        PyGraph { graph: self.spec.core.clone(), basepoint: None }
    }

    fn is_finite_index(&self) -> bool {
        self.spec.is_finite_index()
    }

    fn contains(&self, word: &str) -> PyResult<bool> {
        Ok(self.spec.contains(&Word::parse(word, self.spec.rank()).map_err(err)?))
    }

    fn is_conjugate_into(&self, other: &PySubgroup) -> bool {
        separability::is_conjugate_into(&self.spec, &other.spec)
    }

    fn index_p_subgroups(&self, p: u32) -> PyResult<Vec<PySubgroup>> {
        Ok(separability::index_p_subgroups(&self.spec, p)
            .map_err(err)?
            .into_iter()
            .map(|spec| PySubgroup { spec })
            .collect())
    }

    fn characteristic_intersection(&self, p: u32) -> PyResult<PySubgroup> {
        Ok(PySubgroup { spec: separability::characteristic_intersection(&self.spec, p).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("Subgroup({:?}, rank={})", self.generators(), self.spec.rank())
    }
}

fn tuple_from(perms: Vec<Vec<u32>>) -> PyResult<PermTuple> {
    let perms = perms
        .into_iter()
        .map(|p| Perm::from_images(p.into_iter().map(|x| x.wrapping_sub(1)).collect()).map_err(err))
        .collect::<PyResult<Vec<_>>>()?;
    PermTuple::new(perms).map_err(err)
}

fn tuple_to(t: &PermTuple) -> Vec<Vec<u32>> {
    t.perms().iter().map(|p| p.images().iter().map(|x| x + 1).collect()).collect()
}

/// One uniform completion of `condition` to degree `n`: the cover and the
/// generator images as 1-based lists.
#[pyfunction]
#[pyo3(signature = (condition, n, seed = 0, trial = 0))]
fn random_completion(condition: &PyGraph, n: usize, seed: u64, trial: u64) -> PyResult<(PyGraph, Vec<Vec<u32>>)> {
    let completer = Completer::new(&condition.graph, n).map_err(err)?;
    let t = completer.sample(&mut trial_rng(seed, purpose::COMPLETION, trial));
    Ok((PyGraph { graph: completer.cover(&t), basepoint: None }, tuple_to(&t)))
}

/// Classification of the group generated by 1-based permutations, as JSON.
#[pyfunction]
#[pyo3(signature = (perms, budget = DEFAULT_BUDGET, seed = 0))]
fn classify(perms: Vec<Vec<u32>>, budget: usize, seed: u64) -> PyResult<String> {
    let t = tuple_from(perms)?;
    json(&recognition::classify(&t, budget, &mut trial_rng(seed, purpose::RECOGNITION, 0)))
}

/// Lift statistics of `target` in completions of `condition`, as JSON.
#[pyfunction]
#[pyo3(signature = (condition, target, n, trials = 10_000, seed = 0, based = false, exact = false))]
fn lift_stats(condition: &PyGraph, target: &PyGraph, n: usize, trials: u64, seed: u64, based: bool, exact: bool) -> PyResult<String> {
    let t = if based { LiftTarget::Based(target.based()?) } else { LiftTarget::Unbased(target.graph.clone()) };
    let stats = if exact {
        exact_lift_stats(&condition.graph, &t, n)
    } else {
        monte_carlo_lift_stats(&condition.graph, &t, n, trials, seed)
    }
    .map_err(err)?;
    json(&stats)
}

/// Leading term `(coefficient, exponent)` of the expected number of lifts.
#[pyfunction]
fn expected_lifts(condition: &PyGraph, target: &PyGraph) -> PyResult<(i64, i64)> {
    let t = expected_lifts_leading(&condition.graph, &target.graph).map_err(err)?;
    Ok((t.coefficient, t.exponent))
}

fn options(seed: u64, trials: u64, symmetric_ok: bool, n_schedule: Option<Vec<usize>>) -> SearchOptions {
    SearchOptions { seed, trials, accept_symmetric: symmetric_ok, n_schedule, ..SearchOptions::default() }
}

/// Certificate (JSON) of an alternating quotient separating `elements` from `subgroup`.
#[pyfunction]
#[pyo3(signature = (subgroup, elements, seed = 0, trials = 200, symmetric_ok = false, n_schedule = None))]
fn separate_membership(
    subgroup: &PySubgroup,
    elements: Vec<String>,
    seed: u64,
    trials: u64,
    symmetric_ok: bool,
    n_schedule: Option<Vec<usize>>,
) -> PyResult<String> {
    let es = words(&elements, subgroup.spec.rank())?;
    let cert = separability::separate_membership(&subgroup.spec, &es, &options(seed, trials, symmetric_ok, n_schedule))
        .map_err(err)?;
    json(&cert)
}

/// Certificate (JSON) of an alternating quotient preserving non-conjugacy-into.
#[pyfunction]
#[pyo3(signature = (subgroups, seed = 0, trials = 200, symmetric_ok = false, primes = None, n_schedule = None))]
fn separate_conjugacy(
    subgroups: Vec<PySubgroup>,
    seed: u64,
    trials: u64,
    symmetric_ok: bool,
    primes: Option<Vec<u32>>,
    n_schedule: Option<Vec<usize>>,
) -> PyResult<String> {
    let specs: Vec<SubgroupSpec> = subgroups.into_iter().map(|s| s.spec).collect();
    let cert =
        separability::separate_conjugacy(&specs, primes.as_deref(), &options(seed, trials, symmetric_ok, n_schedule))
            .map_err(err)?;
    json(&cert)
}

/// Whether some conjugate of `<a>` lies in `<b>` in `S_m` (1-based images, `m ≤ 8`).
#[pyfunction]
fn brute_force_conjugate_into(a: Vec<Vec<u32>>, b: Vec<Vec<u32>>, m: usize) -> PyResult<bool> {
    let conv = |ps: Vec<Vec<u32>>| -> PyResult<Vec<Perm>> {
        ps.into_iter().map(|p| Perm::from_images(p.into_iter().map(|x| x.wrapping_sub(1)).collect()).map_err(err)).collect()
    };
    separability::brute_force_conjugate_into(&conv(a)?, &conv(b)?, m).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (text, rank = 2))]
fn free_reduce(text: &str, rank: usize) -> PyResult<String> {
    Ok(Word::parse(text, rank).map_err(err)?.free_reduce().to_string())
}

#[pyfunction]
#[pyo3(signature = (text, rank = 2))]
fn parse_words(text: &str, rank: usize) -> PyResult<Vec<String>> {
    Ok(parse_word_list(text, rank).map_err(err)?.iter().map(|w| w.to_string()).collect())
}

#[pymodule]
fn stallings(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PySubgroup>()?;
    m.add_function(wrap_pyfunction!(random_completion, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(lift_stats, m)?)?;
    m.add_function(wrap_pyfunction!(expected_lifts, m)?)?;
    m.add_function(wrap_pyfunction!(separate_membership, m)?)?;
    m.add_function(wrap_pyfunction!(separate_conjugacy, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_conjugate_into, m)?)?;
    m.add_function(wrap_pyfunction!(free_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(parse_words, m)?)?;
    Ok(())
}
