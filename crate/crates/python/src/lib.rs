use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyList;

use spinchain::analysis::{antiresonance_labels, classify_bands, two_exc_localized_predictions};
use spinchain::analytic::{self, LocalizedStatePrediction};
use spinchain::cli::{run_figure as run_figure_config, two_exc_labels, RunConfig};
use spinchain::eigen::{self, basis_state};
use spinchain::experiments::{self, ExperimentResult, Fig4Config};
use spinchain::output::Cell;
use spinchain::quantization::{RootSet, RootSolver, RootSource, DEFAULT_TOL_IM};
use spinchain::{Boundary, Error, SiteTuple};

create_exception!(spinchain_py, NumericalError, PyRuntimeError, "A solver failed to converge or returned an inconsistent result.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        e if e.exit_code() == 3 => NumericalError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn boundary(name: &str) -> PyResult<Boundary> {
    match name {
        "open" => Ok(Boundary::Open),
        "closed" => Ok(Boundary::Closed),
        other => Err(PyValueError::new_err(format!("boundary must be 'open' or 'closed', got {other:?}"))),
    }
}

fn tuple(sites: &[usize]) -> PyResult<SiteTuple> {
    SiteTuple::from_sites(sites)
        .ok_or_else(|| PyValueError::new_err(format!("{sites:?} is not a valid one- or two-site state")))
}

#[pyclass(name = "ChainSpec", module = "spinchain_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyChainSpec(spinchain::ChainSpec);

#[pymethods]
impl PyChainSpec {
    #[new]
    #[pyo3(signature = (n_sites, boundary, *, j=1.0, delta=0.0, eps=None, g=0.0, n0=1))]
    fn new(
        n_sites: usize,
        boundary: &str,
        j: f64,
        delta: f64,
        eps: Option<f64>,
        g: f64,
        n0: usize,
    ) -> PyResult<Self> {
        let b = self::boundary(boundary)?;
        spinchain::ChainSpec::new(n_sites, b, j, delta, eps.unwrap_or(j * delta), g, n0)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        spinchain::ChainSpec::from_json(text).map(Self).map_err(to_py)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(to_py)
    }

    fn with_g(&self, g: f64) -> PyResult<Self> {
        self.0.with_g(g).map(Self).map_err(to_py)
    }

    #[getter]
    fn n_sites(&self) -> usize {
        self.0.n_sites()
    }

    #[getter]
    fn boundary(&self) -> String {
        self.0.boundary().to_string()
    }

    #[getter]
    fn j(&self) -> f64 {
        self.0.j()
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.0.delta()
    }

    #[getter]
    fn eps(&self) -> f64 {
        self.0.eps()
    }

    #[getter]
    fn g(&self) -> f64 {
        self.0.g()
    }

    #[getter]
    fn n0(&self) -> usize {
        self.0.n0()
    }

    fn __repr__(&self) -> String {
        let s = &self.0;
        format!(
            "ChainSpec(n_sites={}, boundary='{}', j={}, delta={}, eps={}, g={}, n0={})",
            s.n_sites(),
            s.boundary(),
            s.j(),
            s.delta(),
            s.eps(),
            s.g(),
            s.n0()
        )
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

#[pyclass(name = "Root", module = "spinchain_py", frozen, get_all)]
struct PyRoot {
    theta: Complex64,
    z: Complex64,
    classification: String,
    source: String,
    energy: f64,
    residual: f64,
}

#[pyclass(name = "Prediction", module = "spinchain_py", frozen, get_all)]
struct PyPrediction {
    kind: String,
    exists: bool,
    energy: Option<f64>,
    theta: Option<Complex64>,
}

impl From<LocalizedStatePrediction> for PyPrediction {
    fn from(p: LocalizedStatePrediction) -> Self {
        Self {
            kind: format!("{:?}", p.kind),
            exists: p.exists,
            energy: p.energy,
            theta: p.theta,
        }
    }
}

#[pymethods]
impl PyPrediction {
    fn __repr__(&self) -> String {
        let exists = if self.exists { "True" } else { "False" };
        match self.energy {
            Some(e) => format!("Prediction(kind='{}', exists={exists}, energy={e})", self.kind),
            None => format!("Prediction(kind='{}', exists={exists}, energy=None)", self.kind),
        }
    }
}

fn roots_of(set: RootSet, include_spurious: bool) -> Vec<PyRoot> {
    let spurious = if include_spurious { set.spurious } else { Vec::new() };
    set.roots
        .into_iter()
        .chain(spurious)
        .map(|r| PyRoot {
            theta: r.theta,
            z: r.z,
            classification: format!("{:?}", r.classification).to_lowercase(),
            source: r.source.to_string(),
            energy: r.energy,
            residual: r.residual,
        })
        .collect()
}

/// Sector Hamiltonian with the all-down energy removed, as (states, rows, E0).
#[pyfunction]
#[pyo3(signature = (spec, excitations=1))]
fn hamiltonian(spec: &PyChainSpec, excitations: usize) -> PyResult<(Vec<Vec<usize>>, Vec<Vec<f64>>, f64)> {
    let h = spinchain::chain::build_hamiltonian(&spec.0, excitations).map_err(to_py)?;
    let states = h.basis.states().iter().map(SiteTuple::sites).collect();
    let rows = (0..h.dim()).map(|i| h.entries.row(i).to_vec()).collect();
    Ok((states, rows, h.ground_energy))
}

#[pyfunction]
#[pyo3(signature = (spec, excitations=1))]
fn spectrum(spec: &PyChainSpec, excitations: usize) -> PyResult<Vec<f64>> {
    let h = spinchain::chain::build_hamiltonian(&spec.0, excitations).map_err(to_py)?;
    eigen::eigvalsh(&h.entries).map_err(to_py)
}

/// Eigenvalues with their band or localized-state labels in the two-excitation sector.
#[pyfunction]
fn band_assignment(spec: &PyChainSpec) -> PyResult<Vec<(f64, String)>> {
    let h = spinchain::chain::build_hamiltonian(&spec.0, 2).map_err(to_py)?;
    let values = eigen::eigvalsh(&h.entries).map_err(to_py)?;
    let labels = two_exc_labels(&classify_bands(&values, &spec.0), values.len());
    Ok(values.into_iter().zip(labels).collect())
}

#[pyfunction]
#[pyo3(signature = (spec, source=None, tol_im=DEFAULT_TOL_IM, include_spurious=false))]
fn roots(spec: &PyChainSpec, source: Option<&str>, tol_im: f64, include_spurious: bool) -> PyResult<Vec<PyRoot>> {
    if !(tol_im > 0.0) {
        return Err(PyValueError::new_err("tol_im must be positive"));
    }
    let solver = RootSolver::new(tol_im);
    let source = match source {
        None => match spec.0.boundary() {
            Boundary::Open => RootSource::OpenChain,
            Boundary::Closed => RootSource::ClosedChain,
        },
        Some(s) => serde_json::from_value(serde_json::Value::String(s.into()))
            .map_err(|_| PyValueError::new_err(format!("unknown root source {s:?}")))?,
    };
    let set = match source {
        RootSource::OpenChain => solver.open_chain(&spec.0),
        RootSource::ClosedNode | RootSource::ClosedChain => solver.closed_chain(&spec.0),
        RootSource::BoundPairSurface => solver.bp_surface(&spec.0),
        RootSource::Hybrid => solver.hybrid(&spec.0),
    }
    .map_err(to_py)?;
    Ok(roots_of(set, include_spurious))
}

/// Closed-form localized states that apply to this chain, one-excitation first.
#[pyfunction]
fn predictions(spec: &PyChainSpec) -> Vec<PyPrediction> {
    let s = &spec.0;
    let mut out = vec![analytic::defect_state(s).into()];
    if s.boundary() == Boundary::Open {
        out.push(analytic::surface_state(s).into());
    }
    out.extend(two_exc_localized_predictions(s).into_iter().map(|(p, _)| p.into()));
    out
}

/// (θ_k, E_k) of the pairs bound on the defect in a ring.
#[pyfunction]
fn ldp_band(spec: &PyChainSpec) -> Vec<(f64, f64)> {
    analytic::ldp_band(&spec.0)
}

#[pyclass(name = "Trace", module = "spinchain_py", frozen, get_all)]
struct PyTrace {
    times: Vec<f64>,
    labels: Vec<Vec<usize>>,
    observables: Vec<Vec<f64>>,
    norm: Vec<f64>,
    energy: Vec<f64>,
}

/// Propagates a basis state and samples |a(label)|², the norm and ⟨H⟩.
#[pyfunction]
#[pyo3(signature = (spec, initial, times, labels=None))]
fn evolve(
    spec: &PyChainSpec,
    initial: Vec<usize>,
    times: Vec<f64>,
    labels: Option<Vec<Vec<usize>>>,
) -> PyResult<PyTrace> {
    let start = tuple(&initial)?;
    let labels: Vec<SiteTuple> = match labels {
        Some(l) => l.iter().map(|s| tuple(s)).collect::<PyResult<_>>()?,
        None => vec![start],
    };
    let decomp = spinchain::chain::build_hamiltonian(&spec.0, initial.len())
        .and_then(|h| eigen::eigh(&h))
        .map_err(to_py)?;
    let psi0 = basis_state(&decomp.basis, start).map_err(to_py)?;
    let t = eigen::evolve(&decomp, &psi0, &times, &labels).map_err(to_py)?;
    Ok(PyTrace {
        times: t.times,
        labels: t.labels.iter().map(SiteTuple::sites).collect(),
        observables: t.observables,
        norm: t.norm,
        energy: t.energy,
    })
}

#[pyfunction]
fn pair_labels(spec: &PyChainSpec) -> Vec<Vec<usize>> {
    antiresonance_labels(&spec.0).iter().map(SiteTuple::sites).collect()
}

/// Pair dynamics at one defect strength: (leak_bp, leak_ldp, period).
#[pyfunction]
#[pyo3(signature = (g, n_sites=10, delta=10.0, t_max=200.0, samples=2001))]
fn antiresonance(g: f64, n_sites: usize, delta: f64, t_max: f64, samples: usize) -> PyResult<(f64, f64, Option<f64>)> {
    let cfg = Fig4Config {
        n_sites,
        delta,
        n0: n_sites / 2,
        t_max,
        samples,
        ..Default::default()
    };
    let run = experiments::fig4_run(&cfg, g).map_err(to_py)?;
    Ok((run.metric.leak_bp, run.metric.leak_ldp, run.period))
}

#[pyclass(name = "Experiment", module = "spinchain_py", frozen)]
struct PyExperiment(ExperimentResult);

fn cell(py: Python<'_>, c: &Cell) -> PyResult<Py<PyAny>> {
    Ok(match c {
        Cell::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Cell::Int(i) => i.into_pyobject(py)?.into_any().unbind(),
        Cell::Float(x) => x.into_pyobject(py)?.into_any().unbind(),
        Cell::Text(s) => s.into_pyobject(py)?.into_any().unbind(),
        Cell::Empty => py.None(),
    })
}

#[pymethods]
impl PyExperiment {
    #[getter]
    fn id(&self) -> &'static str {
        self.0.id.as_str()
    }

    #[getter]
    fn columns(&self) -> Vec<String> {
        self.0.table.columns.clone()
    }

    #[getter]
    fn records<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let rows = self
            .0
            .table
            .records
            .iter()
            .map(|r| {
                let cells = r.iter().map(|c| cell(py, c)).collect::<PyResult<Vec<_>>>()?;
                PyList::new(py, cells)
            })
            .collect::<PyResult<Vec<_>>>()?;
        PyList::new(py, rows)
    }

    fn to_csv(&self) -> PyResult<String> {
        self.0.table.to_csv().map_err(to_py)
    }

    /// Sidecar metadata as a JSON string.
    fn metadata(&self) -> PyResult<String> {
        self.0.sidecar_json().map_err(to_py)
    }

    fn write(&self, dir: PathBuf) -> PyResult<(PathBuf, PathBuf)> {
        self.0.write(&dir).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.0.table.len()
    }
}

/// Runs a figure pipeline; `params` is a JSON object of overrides.
#[pyfunction]
#[pyo3(signature = (id, params=None, tol_im=None))]
fn run_figure(py: Python<'_>, id: &str, params: Option<&str>, tol_im: Option<f64>) -> PyResult<PyExperiment> {
    let params = params
        .map(serde_json::from_str)
        .transpose()
        .map_err(|e| PyValueError::new_err(format!("invalid params: {e}")))?;
    let cfg = RunConfig {
        id: Some(id.to_string()),
        params,
        ..Default::default()
    };
    py.detach(|| run_figure_config(&cfg, tol_im))
        .map(PyExperiment)
        .map_err(to_py)
}

#[pyfunction]
fn figure_ids() -> Vec<&'static str> {
    experiments::ExperimentId::ALL.iter().map(|i| i.as_str()).collect()
}

#[pymodule]
pub fn spinchain_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChainSpec>()?;
    m.add_class::<PyRoot>()?;
    m.add_class::<PyPrediction>()?;
    m.add_class::<PyTrace>()?;
    m.add_class::<PyExperiment>()?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add("__version__", experiments::CODE_VERSION)?;
    m.add_function(wrap_pyfunction!(hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(band_assignment, m)?)?;
    m.add_function(wrap_pyfunction!(roots, m)?)?;
    m.add_function(wrap_pyfunction!(predictions, m)?)?;
    m.add_function(wrap_pyfunction!(ldp_band, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(pair_labels, m)?)?;
    m.add_function(wrap_pyfunction!(antiresonance, m)?)?;
    m.add_function(wrap_pyfunction!(run_figure, m)?)?;
    m.add_function(wrap_pyfunction!(figure_ids, m)?)?;
    Ok(())
}
