//! Python bindings: the `entdex` extension module.

use num_complex::Complex64;
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use entdex_core::classify::{self as cls, Ensemble, EnsemblePayload, EnsembleTerm};
use entdex_core::construct::{self, DressedProductSpec};
use entdex_core::partitions::{self, IntegerPartition, SetPartition};
use entdex_core::statecore::{self, QubitSet, DEFAULT_TOL};
use entdex_core::verify::{self, Basis, Property};
use entdex_core::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::QubitOutOfRange { .. } => PyIndexError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn qubit_set(members: Vec<usize>) -> PyResult<QubitSet> {
    QubitSet::new(members).map_err(to_py)
}

fn shape(parts: Vec<usize>) -> PyResult<IntegerPartition> {
    IntegerPartition::from_parts(parts).map_err(to_py)
}

/// Normalized N-qubit pure state; qubit 0 is the most significant bit.
#[pyclass(name = "PureState", module = "entdex", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPureState {
    inner: statecore::PureState,
}

#[pymethods]
impl PyPureState {
    #[new]
    #[pyo3(signature = (n_qubits, amplitudes, normalize = false))]
    fn new(n_qubits: usize, amplitudes: Vec<Complex64>, normalize: bool) -> PyResult<Self> {
        let inner = if normalize {
            statecore::PureState::normalized(n_qubits, amplitudes)
        } else {
            statecore::PureState::new(n_qubits, amplitudes)
        };
        inner.map(|inner| Self { inner }).map_err(to_py)
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    fn norm_sqr(&self) -> f64 {
        self.inner.norm_sqr()
    }

    fn marginal_purity(&self, keep: Vec<usize>) -> PyResult<f64> {
        statecore::marginal_purity(&self.inner, &qubit_set(keep)?).map_err(to_py)
    }

    /// Reduced density matrix on `keep` as a row-major list of rows.
    fn reduced_density(&self, keep: Vec<usize>) -> PyResult<Vec<Vec<Complex64>>> {
        let rho = statecore::reduced_density(&self.inner, &qubit_set(keep)?).map_err(to_py)?;
        Ok(rho.entries().chunks(rho.dim()).map(<[_]>::to_vec).collect())
    }

    fn tensor(&self, other: &PyPureState) -> PyResult<PyPureState> {
        statecore::tensor(&self.inner, &other.inner)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    fn permute(&self, perm: Vec<usize>) -> PyResult<PyPureState> {
        statecore::permute_qubits(&self.inner, &perm)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    /// Applies a seeded random single-qubit unitary to every qubit.
    fn dress(&self, seed: u64) -> PyResult<PyPureState> {
        let u = construct::seeded_local_unitary(self.inner.n_qubits(), seed);
        statecore::apply_local_unitary(&self.inner, &u)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.dim()
    }

    fn __repr__(&self) -> String {
        format!("PureState(n_qubits={})", self.inner.n_qubits())
    }
}

/// Outcome of classifying a pure state.
#[pyclass(name = "ClassReport", module = "entdex", frozen, get_all)]
struct PyClassReport {
    blocks: Vec<Vec<usize>>,
    shape: Vec<usize>,
    p: usize,
    index: usize,
    label: String,
    tolerance_used: f64,
    warnings: Vec<String>,
}

#[pymethods]
impl PyClassReport {
    fn __repr__(&self) -> String {
        format!(
            "ClassReport(shape={:?}, index={}, label={:?})",
            self.shape, self.index, self.label
        )
    }
}

impl From<cls::ClassReport> for PyClassReport {
    fn from(r: cls::ClassReport) -> Self {
        Self {
            p: r.blocks.len(),
            blocks: r.blocks.to_vecs(),
            shape: r.shape.parts().to_vec(),
            index: r.index.get(),
            label: r.label,
            tolerance_used: r.tolerance_used,
            warnings: r.warnings,
        }
    }
}

#[pyfunction]
fn ghz(n: usize) -> PyResult<PyPureState> {
    construct::ghz(n)
        .map(|inner| PyPureState { inner })
        .map_err(to_py)
}

#[pyfunction]
fn basis_state(bits: Vec<u8>) -> PyResult<PyPureState> {
    construct::basis_state(&bits)
        .map(|inner| PyPureState { inner })
        .map_err(to_py)
}

#[pyfunction]
fn enumerate_partitions(n: usize) -> PyResult<Vec<Vec<usize>>> {
    Ok(partitions::enumerate_partitions(n)
        .map_err(to_py)?
        .iter()
        .map(|p| p.parts().to_vec())
        .collect())
}

#[pyfunction]
fn partition_count(n: usize) -> PyResult<u64> {
    partitions::partition_count(n).map_err(to_py)
}

#[pyfunction]
fn index_of(parts: Vec<usize>) -> PyResult<usize> {
    Ok(partitions::index_of(&shape(parts)?).get())
}

#[pyfunction]
fn class_spectrum(n: usize) -> PyResult<Vec<usize>> {
    Ok(partitions::class_spectrum(n)
        .map_err(to_py)?
        .into_iter()
        .map(|e| e.get())
        .collect())
}

/// Builds a product of GHZ blocks; returns `(state, blocks)`.
#[pyfunction]
#[pyo3(signature = (parts, assignment = None, lu_seed = None, perm = None))]
fn ghz_product(
    parts: Vec<usize>,
    assignment: Option<Vec<Vec<usize>>>,
    lu_seed: Option<u64>,
    perm: Option<Vec<usize>>,
) -> PyResult<(PyPureState, Vec<Vec<usize>>)> {
    let shape = shape(parts)?;
    let n = shape.total();
    let mut spec = DressedProductSpec::new(shape);
    if let Some(blocks) = assignment {
        let blocks = blocks
            .into_iter()
            .map(qubit_set)
            .collect::<PyResult<Vec<_>>>()?;
        spec = spec.with_assignment(SetPartition::new(n, blocks).map_err(to_py)?);
    }
    if let Some(seed) = lu_seed {
        spec = spec.with_lu_seed(seed);
    }
    if let Some(p) = perm {
        spec = spec.with_perm(p);
    }
    let product = construct::ghz_product(&spec).map_err(to_py)?;
    Ok((
        PyPureState {
            inner: product.state,
        },
        product.blocks.to_vecs(),
    ))
}

#[pyfunction]
#[pyo3(signature = (state, tol = DEFAULT_TOL))]
fn classify(state: &PyPureState, tol: f64) -> PyResult<PyClassReport> {
    cls::classify(&state.inner, tol)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (state, tol = DEFAULT_TOL))]
fn entanglement_index(state: &PyPureState, tol: f64) -> PyResult<usize> {
    cls::entanglement_index(&state.inner, tol)
        .map(|e| e.get())
        .map_err(to_py)
}

/// `terms` is a list of `(probability, payload)` where the payload is either
/// a partition (list of block sizes) or a `PureState`.
#[pyfunction]
#[pyo3(signature = (n_qubits, terms, tol = DEFAULT_TOL))]
fn ensemble_index(n_qubits: usize, terms: Vec<(f64, Bound<'_, PyAny>)>, tol: f64) -> PyResult<f64> {
    let terms = terms
        .into_iter()
        .map(|(probability, payload)| {
            let payload = if let Ok(s) = payload.cast::<PyPureState>() {
                EnsemblePayload::State(s.get().inner.clone())
            } else {
                EnsemblePayload::Partition(shape(payload.extract()?)?)
            };
            Ok(EnsembleTerm {
                probability,
                payload,
            })
        })
        .collect::<PyResult<Vec<_>>>()?;
    let ensemble = Ensemble::new(n_qubits, terms).map_err(to_py)?;
    cls::ensemble_index(&ensemble, tol).map_err(to_py)
}

fn basis(raw: &str) -> PyResult<Basis> {
    raw.parse().map_err(to_py)
}

/// Projective measurement of one qubit; returns `(outcome, probability, post_state)` triples.
#[pyfunction]
#[pyo3(signature = (state, qubit, basis = "Z"))]
fn measure_qubit(
    state: &PyPureState,
    qubit: usize,
    basis: &str,
) -> PyResult<Vec<(u8, f64, PyPureState)>> {
    Ok(
        verify::measure_qubit(&state.inner, qubit, self::basis(basis)?)
            .map_err(to_py)?
            .into_iter()
            .map(|o| {
                (
                    o.outcome,
                    o.probability,
                    PyPureState {
                        inner: o.post_state,
                    },
                )
            })
            .collect(),
    )
}

#[pyfunction]
#[pyo3(signature = (state, qubit, basis = "Z", tol = DEFAULT_TOL))]
fn expected_index_after(state: &PyPureState, qubit: usize, basis: &str, tol: f64) -> PyResult<f64> {
    verify::expected_index_after(&state.inner, qubit, self::basis(basis)?, tol).map_err(to_py)
}

#[pyfunction]
fn run_property_suite<'py>(
    py: Python<'py>,
    property: u8,
    max_n: usize,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let property = Property::try_from(property).map_err(to_py)?;
    let r = verify::run_property_suite(property, max_n, trials, seed).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("property_id", r.property_id)?;
    d.set_item("name", r.name)?;
    d.set_item("max_n", r.max_n)?;
    d.set_item("trials", r.trials)?;
    d.set_item("seed", r.seed)?;
    d.set_item("cases_run", r.cases_run)?;
    d.set_item("failures", PyList::new(py, &r.failures)?)?;
    d.set_item("max_deviation", r.max_deviation)?;
    d.set_item("passed", r.passed())?;
    Ok(d)
}

/// `(m, ghz_index, predicted)`
type GhzEprRow = (usize, usize, usize);

/// Returns `(epr_index, rows, ok)`.
#[pyfunction]
#[pyo3(signature = (max_m, tol = DEFAULT_TOL))]
fn ghz_epr_arithmetic(max_m: usize, tol: f64) -> PyResult<(usize, Vec<GhzEprRow>, bool)> {
    let r = verify::ghz_epr_arithmetic(max_m, tol).map_err(to_py)?;
    let rows = r
        .rows
        .iter()
        .map(|row| (row.m, row.ghz_index, row.predicted))
        .collect();
    Ok((r.epr_index, rows, r.ok))
}

#[pymodule]
fn entdex(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPureState>()?;
    m.add_class::<PyClassReport>()?;
    m.add_function(wrap_pyfunction!(ghz, m)?)?;
    m.add_function(wrap_pyfunction!(basis_state, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(partition_count, m)?)?;
    m.add_function(wrap_pyfunction!(index_of, m)?)?;
    m.add_function(wrap_pyfunction!(class_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(ghz_product, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(entanglement_index, m)?)?;
    m.add_function(wrap_pyfunction!(ensemble_index, m)?)?;
    m.add_function(wrap_pyfunction!(measure_qubit, m)?)?;
    m.add_function(wrap_pyfunction!(expected_index_after, m)?)?;
    m.add_function(wrap_pyfunction!(run_property_suite, m)?)?;
    m.add_function(wrap_pyfunction!(ghz_epr_arithmetic, m)?)?;
    m.add("DEFAULT_TOL", DEFAULT_TOL)?;
    Ok(())
}
