//! Python module `lqcc`.

use lqcc_core::concentrate::{solve_weighted, Weights};
use lqcc_core::lp::{LpProblem, Relation};
use lqcc_core::{
    AmplitudeMatrix, ConcentrationPlan, DiagonalPovm, FeasibilityReport, LpStatus, SchmidtSpectrum,
    TargetEnsemble,
};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_error(e: lqcc_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Ordered squared Schmidt coefficients.
#[pyclass(name = "Spectrum", module = "lqcc", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PySpectrum {
    inner: SchmidtSpectrum,
}

#[pymethods]
impl PySpectrum {
    /// Sorts, drops zeros and renormalizes.
    #[new]
    fn new(coeffs: Vec<f64>) -> PyResult<Self> {
        let inner = SchmidtSpectrum::new(&coeffs).map_err(value_error)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn uniform(levels: usize) -> PyResult<Self> {
        if levels == 0 {
            return Err(PyValueError::new_err("levels must be positive"));
        }
        Ok(Self {
            inner: SchmidtSpectrum::uniform(levels),
        })
    }

    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.inner.coeffs().to_vec()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    /// Entanglement entropy, `units` is "nats" or "bits".
    #[pyo3(signature = (units = "nats"))]
    fn entropy(&self, units: &str) -> PyResult<f64> {
        let e = lqcc_core::entropy(&self.inner);
        match units {
            "nats" => Ok(e.nats()),
            "bits" => Ok(e.bits()),
            other => Err(PyValueError::new_err(format!("unknown units {other:?}"))),
        }
    }

    /// Tail sums `E_1..E_n`.
    fn monotones(&self) -> Vec<f64> {
        lqcc_core::vidal_monotones(&self.inner).values().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.rank()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Spectrum({:?})", self.inner.coeffs())
    }
}

#[pyclass(name = "FeasibilityReport", module = "lqcc", frozen, get_all)]
pub struct PyFeasibilityReport {
    feasible: bool,
    /// One-based indices of violated inequalities.
    violated_indices: Vec<usize>,
    slack: Vec<f64>,
}

#[pymethods]
impl PyFeasibilityReport {
    fn __bool__(&self) -> bool {
        self.feasible
    }

    fn __repr__(&self) -> String {
        format!(
            "FeasibilityReport(feasible={}, violated_indices={:?})",
            self.feasible, self.violated_indices
        )
    }
}

impl From<FeasibilityReport> for PyFeasibilityReport {
    fn from(r: FeasibilityReport) -> Self {
        Self {
            feasible: r.feasible,
            violated_indices: r.violated_indices,
            slack: r.slack,
        }
    }
}

#[pyclass(name = "Plan", module = "lqcc", frozen, get_all)]
pub struct PyPlan {
    /// `p[j-1]` is the probability of ending in `|phi_j>`.
    p: Vec<f64>,
    expected_nats: f64,
}

impl From<ConcentrationPlan> for PyPlan {
    fn from(plan: ConcentrationPlan) -> Self {
        Self {
            p: plan.probabilities,
            expected_nats: plan.expected_entanglement,
        }
    }
}

#[pymethods]
impl PyPlan {
    fn __repr__(&self) -> String {
        format!("Plan(p={:?}, expected_nats={})", self.p, self.expected_nats)
    }
}

/// Diagonal local measurement in the Schmidt basis.
#[pyclass(name = "Povm", module = "lqcc", frozen)]
pub struct PyPovm {
    inner: DiagonalPovm,
}

#[pymethods]
impl PyPovm {
    #[new]
    fn new(elements: Vec<(usize, Vec<f64>)>) -> PyResult<Self> {
        let support = elements.iter().map(|(_, d)| d.len()).max().unwrap_or(0);
        let elements = elements
            .into_iter()
            .map(|(label, diag)| lqcc_core::PovmElement { label, diag })
            .collect();
        let inner = DiagonalPovm::new(elements, support).map_err(value_error)?;
        Ok(Self { inner })
    }

    /// `(label, diagonal)` pairs.
    #[getter]
    fn elements(&self) -> Vec<(usize, Vec<f64>)> {
        self.inner
            .elements
            .iter()
            .map(|e| (e.label, e.diag.clone()))
            .collect()
    }

    fn completeness_residual(&self) -> f64 {
        self.inner.completeness_residual()
    }

    fn outcome_probabilities(&self, state: &PySpectrum) -> Vec<f64> {
        self.inner.outcome_probabilities(&state.inner)
    }

    /// Probability and post-measurement spectrum of element `index` (0-based).
    fn apply(&self, index: usize, state: &PySpectrum) -> PyResult<(f64, Option<PySpectrum>)> {
        let element = self
            .inner
            .elements
            .get(index)
            .ok_or_else(|| PyValueError::new_err("element index out of range"))?;
        let (p, post) =
            lqcc_core::apply_povm_element(&element.diag, &state.inner).map_err(value_error)?;
        Ok((p, post.map(|inner| PySpectrum { inner })))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

fn ensemble(entries: Vec<(f64, PyRef<'_, PySpectrum>)>) -> PyResult<TargetEnsemble> {
    TargetEnsemble::new(
        entries
            .into_iter()
            .map(|(p, s)| (p, s.inner.clone()))
            .collect(),
    )
    .map_err(value_error)
}

/// Schmidt spectrum of a state given by its amplitude matrix.
#[pyfunction]
#[pyo3(signature = (amplitudes, zero_tol = lqcc_core::ZERO_TOL))]
fn decompose(amplitudes: Vec<Vec<Complex64>>, zero_tol: f64) -> PyResult<PySpectrum> {
    let m = AmplitudeMatrix::from_rows(&amplitudes).map_err(value_error)?;
    let inner = lqcc_core::schmidt_decompose(&m, zero_tol).map_err(value_error)?;
    Ok(PySpectrum { inner })
}

#[pyfunction]
fn nielsen_feasible(source: &PySpectrum, target: &PySpectrum) -> PyFeasibilityReport {
    lqcc_core::nielsen_feasible(&source.inner, &target.inner).into()
}

/// `targets` is a list of `(probability, Spectrum)` pairs.
#[pyfunction]
fn ensemble_feasible(
    source: &PySpectrum,
    targets: Vec<(f64, PyRef<'_, PySpectrum>)>,
) -> PyResult<PyFeasibilityReport> {
    let e = ensemble(targets)?;
    Ok(lqcc_core::ensemble_feasible(&source.inner, &e).into())
}

#[pyfunction]
fn max_conversion_probability(source: &PySpectrum, target: &PySpectrum) -> f64 {
    lqcc_core::max_conversion_probability(&source.inner, &target.inner)
}

#[pyfunction]
fn average_target(targets: Vec<(f64, PyRef<'_, PySpectrum>)>) -> PyResult<PySpectrum> {
    let e = ensemble(targets)?;
    Ok(PySpectrum {
        inner: lqcc_core::average_target(&e),
    })
}

/// Measurement on the average target that yields each target with its
/// probability.
#[pyfunction]
fn ensemble_povm(targets: Vec<(f64, PyRef<'_, PySpectrum>)>) -> PyResult<PyPovm> {
    let e = ensemble(targets)?;
    Ok(PyPovm {
        inner: lqcc_core::build_theorem1_povm(&e),
    })
}

#[pyfunction]
fn optimal_plan(state: &PySpectrum) -> PyPlan {
    lqcc_core::optimal_plan(&state.inner).into()
}

#[pyfunction]
fn single_shot_povm(state: &PySpectrum) -> PyPovm {
    PyPovm {
        inner: lqcc_core::single_shot_povm(&state.inner),
    }
}

/// `(z_1..z_levels, passed)`.
#[pyfunction]
fn certificate(levels: usize) -> (Vec<f64>, bool) {
    let c = lqcc_core::optimality_certificate(levels);
    (c.z_values, c.passed)
}

/// Concentration LP with `weights` "ln", "log2", "indicator" or a list.
/// Returns `(p, objective)`.
#[pyfunction]
fn solve_concentration(
    state: &PySpectrum,
    weights: &Bound<'_, PyAny>,
) -> PyResult<(Vec<f64>, f64)> {
    let weights = if let Ok(name) = weights.extract::<String>() {
        match name.as_str() {
            "ln" => Weights::Ln,
            "log2" => Weights::Log2,
            "indicator" => Weights::Indicator,
            other => return Err(PyValueError::new_err(format!("unknown weights {other:?}"))),
        }
    } else {
        Weights::Custom(weights.extract()?)
    };
    let w = solve_weighted(&state.inner, &weights).map_err(value_error)?;
    Ok((w.plan.probabilities, w.objective))
}

/// Maximizes `objective.x` subject to `matrix x (rel) bounds`, `x >= 0`.
/// `relations` entries are "le", "ge" or "eq" (default all "le").
#[pyfunction]
#[pyo3(signature = (objective, matrix, bounds, relations = None))]
fn simplex<'py>(
    py: Python<'py>,
    objective: Vec<f64>,
    matrix: Vec<Vec<f64>>,
    bounds: Vec<f64>,
    relations: Option<Vec<String>>,
) -> PyResult<Bound<'py, PyDict>> {
    let relations = match relations {
        Some(r) => r
            .iter()
            .map(|s| match s.as_str() {
                "le" | "<=" => Ok(Relation::Le),
                "ge" | ">=" => Ok(Relation::Ge),
                "eq" | "=" => Ok(Relation::Eq),
                other => Err(PyValueError::new_err(format!("unknown relation {other:?}"))),
            })
            .collect::<PyResult<Vec<_>>>()?,
        None => vec![Relation::Le; matrix.len()],
    };
    let lp =
        LpProblem::with_relations(objective, matrix, bounds, relations).map_err(value_error)?;
    let sol = lqcc_core::simplex_solve(&lp);
    let out = PyDict::new(py);
    let status = match sol.status {
        LpStatus::Optimal => "optimal",
        LpStatus::Unbounded => "unbounded",
        LpStatus::Infeasible => "infeasible",
    };
    out.set_item("status", status)?;
    if sol.is_optimal() {
        out.set_item("verified", lqcc_core::verify_solution(&lp, &sol, 1e-9))?;
        out.set_item("values", sol.values)?;
        out.set_item("objective_value", sol.objective_value)?;
        out.set_item("basis", sol.basis)?;
        out.set_item("duals", sol.duals)?;
    }
    Ok(out)
}

/// Monte Carlo run of `povm` (default: the single-shot concentration
/// measurement) on `state`.
#[pyfunction]
#[pyo3(signature = (state, trials, seed, povm = None))]
fn simulate<'py>(
    py: Python<'py>,
    state: &PySpectrum,
    trials: u64,
    seed: u64,
    povm: Option<&PyPovm>,
) -> PyResult<Bound<'py, PyDict>> {
    let single_shot;
    let povm = match povm {
        Some(p) => &p.inner,
        None => {
            single_shot = lqcc_core::single_shot_povm(&state.inner);
            &single_shot
        }
    };
    let report = py
        .detach(|| lqcc_core::simulate(povm, &state.inner, trials, seed))
        .map_err(value_error)?;
    let (mean, stderr) = lqcc_core::yield_statistics(&report);
    let out = PyDict::new(py);
    out.set_item("trials", report.trials)?;
    out.set_item("seed", report.seed)?;
    out.set_item("labels", &report.labels)?;
    out.set_item("counts", &report.counts)?;
    out.set_item("empirical_probs", &report.empirical_probs)?;
    out.set_item("expected_probs", &report.expected_probs)?;
    out.set_item("max_abs_deviation", report.max_abs_deviation)?;
    out.set_item("mean_yield", mean)?;
    out.set_item("yield_stderr", stderr)?;
    Ok(out)
}

/// Per-copy optimal yield for `1..=max_copies` copies, in nats.
#[pyfunction]
fn yield_curve(
    py: Python<'_>,
    state: &PySpectrum,
    max_copies: usize,
) -> PyResult<Vec<(usize, f64)>> {
    py.detach(|| lqcc_core::asymptotic_yield_curve(&state.inner, max_copies))
        .map_err(|e| match e {
            lqcc_core::Error::SizeCapExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
            other => value_error(other),
        })
}

#[pymodule]
pub fn lqcc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpectrum>()?;
    m.add_class::<PyFeasibilityReport>()?;
    m.add_class::<PyPlan>()?;
    m.add_class::<PyPovm>()?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(nielsen_feasible, m)?)?;
    m.add_function(wrap_pyfunction!(ensemble_feasible, m)?)?;
    m.add_function(wrap_pyfunction!(max_conversion_probability, m)?)?;
    m.add_function(wrap_pyfunction!(average_target, m)?)?;
    m.add_function(wrap_pyfunction!(ensemble_povm, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_plan, m)?)?;
    m.add_function(wrap_pyfunction!(single_shot_povm, m)?)?;
    m.add_function(wrap_pyfunction!(certificate, m)?)?;
    m.add_function(wrap_pyfunction!(solve_concentration, m)?)?;
    m.add_function(wrap_pyfunction!(simplex, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(yield_curve, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
