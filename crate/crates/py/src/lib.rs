//! Python bindings for the minimal-class CohFT engine.
//!
//! The module exposes the state space and its exact pairing and product,
//! the corrected theory attached to a formal minimal class, the two
//! topological evaluators, the axiom sweep, the deformation checker, and
//! the genus-1 dimension formulas. Exact rationals cross the boundary as
//! strings (`"p/q"`), classes as dictionaries with a unit coefficient
//! and a list of gamma terms.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use cohft_core::deformations::{check_deformation_axioms, ExplicitTable};
use cohft_core::{
    enumerate_one_edge_graphs, verify_theorem_1, BasisVector, ClassSymbol, FormalClass,
    GradingMode, SweepConfig,
};

fn value_error(err: cohft_core::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn parse_mode(mode: &str) -> PyResult<GradingMode> {
    GradingMode::parse(mode).map_err(value_error)
}

fn parse_tokens(space: &cohft_core::StateSpace, tokens: &[String]) -> PyResult<Vec<BasisVector>> {
    let refs: Vec<&str> = tokens.iter().map(|s| s.as_str()).collect();
    space.parse_insertions(&refs).map_err(value_error)
}

fn class_to_dict<'py>(py: Python<'py>, cls: &FormalClass) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item("space", (cls.space.g, cls.space.n))?;
    dict.set_item("unit", cls.unit_coeff().to_string())?;
    let gammas = PyList::empty(py);
    for (symbol, coeff) in cls.terms() {
        if let ClassSymbol::Gamma(keep) = symbol {
            let term = PyDict::new(py);
            term.set_item("coeff", coeff.to_string())?;
            term.set_item("keep", keep.clone())?;
            gammas.append(term)?;
        }
    }
    dict.set_item("gamma", gammas)?;
    Ok(dict)
}

/// The 2m+2-dimensional state space with its pairing and product.
#[pyclass(name = "StateSpace")]
struct PyStateSpace {
    inner: cohft_core::StateSpace,
}

#[pymethods]
impl PyStateSpace {
    #[new]
    #[pyo3(signature = (m, mode = "graded"))]
    fn new(m: usize, mode: &str) -> PyResult<Self> {
        Ok(PyStateSpace {
            inner: cohft_core::build_state_space(m, parse_mode(mode)?),
        })
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn basis(&self) -> Vec<String> {
        self.inner.basis().iter().map(|v| v.token()).collect()
    }

    fn parity(&self, token: &str) -> PyResult<u8> {
        let v = BasisVector::parse(token).map_err(value_error)?;
        self.inner.check_index(v).map_err(value_error)?;
        Ok(self.inner.parity(v))
    }

    fn eta(&self, x: &str, y: &str) -> PyResult<String> {
        let vx = BasisVector::parse(x).map_err(value_error)?;
        let vy = BasisVector::parse(y).map_err(value_error)?;
        Ok(self.inner.eta(vx, vy).map_err(value_error)?.to_string())
    }

    fn star<'py>(&self, py: Python<'py>, x: &str, y: &str) -> PyResult<Bound<'py, PyDict>> {
        let vx = BasisVector::parse(x).map_err(value_error)?;
        let vy = BasisVector::parse(y).map_err(value_error)?;
        let product = self.inner.star_basis(vx, vy).map_err(value_error)?;
        let dict = PyDict::new(py);
        for (v, c) in product.iter() {
            dict.set_item(v.token(), c.to_string())?;
        }
        Ok(dict)
    }

    fn handle_element<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let handle = self.inner.handle_element();
        let dict = PyDict::new(py);
        for (v, c) in handle.iter() {
            dict.set_item(v.token(), c.to_string())?;
        }
        Ok(dict)
    }

    fn bivector(&self) -> Vec<(String, String, String)> {
        self.inner
            .bivector()
            .into_iter()
            .map(|t| (t.left.token(), t.right.token(), t.coeff.to_string()))
            .collect()
    }
}

/// A formal minimal class together with its corrected theory.
#[pyclass(name = "FormalGamma")]
struct PyFormalGamma {
    omega: cohft_core::Omega,
}

#[pymethods]
impl PyFormalGamma {
    #[new]
    #[pyo3(signature = (h, m, deg, mode = "graded"))]
    fn new(h: usize, m: usize, deg: usize, mode: &str) -> PyResult<Self> {
        let gamma =
            cohft_core::FormalGamma::new(h, m, deg, parse_mode(mode)?).map_err(value_error)?;
        Ok(PyFormalGamma {
            omega: cohft_core::Omega::new(gamma),
        })
    }

    #[getter]
    fn h(&self) -> usize {
        self.omega.gamma().h()
    }

    #[getter]
    fn m(&self) -> usize {
        self.omega.gamma().m()
    }

    #[getter]
    fn deg(&self) -> usize {
        self.omega.gamma().deg()
    }

    #[getter]
    fn mode(&self) -> String {
        self.omega.gamma().mode().token().to_string()
    }

    fn is_trivial(&self) -> bool {
        self.omega.gamma().is_trivial()
    }

    /// Evaluate the corrected theory on one insertion tuple.
    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        g: usize,
        insertions: Vec<String>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let tuple = parse_tokens(self.omega.space(), &insertions)?;
        let value = self.omega.evaluate(g, &tuple).map_err(value_error)?;
        class_to_dict(py, &value)
    }

    fn takes_value(&self) -> PyResult<bool> {
        self.omega.takes_value().map_err(value_error)
    }
}

/// Sign incurred when reordering graded objects; `perm[k]` is the
/// original 1-based position drawn into slot k+1.
#[pyfunction]
fn koszul_sign(perm: Vec<usize>, parities: Vec<u8>) -> PyResult<i64> {
    cohft_core::koszul_sign(&perm, &parities).map_err(value_error)
}

/// Topological evaluation; `oracle=True` uses the gluing oracle instead
/// of the closed form.
#[pyfunction]
#[pyo3(signature = (m, g, insertions, mode = "graded", oracle = false))]
fn evaluate_topft(
    m: usize,
    g: usize,
    insertions: Vec<String>,
    mode: &str,
    oracle: bool,
) -> PyResult<String> {
    let space = cohft_core::build_state_space(m, parse_mode(mode)?);
    let tuple = parse_tokens(&space, &insertions)?;
    let value = if oracle {
        cohft_core::evaluate_topft_oracle(&space, g, &tuple)
    } else {
        cohft_core::evaluate_topft_closed(&space, g, &tuple)
    }
    .map_err(value_error)?;
    Ok(value.to_string())
}

/// Axiom sweep for a formal minimal class. Returns (passed, json_report).
#[pyfunction(name = "verify_theorem_1")]
#[pyo3(signature = (h, m, deg, mode = "graded", g_max = None, n_max = None,
                    sample_count = None, pair_budget = None, seed = None))]
#[allow(clippy::too_many_arguments)]
fn verify_theorem_1_py(
    py: Python<'_>,
    h: usize,
    m: usize,
    deg: usize,
    mode: &str,
    g_max: Option<usize>,
    n_max: Option<usize>,
    sample_count: Option<usize>,
    pair_budget: Option<usize>,
    seed: Option<u64>,
) -> PyResult<(bool, String)> {
    let gamma = cohft_core::FormalGamma::new(h, m, deg, parse_mode(mode)?).map_err(value_error)?;
    let defaults = SweepConfig::for_gamma(&gamma);
    let cfg = SweepConfig {
        g_max: g_max.unwrap_or(defaults.g_max),
        n_max: n_max.unwrap_or(defaults.n_max),
        sample_count: sample_count.unwrap_or(defaults.sample_count),
        pair_budget: pair_budget.unwrap_or(defaults.pair_budget),
        seed: seed.unwrap_or(defaults.seed),
        ..defaults
    };
    let report = py.detach(|| verify_theorem_1(&gamma, &cfg));
    Ok((report.passed(), report.to_json()))
}

/// Deformation-axiom check for a JSON table. Returns (passed, json_report).
#[pyfunction]
#[pyo3(signature = (table_json, sample_count = None, pair_budget = None, seed = None))]
fn check_deformation_json(
    py: Python<'_>,
    table_json: &str,
    sample_count: Option<usize>,
    pair_budget: Option<usize>,
    seed: Option<u64>,
) -> PyResult<(bool, String)> {
    let table = ExplicitTable::from_json(table_json).map_err(value_error)?;
    let defaults = SweepConfig::default();
    let (g_max, n_max) = cohft_core::Deformation::bounds(&table);
    let cfg = SweepConfig {
        g_max,
        n_max,
        sample_count: sample_count.unwrap_or(defaults.sample_count),
        pair_budget: pair_budget.unwrap_or(defaults.pair_budget),
        seed: seed.unwrap_or(defaults.seed),
        ..defaults
    };
    let report = py.detach(|| check_deformation_axioms(&table, &cfg));
    Ok((report.passed(), report.to_json()))
}

/// One-edge boundary graphs as display strings.
#[pyfunction]
fn one_edge_graphs(g: usize, n: usize) -> PyResult<Vec<String>> {
    Ok(enumerate_one_edge_graphs(g, n)
        .map_err(value_error)?
        .into_iter()
        .map(|graph| graph.to_string())
        .collect())
}

#[pyfunction]
fn dim_cusp_forms(k: usize) -> usize {
    cohft_core::genus1_dimensions::dim_cusp_forms(k)
}

#[pyfunction]
fn dim_grw(n: usize, k: usize) -> u64 {
    cohft_core::genus1_dimensions::dim_grw_k(n, k)
}

#[pyfunction]
fn dim_minimal(n: usize, j: usize) -> u64 {
    cohft_core::genus1_dimensions::dim_minimal(n, j)
}

#[pymodule]
fn cohft_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStateSpace>()?;
    m.add_class::<PyFormalGamma>()?;
    m.add_function(wrap_pyfunction!(koszul_sign, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_topft, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem_1_py, m)?)?;
    m.add_function(wrap_pyfunction!(check_deformation_json, m)?)?;
    m.add_function(wrap_pyfunction!(one_edge_graphs, m)?)?;
    m.add_function(wrap_pyfunction!(dim_cusp_forms, m)?)?;
    m.add_function(wrap_pyfunction!(dim_grw, m)?)?;
    m.add_function(wrap_pyfunction!(dim_minimal, m)?)?;
    Ok(())
}
