//! Python module `tmellin`: descriptors, transforms, exact tables,
//! asymptotic expansions, inversion and the verification suites.

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use tmellin_core::transform::InversionConfig;
use tmellin_core::verify::{Suite, VerifyConfig};
use tmellin_core::{Error, FunctionSpec};

create_exception!(tmellin, DivergenceError, PyArithmeticError, "The transform integral diverges.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Divergence(_) => DivergenceError::new_err(e.to_string()),
        Error::EigenNoConvergence { .. } | Error::Evaluation { .. } | Error::FitFailure { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A catalog function built from a descriptor such as `"sin(1)"`.
#[pyclass(name = "Function", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyFunction {
    inner: FunctionSpec,
}

#[pymethods]
impl PyFunction {
    #[new]
    fn new(descriptor: &str) -> PyResult<Self> {
        Ok(PyFunction {
            inner: descriptor.parse().map_err(to_py)?,
        })
    }

    fn __call__(&self, x: f64) -> PyResult<f64> {
        self.inner.evaluate(x).map_err(to_py)
    }

    fn derivative(&self, order: u32, x: f64) -> PyResult<f64> {
        self.inner.derivative(order, x).map_err(to_py)
    }

    #[pyo3(signature = (s, tol = 1e-10))]
    fn transform(&self, s: f64, tol: f64) -> PyResult<Transform> {
        tmellin_core::twisted_mellin(&self.inner, s, tol).map(Transform::from).map_err(to_py)
    }

    fn closed_form(&self, s: f64) -> PyResult<Option<f64>> {
        tmellin_core::closed_form(&self.inner, s).map_err(to_py)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Function({:?})", self.inner.to_string())
    }
}

/// Result of a transform evaluation.
#[pyclass(frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct Transform {
    value: f64,
    error_estimate: f64,
    nodes_used: usize,
    method: &'static str,
    converged: bool,
}

impl From<tmellin_core::TransformValue> for Transform {
    fn from(v: tmellin_core::TransformValue) -> Self {
        Transform {
            value: v.value,
            error_estimate: v.error_estimate,
            nodes_used: v.nodes_used,
            method: v.method.as_str(),
            converged: v.converged,
        }
    }
}

#[pymethods]
impl Transform {
    fn __float__(&self) -> f64 {
        self.value
    }

    fn __repr__(&self) -> String {
        format!(
            "Transform(value={}, error_estimate={:e}, method={:?}, nodes_used={})",
            self.value, self.error_estimate, self.method, self.nodes_used
        )
    }
}

/// Accepts either a `Function` or its descriptor string.
#[derive(FromPyObject)]
enum FnLike {
    Function(PyFunction),
    Descriptor(String),
}

impl<'py> FromPyObject<'_, 'py> for PyFunction {
    type Error = PyErr;

    fn extract(ob: Borrowed<'_, 'py, PyAny>) -> PyResult<Self> {
        Ok(ob.cast::<PyFunction>()?.get().clone())
    }
}

impl FnLike {
    fn spec(self) -> PyResult<FunctionSpec> {
        match self {
            FnLike::Function(f) => Ok(f.inner),
            FnLike::Descriptor(d) => d.parse().map_err(to_py),
        }
    }
}

#[pyfunction]
#[pyo3(signature = (f, s, tol = 1e-10))]
fn twisted_mellin(f: FnLike, s: f64, tol: f64) -> PyResult<Transform> {
    tmellin_core::twisted_mellin(&f.spec()?, s, tol).map(Transform::from).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (f, s, alpha, tol = 1e-10))]
fn alpha_twisted(f: FnLike, s: f64, alpha: f64, tol: f64) -> PyResult<Transform> {
    tmellin_core::alpha_twisted(&f.spec()?, s, alpha, tol).map(Transform::from).map_err(to_py)
}

/// Partial sums of the expansion in `1/s` through `order`.
#[pyfunction]
fn expansion(f: FnLike, s: f64, order: u32) -> PyResult<Vec<f64>> {
    Ok(tmellin_core::expansion(&f.spec()?, s, order).map_err(to_py)?.partial_sums)
}

/// `M[f(x/N)](N s)` by quadrature.
#[pyfunction]
#[pyo3(signature = (f, s, n, tol = 1e-10))]
fn n_twisted(f: FnLike, s: f64, n: f64, tol: f64) -> PyResult<Transform> {
    tmellin_core::n_twisted(&f.spec()?, s, n, tol).map(Transform::from).map_err(to_py)
}

#[pyfunction]
fn n_expansion(f: FnLike, s: f64, n: f64, order: u32) -> PyResult<f64> {
    tmellin_core::asymptotics::n_expansion(&f.spec()?, s, n, order).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (f, x, c = 1.0, height = 40.0, steps = 4000))]
fn invert(f: FnLike, x: f64, c: f64, height: f64, steps: usize) -> PyResult<f64> {
    let config = InversionConfig { c, height, steps };
    Ok(tmellin_core::transform::invert(&f.spec()?, x, &config).map_err(to_py)?.value)
}

/// Ascending coefficients of the expansion polynomial `f_r`.
#[pyfunction]
fn f_poly(r: usize) -> PyResult<Vec<BigInt>> {
    Ok(tmellin_core::polyseq::f_poly_recurrence(r).map_err(to_py)?.coeffs().to_vec())
}

/// Unsigned Stirling numbers of the first kind `c(n, 1..n)`.
#[pyfunction]
fn stirling_row(n: usize) -> PyResult<Vec<BigInt>> {
    tmellin_core::polyseq::stirling_row(n).map_err(to_py)
}

/// Runs a suite and returns `(name, max_residual, budget, passed)` rows.
#[pyfunction]
#[pyo3(signature = (suite = "all", seed = None))]
fn verify(suite: &str, seed: Option<u64>) -> PyResult<Vec<(String, f64, f64, bool)>> {
    let suite: Suite = suite.parse().map_err(to_py)?;
    let mut config = VerifyConfig::default();
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(tmellin_core::verify::run_suite(suite, &config)
        .into_iter()
        .map(|c| (c.name, c.max_residual, c.budget, c.pass))
        .collect())
}

#[pymodule]
fn tmellin(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFunction>()?;
    m.add_class::<Transform>()?;
    m.add("DivergenceError", m.py().get_type::<DivergenceError>())?;
    m.add_function(wrap_pyfunction!(twisted_mellin, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_twisted, m)?)?;
    m.add_function(wrap_pyfunction!(expansion, m)?)?;
    m.add_function(wrap_pyfunction!(n_twisted, m)?)?;
    m.add_function(wrap_pyfunction!(n_expansion, m)?)?;
    m.add_function(wrap_pyfunction!(invert, m)?)?;
    m.add_function(wrap_pyfunction!(f_poly, m)?)?;
    m.add_function(wrap_pyfunction!(stirling_row, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
