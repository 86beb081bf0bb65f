//! Python bindings. Inputs and outputs are JSON strings in the formats the
//! command-line tool reads and writes.

pub mod api;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: spherical_descent::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Names of the built-in fixtures.
#[pyfunction]
fn fixtures() -> Vec<String> {
    api::fixture_names()
}

/// A built-in fixture as JSON with keys `datum`, `action` and `fan`.
#[pyfunction]
fn fixture(name: &str) -> PyResult<String> {
    api::fixture(name).map_err(py_err)
}

#[pyfunction]
fn validate(datum: &str) -> PyResult<String> {
    api::validate(datum).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (datum, action=None))]
fn analyze(datum: &str, action: Option<&str>) -> PyResult<String> {
    api::analyze(datum, action).map_err(py_err)
}

/// Raises `ValueError` when the verdict does not guarantee a model.
#[pyfunction]
#[pyo3(signature = (datum, action=None))]
fn count(datum: &str, action: Option<&str>) -> PyResult<u64> {
    api::count(datum, action).map_err(py_err)
}

#[pyfunction]
fn lift_cover(problem: &str) -> PyResult<String> {
    api::lift_cover(problem).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (datum, fan, action=None))]
fn check_fan(datum: &str, fan: &str, action: Option<&str>) -> PyResult<String> {
    api::check_fan(datum, fan, action).map_err(py_err)
}

#[pymodule]
fn pyspherical(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(fixtures, m)?)?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(lift_cover, m)?)?;
    m.add_function(wrap_pyfunction!(check_fan, m)?)?;
    Ok(())
}
