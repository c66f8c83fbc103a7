//! Python bindings. Structured results cross the boundary as JSON text and
//! come back to Python as plain dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use weakfs::examples::{ExampleConfig, Family};
use weakfs::sampling::SampleSet;
use weakfs::structure::{self, LocalSamples};
use weakfs::suite::{self, RunConfig, SuiteConfig};

fn py_err(e: weakfs::Error) -> PyErr {
    match e {
        weakfs::Error::Config(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = suite::to_json(v).map_err(py_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn locals(family: &str, n: usize, s: usize, beta: f64, samples: usize, seed: u64) -> weakfs::Result<LocalSamples> {
    let cfg = ExampleConfig { family: Family::parse(family)?, n, s, beta, bounds: None };
    cfg.validate()?;
    let st = cfg.build()?;
    LocalSamples::new(&st, &SampleSet::generate(&st.chart, samples, seed)?)
}

/// Runs a suite from a flat JSON config and returns the report as JSON text,
/// byte-identical to the CLI `suite` output.
#[pyfunction]
fn run_suite_json(config: &str) -> PyResult<String> {
    let cfg = SuiteConfig::from_json(config).map_err(py_err)?;
    let doc = suite::run_suite(&cfg.example, &cfg.run).map_err(py_err)?;
    suite::to_json(&doc).map_err(py_err)
}

/// Runs a suite and returns the report as a dict.
#[pyfunction]
fn run_suite<'py>(py: Python<'py>, config: &str) -> PyResult<Bound<'py, PyAny>> {
    let text = run_suite_json(config)?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyfunction]
#[pyo3(signature = (family="paper_R2ns", n=1, s=1, beta=1.0, samples=20, seed=0))]
fn validate<'py>(
    py: Python<'py>,
    family: &str,
    n: usize,
    s: usize,
    beta: f64,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let ls = locals(family, n, s, beta, samples, seed).map_err(py_err)?;
    to_py(py, &structure::validate_local(&ls).map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (family="paper_R2ns", n=1, s=1, beta=1.0, samples=20, seed=0))]
fn classify<'py>(
    py: Python<'py>,
    family: &str,
    n: usize,
    s: usize,
    beta: f64,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let ls = locals(family, n, s, beta, samples, seed).map_err(py_err)?;
    to_py(py, &structure::classify(&ls))
}

#[pyfunction]
#[pyo3(signature = (family="paper_R2ns", n=1, s=1, beta=1.0, samples=20, seed=0))]
fn nullity_fit<'py>(
    py: Python<'py>,
    family: &str,
    n: usize,
    s: usize,
    beta: f64,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let ls = locals(family, n, s, beta, samples, seed).map_err(py_err)?;
    to_py(py, &weakfs::checks::nullity_fit(&ls).map_err(py_err)?)
}

#[pyfunction]
fn check_names() -> Vec<&'static str> {
    weakfs::checks::group_names()
}

/// Default run settings as a dict, handy as a starting point for configs.
#[pyfunction]
fn default_run<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &RunConfig::default())
}

#[pymodule]
fn weakfs_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", suite::VERSION)?;
    m.add_function(wrap_pyfunction!(run_suite_json, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(nullity_fit, m)?)?;
    m.add_function(wrap_pyfunction!(check_names, m)?)?;
    m.add_function(wrap_pyfunction!(default_run, m)?)?;
    Ok(())
}
