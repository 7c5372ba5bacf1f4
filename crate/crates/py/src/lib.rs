//! Python bindings: parameter validation, model functions and the JSON
//! check runner, mirroring the command-line interface.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use wricci::{solve_model, validate_range, ExtendedN, KappaProfile};

fn parse_big_n(v: &Bound<'_, PyAny>) -> PyResult<ExtendedN> {
    if let Ok(s) = v.extract::<String>() {
        if s == "inf" {
            return Ok(ExtendedN::Infinity);
        }
        return Err(PyValueError::new_err(format!(
            "N must be a number or \"inf\", got {s:?}"
        )));
    }
    Ok(ExtendedN::Finite(v.extract::<f64>()?))
}

/// Validate (n, N, eps) and return the derived constants as a dict.
#[pyfunction]
fn validate_parameters(
    py: Python<'_>,
    n: u32,
    big_n: &Bound<'_, PyAny>,
    eps: f64,
) -> PyResult<PyObject> {
    let params = validate_range(n, parse_big_n(big_n)?, eps)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let d = pyo3::types::PyDict::new_bound(py);
    d.set_item("n", params.n)?;
    d.set_item("eps", params.eps)?;
    d.set_item("eps0", params.eps0)?;
    d.set_item("c", params.c)?;
    d.set_item("beta", params.beta())?;
    d.set_item("requires_zero_v", params.requires_zero_v)?;
    Ok(d.into())
}

/// Comparison model functions for a constant curvature bound.
#[pyclass]
struct ModelFunctions {
    inner: wricci::ModelFunctions,
}

#[pymethods]
impl ModelFunctions {
    #[new]
    #[pyo3(signature = (kappa, c, domain_max=None))]
    fn new(kappa: f64, c: f64, domain_max: Option<f64>) -> PyResult<Self> {
        let profile = KappaProfile::constant(kappa);
        let dm = domain_max
            .unwrap_or_else(|| wricci::model_functions::default_domain_max(&profile, 20.0));
        let inner = solve_model(profile, c, dm).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(ModelFunctions { inner })
    }

    /// First positive zero of the model solution, or None.
    fn cut_value(&self) -> Option<f64> {
        self.inner.cut_value()
    }

    fn s_kappa(&self, s: f64) -> f64 {
        self.inner.s_kappa(s)
    }

    fn cot_kappa(&self, s: f64) -> PyResult<f64> {
        self.inner
            .cot_kappa(s)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn h_kappa(&self, s: f64) -> PyResult<f64> {
        self.inner
            .h_kappa(s)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn model_volume(&self, r: f64) -> PyResult<f64> {
        self.inner
            .model_volume(r)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

/// Run the configured checks on a JSON configuration string and return the
/// report as a JSON string. Equivalent to `wricci check`.
#[pyfunction]
fn run_checks(config_json: &str) -> PyResult<String> {
    let cfg: wricci::config::RunConfig =
        serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let report = wricci::config::run(&cfg).map_err(|e| PyValueError::new_err(e.to_string()))?;
    serde_json::to_string_pretty(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn _wricci(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(validate_parameters, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    m.add_class::<ModelFunctions>()?;
    Ok(())
}
