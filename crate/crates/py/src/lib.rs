//! Python bindings for `coarse-bell`.
//!
//! Configurations are wrapped as classes; scenario results and oracle
//! reports come back as plain dicts.

use coarse_bell::scenario::{self, SweepSpec};
use coarse_bell::{BellVariant, Error, QuadratureSpec, Side};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError};
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(coarse_bell_py, CoarseBellError, PyException, "Base class for coarse-bell errors.");
create_exception!(coarse_bell_py, UsageError, CoarseBellError);
create_exception!(coarse_bell_py, ContractError, CoarseBellError);
create_exception!(coarse_bell_py, UnsupportedModelError, CoarseBellError);
create_exception!(coarse_bell_py, DomainError, CoarseBellError);
create_exception!(coarse_bell_py, NumericError, CoarseBellError);
create_exception!(coarse_bell_py, ConfigError, CoarseBellError);

fn to_py_err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Usage(_) => UsageError::new_err(msg),
        Error::Contract(_) => ContractError::new_err(msg),
        Error::UnsupportedModel(_) => UnsupportedModelError::new_err(msg),
        Error::Domain(_) => DomainError::new_err(msg),
        Error::Numeric { .. } => NumericError::new_err(msg),
        Error::Config(_) => ConfigError::new_err(msg),
        Error::Io { .. } => PyOSError::new_err(msg),
    }
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for coarse_bell::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py_err)
    }
}

/// Serialize through JSON into native Python containers.
fn to_python<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| CoarseBellError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "FuzzinessModel", module = "coarse_bell_py", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyFuzzinessModel(coarse_bell::FuzzinessModel);

#[pymethods]
impl PyFuzzinessModel {
    #[staticmethod]
    fn frequency(delta_w: f64) -> PyResult<Self> {
        let m = coarse_bell::FuzzinessModel::frequency(delta_w);
        m.validate().py_err()?;
        Ok(Self(m))
    }

    #[staticmethod]
    fn timing(delta_t: f64) -> PyResult<Self> {
        let m = coarse_bell::FuzzinessModel::timing(delta_t);
        m.validate().py_err()?;
        Ok(Self(m))
    }

    #[staticmethod]
    fn joint(delta_w: f64, delta_t: f64) -> PyResult<Self> {
        let m = coarse_bell::FuzzinessModel::Joint { delta_w, delta_t };
        m.validate().py_err()?;
        Ok(Self(m))
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.name()
    }

    #[getter]
    fn delta_w(&self) -> Option<f64> {
        self.0.delta_w()
    }

    #[getter]
    fn delta_t(&self) -> Option<f64> {
        self.0.delta_t()
    }

    fn __repr__(&self) -> String {
        format!("FuzzinessModel({:?})", self.0)
    }
}

#[pyclass(name = "BellConfig", module = "coarse_bell_py", from_py_object)]
#[derive(Clone)]
struct PyBellConfig(coarse_bell::BellConfig);

#[pymethods]
impl PyBellConfig {
    /// Symmetric per-setting configuration; `angles` is `(a, a', b, b')`.
    #[new]
    #[pyo3(signature = (angles, model, w0, steps = 1))]
    fn new(angles: [f64; 4], model: PyFuzzinessModel, w0: f64, steps: u32) -> PyResult<Self> {
        let mut c = coarse_bell::BellConfig::symmetric(angles, model.0, w0);
        c.steps_a = steps;
        c.steps_b = steps;
        c.validate().py_err()?;
        Ok(Self(c))
    }

    /// Per-term variant with the 8 term-ordered spreads given directly.
    #[staticmethod]
    fn per_term(angles: [f64; 4], sigmas: [f64; 8]) -> PyResult<Self> {
        let mut c = coarse_bell::BellConfig::symmetric(angles, coarse_bell::FuzzinessModel::frequency(0.0), 1.0);
        c.variant = BellVariant::PerTerm;
        c.per_term_overrides = Some(sigmas);
        c.validate().py_err()?;
        Ok(Self(c))
    }

    #[getter]
    fn angles(&self) -> [f64; 4] {
        [self.0.theta_a, self.0.theta_a_prime, self.0.theta_b, self.0.theta_b_prime]
    }

    #[getter]
    fn w0(&self) -> (f64, f64) {
        (self.0.w0_a, self.0.w0_b)
    }

    #[getter]
    fn models(&self) -> (PyFuzzinessModel, PyFuzzinessModel) {
        (PyFuzzinessModel(self.0.model_a), PyFuzzinessModel(self.0.model_b))
    }

    #[getter]
    fn steps(&self) -> (u32, u32) {
        (self.0.steps_a, self.0.steps_b)
    }

    #[getter]
    fn variant(&self) -> &'static str {
        match self.0.variant {
            BellVariant::PerSetting => "per_setting",
            BellVariant::PerTerm => "per_term",
        }
    }

    /// Copy with both sides' frequency spread replaced.
    fn with_delta_w(&self, delta_w: f64) -> Self {
        Self(coarse_bell::bell::with_delta_w(&self.0, delta_w))
    }

    /// Copy with both sides' timing spread replaced.
    fn with_delta_t(&self, delta_t: f64) -> Self {
        Self(coarse_bell::bell::with_delta_t(&self.0, delta_t))
    }

    fn __repr__(&self) -> String {
        format!("BellConfig({:?})", self.0)
    }
}

#[pyclass(name = "BellBreakdown", module = "coarse_bell_py", frozen, get_all)]
struct PyBellBreakdown {
    e1: f64,
    e2: f64,
    e3: f64,
    e4: f64,
    b: f64,
    abs_b: f64,
}

impl From<coarse_bell::BellBreakdown> for PyBellBreakdown {
    fn from(r: coarse_bell::BellBreakdown) -> Self {
        Self {
            e1: r.e1,
            e2: r.e2,
            e3: r.e3,
            e4: r.e4,
            b: r.b,
            abs_b: r.abs_b,
        }
    }
}

#[pymethods]
impl PyBellBreakdown {
    fn terms(&self) -> [f64; 4] {
        [self.e1, self.e2, self.e3, self.e4]
    }

    fn __repr__(&self) -> String {
        format!(
            "BellBreakdown(e1={}, e2={}, e3={}, e4={}, b={}, abs_b={})",
            self.e1, self.e2, self.e3, self.e4, self.b, self.abs_b
        )
    }
}

#[pyclass(name = "NoiseSpec", module = "coarse_bell_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyNoiseSpec(coarse_bell::NoiseSpec);

#[pymethods]
impl PyNoiseSpec {
    /// `noisy_sides` holds "a" and/or "b".
    #[new]
    #[pyo3(signature = (gamma, noisy_sides = vec!["a".to_string()]))]
    fn new(gamma: f64, noisy_sides: Vec<String>) -> PyResult<Self> {
        let sides = noisy_sides
            .iter()
            .map(|s| match s.to_ascii_lowercase().as_str() {
                "a" => Ok(Side::A),
                "b" => Ok(Side::B),
                other => Err(UsageError::new_err(format!("unknown side {other:?}, expected \"a\" or \"b\""))),
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Self(coarse_bell::NoiseSpec::new(gamma, sides).py_err()?))
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma
    }

    #[getter]
    fn noisy_sides(&self) -> Vec<&'static str> {
        self.0
            .noisy_sides
            .iter()
            .map(|s| match s {
                Side::A => "a",
                Side::B => "b",
            })
            .collect()
    }
}

/// `E = -exp(-2(σa² + σb²)) cos 2(θa + θb)`.
#[pyfunction]
fn coarsened_correlation(theta_a: f64, theta_b: f64, sigma_a: f64, sigma_b: f64) -> f64 {
    coarse_bell::coarsened_correlation(theta_a, theta_b, sigma_a, sigma_b)
}

#[pyfunction]
fn bell_value(config: PyRef<'_, PyBellConfig>) -> PyResult<PyBellBreakdown> {
    let c = &config.0;
    let r = match c.variant {
        BellVariant::PerSetting => coarse_bell::bell_value(c),
        BellVariant::PerTerm => coarse_bell::bell_value_per_term(c),
    };
    Ok(r.py_err()?.into())
}

#[pyfunction]
fn bell_derivative_dw(config: PyRef<'_, PyBellConfig>) -> PyResult<f64> {
    coarse_bell::bell_derivative_dw(&config.0).py_err()
}

#[pyfunction]
#[pyo3(signature = (config, noise, nodes = 64))]
fn decohered_bell(config: PyRef<'_, PyBellConfig>, noise: PyRef<'_, PyNoiseSpec>, nodes: usize) -> PyResult<PyBellBreakdown> {
    let quad = QuadratureSpec::GaussHermite { nodes };
    Ok(coarse_bell::decohered_bell(&config.0, &noise.0, &quad).py_err()?.into())
}

/// Spread of the realized angle after `steps` sequential rotations.
#[pyfunction]
#[pyo3(signature = (theta, w0, model, steps = 1))]
fn effective_sigma(theta: f64, w0: f64, model: PyFuzzinessModel, steps: u32) -> PyResult<f64> {
    let s = coarse_bell::MeasurementSetting::new(theta, w0, steps, model.0).py_err()?;
    coarse_bell::effective_sigma(&s).py_err()
}

/// Joint frequency/timing angle density; returns `(value, error_estimate)`.
#[pyfunction]
#[pyo3(signature = (theta, w0, t0, delta_w, delta_t, epsilon = coarse_bell::coarsening::DEFAULT_POLE_EXCLUSION))]
fn joint_angle_density(theta: f64, w0: f64, t0: f64, delta_w: f64, delta_t: f64, epsilon: f64) -> PyResult<(f64, f64)> {
    let d = coarse_bell::JointDensity::new(w0, t0, delta_w, delta_t).py_err()?.with_epsilon(epsilon).py_err()?;
    let r = d.density(theta, &QuadratureSpec::adaptive_simpson()).py_err()?;
    Ok((r.value, r.error_estimate))
}

#[pyfunction]
fn list_scenarios(py: Python<'_>) -> PyResult<Vec<Bound<'_, PyAny>>> {
    scenario::list_scenarios()
        .iter()
        .map(|s| {
            let d = pyo3::types::PyDict::new(py);
            d.set_item("id", s.id)?;
            d.set_item("description", s.description)?;
            d.set_item("parameters", s.parameters)?;
            Ok(d.into_any())
        })
        .collect()
}

fn resolve(scenario_id: Option<&str>, config_toml: Option<&str>, overrides: &[String]) -> PyResult<SweepSpec> {
    let mut spec = match (scenario_id, config_toml) {
        (Some(id), None) => scenario::preset(id).py_err()?,
        (None, Some(text)) => scenario::parse_spec(text).py_err()?,
        _ => return Err(UsageError::new_err("give exactly one of scenario or config_toml")),
    };
    for o in overrides {
        spec = scenario::apply_override(&spec, o).py_err()?;
    }
    Ok(spec)
}

/// Resolved preset as TOML text, suitable for editing and passing back.
#[pyfunction]
fn preset_toml(scenario: &str) -> PyResult<String> {
    scenario::spec_to_toml(&scenario::preset(scenario).py_err()?).py_err()
}

/// Run a preset or a TOML spec; returns `{"rows": ..., "metadata": ...}`.
#[pyfunction]
#[pyo3(signature = (scenario = None, *, config_toml = None, overrides = Vec::new(), threads = None))]
fn run_scenario<'py>(
    py: Python<'py>,
    scenario: Option<&str>,
    config_toml: Option<&str>,
    overrides: Vec<String>,
    threads: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = resolve(scenario, config_toml, &overrides)?;
    let result = py
        .detach(|| match threads {
            Some(n) => scenario::run_scenario_with_threads(&spec, n),
            None => scenario::run_scenario(&spec),
        })
        .py_err()?;
    to_python(py, &result)
}

/// CSV text exactly as the CLI writes it.
#[pyfunction]
#[pyo3(signature = (scenario = None, *, config_toml = None, overrides = Vec::new()))]
fn scenario_csv(py: Python<'_>, scenario: Option<&str>, config_toml: Option<&str>, overrides: Vec<String>) -> PyResult<String> {
    let spec = resolve(scenario, config_toml, &overrides)?;
    let result = py.detach(|| scenario::run_scenario(&spec)).py_err()?;
    Ok(scenario::csv_body(&result))
}

/// Monte Carlo oracle comparison; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (scenario = None, *, config_toml = None, overrides = Vec::new(), samples = 100_000, seed = 0))]
fn oracle_check<'py>(
    py: Python<'py>,
    scenario: Option<&str>,
    config_toml: Option<&str>,
    overrides: Vec<String>,
    samples: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = resolve(scenario, config_toml, &overrides)?;
    let report = py.detach(|| scenario::run_oracle_check(&spec, samples, seed)).py_err()?;
    to_python(py, &report)
}

#[pymodule]
fn coarse_bell_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("CoarseBellError", py.get_type::<CoarseBellError>())?;
    m.add("UsageError", py.get_type::<UsageError>())?;
    m.add("ContractError", py.get_type::<ContractError>())?;
    m.add("UnsupportedModelError", py.get_type::<UnsupportedModelError>())?;
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("NumericError", py.get_type::<NumericError>())?;
    m.add("ConfigError", py.get_type::<ConfigError>())?;
    m.add_class::<PyFuzzinessModel>()?;
    m.add_class::<PyBellConfig>()?;
    m.add_class::<PyBellBreakdown>()?;
    m.add_class::<PyNoiseSpec>()?;
    m.add_function(wrap_pyfunction!(coarsened_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(bell_value, m)?)?;
    m.add_function(wrap_pyfunction!(bell_derivative_dw, m)?)?;
    m.add_function(wrap_pyfunction!(decohered_bell, m)?)?;
    m.add_function(wrap_pyfunction!(effective_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(joint_angle_density, m)?)?;
    m.add_function(wrap_pyfunction!(list_scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(preset_toml, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(scenario_csv, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_check, m)?)?;
    Ok(())
}
