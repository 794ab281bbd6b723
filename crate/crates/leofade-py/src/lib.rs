//! Python bindings for the downlink fading model.
//!
//! The module mirrors the Rust API at the granularity a notebook wants: a
//! `Scenario` class wrapping a TOML configuration with the same calibration
//! and evaluation methods as the CLI, plus free functions for the special
//! functions and the single-state outage law so individual pieces can be
//! cross-checked against SciPy/mpmath directly.
//!
//! Build: `cargo build --release -p leofade-py`, then copy the produced
//! `libleofade_py.so` next to your script as `leofade.so` (see the
//! repository README).

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use leofade::error::Error;
use leofade::experiments::config::ScenarioConfig;
use leofade::experiments::scenario::Scenario as CoreScenario;
use leofade::fading::{AngularPath, FadingSampler};
use leofade::montecarlo::mc_outage_stream;
use leofade::outage::{outage_coupled, OutageQuery};
use leofade::{outage, specfun};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Config(_) | Error::Validation(_) => PyValueError::new_err(e.to_string()),
        Error::Numeric(_) => PyRuntimeError::new_err(e.to_string()),
        Error::Io(_) => PyIOError::new_err(e.to_string()),
    }
}

/// A configured downlink scenario.
///
/// Construct with `Scenario()` for the bundled reference configuration,
/// `Scenario.from_toml(text)`, or `Scenario.from_file(path)`. Angles are
/// degrees at this boundary, mirroring the CLI.
#[pyclass(unsendable, name = "Scenario")]
struct PyScenario {
    inner: CoreScenario,
}

impl PyScenario {
    fn wrap(cfg: ScenarioConfig) -> Self {
        PyScenario {
            inner: CoreScenario::new(cfg),
        }
    }
}

#[pymethods]
impl PyScenario {
    #[new]
    fn new() -> PyResult<Self> {
        let (cfg, _) = ScenarioConfig::load(None).map_err(to_py_err)?;
        Ok(Self::wrap(cfg))
    }

    /// Build a scenario from TOML text.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(Self::wrap(ScenarioConfig::parse(text).map_err(to_py_err)?))
    }

    /// Build a scenario from a TOML file.
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let (cfg, _) = ScenarioConfig::load(Some(path.as_ref())).map_err(to_py_err)?;
        Ok(Self::wrap(cfg))
    }

    /// Configured case names, sorted.
    fn case_names(&self) -> Vec<String> {
        self.inner.config.cases.keys().cloned().collect()
    }

    /// Operating residual correction factor from the configuration.
    #[getter]
    fn eta_tt(&self) -> f64 {
        self.inner.config.eta_tt
    }

    /// State-averaged (sigma_a2, beta_rms2) of a case at an elevation.
    fn case_average_stats(&self, case: &str, elevation_deg: f64) -> PyResult<(f64, f64)> {
        let states = self.inner.config.case(case).map_err(to_py_err)?;
        let avg = self
            .inner
            .case_average_stats(states, elevation_deg.to_radians())
            .map_err(to_py_err)?;
        Ok((avg.sigma_a2, avg.beta_rms2))
    }

    /// Per-state (m, q) parameter pairs of a case at an elevation.
    fn case_params(&self, case: &str, elevation_deg: f64, eta_tt: f64) -> PyResult<Vec<(f64, f64)>> {
        let states = self.inner.config.case(case).map_err(to_py_err)?;
        let params = self
            .inner
            .case_params(states, elevation_deg.to_radians(), eta_tt)
            .map_err(to_py_err)?;
        Ok(params.iter().map(|p| (p.m, p.q)).collect())
    }

    /// Calibrate the detection threshold; returns a dict with `nu_ref`,
    /// `p_th_w`, and `achieved_outage`.
    fn calibrate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let cal = self.inner.calibrate().map_err(to_py_err)?;
        let out = PyDict::new(py);
        out.set_item("nu_ref", cal.nu_ref)?;
        out.set_item("p_th_w", cal.p_th)?;
        out.set_item("achieved_outage", cal.achieved)?;
        Ok(out)
    }

    /// Normalized threshold at an elevation for a threshold power in watts.
    fn nu_at(&self, p_th_w: f64, elevation_deg: f64) -> PyResult<f64> {
        self.inner.nu_at(p_th_w, elevation_deg.to_radians()).map_err(to_py_err)
    }

    /// Coupled mixture outage of a case.
    fn coupled_outage(&self, case: &str, elevation_deg: f64, eta_tt: f64, nu: f64) -> PyResult<f64> {
        let states = self.inner.config.case(case).map_err(to_py_err)?;
        self.inner
            .coupled_outage(states, elevation_deg.to_radians(), eta_tt, nu)
            .map_err(to_py_err)
    }

    /// Baseline (independence) outage under the configured baseline mode.
    fn baseline_outage(&self, elevation_deg: f64, eta_tt: f64, nu: f64) -> PyResult<f64> {
        self.inner
            .baseline_outage(elevation_deg.to_radians(), eta_tt, nu)
            .map_err(to_py_err)
    }

    /// Monte Carlo outage estimate of a case; returns (estimate, stderr).
    #[pyo3(signature = (case, elevation_deg, nu, n, seed, stream = 0))]
    fn mc_outage(
        &self,
        case: &str,
        elevation_deg: f64,
        nu: f64,
        n: u64,
        seed: u64,
        stream: u64,
    ) -> PyResult<(f64, f64)> {
        let states = self.inner.config.case(case).map_err(to_py_err)?;
        let params = self
            .inner
            .case_params(states, elevation_deg.to_radians(), self.inner.config.eta_tt)
            .map_err(to_py_err)?;
        let r = mc_outage_stream(states, &params, nu, n, seed, stream).map_err(to_py_err)?;
        Ok((r.estimate, r.stderr))
    }

    /// Draw joint (h_a, h_p) fading samples from a case's mixture.
    #[pyo3(signature = (case, elevation_deg, n, seed, stream = 0))]
    fn sample(
        &self,
        case: &str,
        elevation_deg: f64,
        n: usize,
        seed: u64,
        stream: u64,
    ) -> PyResult<Vec<(f64, f64)>> {
        let states = self.inner.config.case(case).map_err(to_py_err)?;
        let params = self
            .inner
            .case_params(states, elevation_deg.to_radians(), self.inner.config.eta_tt)
            .map_err(to_py_err)?;
        let mut sampler =
            FadingSampler::with_stream(states, &params, seed, stream, AngularPath::InverseCdf)
                .map_err(to_py_err)?;
        Ok((0..n).map(|_| sampler.draw()).collect())
    }
}

/// Regularized lower incomplete gamma P(a, x).
#[pyfunction]
fn reg_lower_gamma(a: f64, x: f64) -> PyResult<f64> {
    specfun::reg_lower_gamma(a, x).map_err(to_py_err)
}

/// Extended upper incomplete gamma Γ(a, x), valid for a ≤ 0 as well.
#[pyfunction]
fn upper_gamma_ext(a: f64, x: f64) -> PyResult<f64> {
    specfun::upper_gamma_ext(a, x).map_err(to_py_err)
}

/// Natural log of the gamma function.
#[pyfunction]
fn ln_gamma(x: f64) -> f64 {
    specfun::ln_gamma(x)
}

/// Closed-form single-state outage probability.
#[pyfunction]
fn outage_closed(m: f64, q: f64, nu: f64) -> PyResult<f64> {
    outage::outage_state_closed(m, q, nu).map_err(to_py_err)
}

/// Quadrature route for the single-state outage probability.
#[pyfunction]
fn outage_numeric(m: f64, q: f64, nu: f64) -> PyResult<f64> {
    outage::outage_state_numeric(m, q, nu).map_err(to_py_err)
}

/// Mixture outage from explicit state probabilities and (m, q) pairs.
#[pyfunction]
fn outage_mixture(probs: Vec<f64>, params: Vec<(f64, f64)>, nu: f64) -> PyResult<f64> {
    let params = params
        .into_iter()
        .map(|(m, q)| leofade::fading::FadingParams { m, q })
        .collect();
    outage_coupled(&OutageQuery { nu, params, probs }).map_err(to_py_err)
}

#[pymodule]
#[pyo3(name = "leofade")]
fn leofade_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(reg_lower_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(upper_gamma_ext, m)?)?;
    m.add_function(wrap_pyfunction!(ln_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(outage_closed, m)?)?;
    m.add_function(wrap_pyfunction!(outage_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(outage_mixture, m)?)?;
    Ok(())
}
