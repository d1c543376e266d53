//! Python bindings: the Haar shrinkage primitives, the ARROWS forecaster, the
//! tuned baselines, trend generators and the experiment harness.

use arrows_core::baselines::{self, MaConfig, OgdConfig};
use arrows_core::evaluation;
use arrows_core::haar;
use arrows_core::harness::{self, ExperimentConfig};
use arrows_core::policy::{self, ArrowsConfig};
use arrows_core::sequences::{Generator, NoiseSpec};
use arrows_core::{Error, ForecastRun, Forecaster};
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::ProtocolViolation(_) | Error::HorizonExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn run_dict<'py>(py: Python<'py>, run: ForecastRun) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("predictions", run.predictions)?;
    d.set_item("restarts", run.restarts)?;
    d.set_item("num_bins", run.num_bins)?;
    Ok(d)
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| py_err(e.into()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_config(config_json: &str) -> PyResult<ExperimentConfig> {
    serde_json::from_str(config_json).map_err(|e| py_err(e.into()))
}

/// Orthonormal Haar coefficients of a power-of-two length vector.
#[pyfunction]
fn haar_transform(values: Vec<f64>) -> PyResult<Vec<f64>> {
    haar::haar_forward_slice(&values).map(|c| c.into_vec()).map_err(py_err)
}

/// Subtracts the mean and zero-pads to the next power of two; returns `(values, mean)`.
#[pyfunction]
fn pad_and_recenter(values: Vec<f64>) -> PyResult<(Vec<f64>, f64)> {
    let p = haar::pad_and_recenter(&values).map_err(py_err)?;
    Ok((p.values().to_vec(), p.mean()))
}

#[pyfunction]
fn soft_threshold(coefficients: Vec<f64>, lam: f64) -> PyResult<Vec<f64>> {
    let c = haar::HaarCoefficients::from_vec(coefficients).map_err(py_err)?;
    haar::soft_threshold(&c, lam).map(|c| c.into_vec()).map_err(py_err)
}

/// Level-weighted l1 energy of already shrunk coefficients.
#[pyfunction]
fn restart_statistic(shrunk: Vec<f64>) -> PyResult<f64> {
    let c = haar::HaarCoefficients::from_vec(shrunk).map_err(py_err)?;
    Ok(haar::restart_statistic(&c))
}

#[pyfunction]
fn estimate_sigma_mad(observations: Vec<f64>) -> PyResult<f64> {
    haar::estimate_sigma_mad(&observations).map_err(py_err)
}

/// Online forecaster over a fixed horizon `n`.
///
/// Call `predict()` and `observe(y)` alternately, or `run(ys)` once on a fresh instance.
#[pyclass(name = "ArrowsForecaster")]
struct PyArrows {
    inner: policy::ArrowsForecaster,
}

#[pymethods]
impl PyArrows {
    #[new]
    #[pyo3(signature = (n, sigma, delta = policy::DEFAULT_DELTA, beta = None))]
    fn new(n: usize, sigma: f64, delta: f64, beta: Option<f64>) -> PyResult<Self> {
        let mut config = ArrowsConfig::new(n, sigma).and_then(|c| c.with_delta(delta)).map_err(py_err)?;
        if let Some(beta) = beta {
            config = config.with_beta(beta).map_err(py_err)?;
        }
        let inner = policy::ArrowsForecaster::new(config).map_err(py_err)?;
        Ok(Self { inner })
    }

    fn predict(&mut self) -> PyResult<f64> {
        self.inner.predict().map_err(py_err)
    }

    /// Feeds the observation for the current step; returns whether a restart fired.
    fn observe(&mut self, y: f64) -> PyResult<bool> {
        self.inner.observe(y).map_err(py_err)
    }

    fn run<'py>(&mut self, py: Python<'py>, ys: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
        let run = self.inner.run_horizon(&ys).map_err(py_err)?;
        run_dict(py, run)
    }

    /// Closed and open bins as 1-based inclusive `(start, end)` pairs.
    fn bins(&self) -> Vec<(usize, usize)> {
        self.inner.bins()
    }

    #[getter]
    fn num_bins(&self) -> usize {
        self.inner.num_bins()
    }

    #[getter]
    fn time(&self) -> usize {
        self.inner.time()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.config().effective_beta()
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.config().lambda()
    }

    #[getter]
    fn statistic(&self) -> f64 {
        self.inner.haar().statistic()
    }
}

#[pyfunction]
fn bin_count_bound(n: usize, total_variation: f64, sigma: f64) -> f64 {
    policy::bin_count_bound(n, total_variation, sigma)
}

#[pyfunction]
fn ogd_batch_size_tv(n: usize, sigma: f64, c_n: f64) -> PyResult<usize> {
    baselines::ogd_batch_size_tv(n, sigma, c_n).map_err(py_err)
}

#[pyfunction]
fn ogd_batch_size_sobolev(n: usize, sigma: f64, c_n_prime: f64) -> PyResult<usize> {
    baselines::ogd_batch_size_sobolev(n, sigma, c_n_prime).map_err(py_err)
}

#[pyfunction]
fn ma_window_tv(n: usize, sigma: f64, c_n: f64) -> PyResult<usize> {
    baselines::ma_window_tv(n, sigma, c_n).map_err(py_err)
}

#[pyfunction]
fn run_ogd<'py>(py: Python<'py>, ys: Vec<f64>, batch_size: usize) -> PyResult<Bound<'py, PyDict>> {
    let config = OgdConfig::new(batch_size, ys.len()).map_err(py_err)?;
    run_dict(py, baselines::run_ogd(config, &ys).map_err(py_err)?)
}

#[pyfunction]
fn run_ma<'py>(py: Python<'py>, ys: Vec<f64>, window: usize) -> PyResult<Bound<'py, PyDict>> {
    let config = MaConfig::new(window, ys.len()).map_err(py_err)?;
    run_dict(py, baselines::run_ma(config, &ys).map_err(py_err)?)
}

/// Generates a trend from a description such as `hybrid` or `doppler:offset=0.01`.
///
/// Returns a dict with `theta`, `tv`, `sobolev` and `sup`.
#[pyfunction]
fn generate<'py>(py: Python<'py>, description: &str, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let generator: Generator = description.parse().map_err(py_err)?;
    let truth = generator.generate(n).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("theta", truth.theta)?;
    d.set_item("tv", truth.tv)?;
    d.set_item("sobolev", truth.sobolev)?;
    d.set_item("sup", truth.sup)?;
    Ok(d)
}

/// `theta + sigma * g` with Gaussian `g` drawn from a seeded stream.
#[pyfunction]
fn add_noise(theta: Vec<f64>, sigma: f64, seed: u64) -> PyResult<Vec<f64>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(PyValueError::new_err(format!("sigma must be finite and >= 0, got {sigma}")));
    }
    let noise = NoiseSpec::gaussian(sigma, seed).sample(theta.len());
    Ok(theta.iter().zip(noise).map(|(t, g)| t + g).collect())
}

/// Sum of squared errors between predictions and the trend.
#[pyfunction]
fn dynamic_regret(predictions: Vec<f64>, theta: Vec<f64>) -> PyResult<f64> {
    let run = ForecastRun {
        restarts: vec![false; predictions.len()],
        predictions,
        num_bins: 0,
    };
    let trace = evaluation::TrialTrace::assemble(
        "python",
        0,
        serde_json::Value::Null,
        &theta,
        &theta,
        &run,
        std::time::Duration::ZERO,
    )
    .map_err(py_err)?;
    Ok(evaluation::dynamic_regret(&trace))
}

/// Least-squares slope of log regret against log horizon.
#[pyfunction]
fn scaling_slope(ns: Vec<usize>, regrets: Vec<f64>) -> PyResult<f64> {
    if ns.len() != regrets.len() {
        return Err(PyValueError::new_err("ns and regrets differ in length"));
    }
    let rows: Vec<(usize, f64)> = ns.into_iter().zip(regrets).collect();
    evaluation::scaling_slope(&rows).map_err(py_err)
}

/// Runs a trial from a JSON config; writes its files and returns the summary as a dict.
#[pyfunction]
fn run_trial<'py>(py: Python<'py>, config_json: &str) -> PyResult<Bound<'py, PyAny>> {
    let config = parse_config(config_json)?;
    let summary = harness::run_trial(&config).map_err(py_err)?;
    json_to_py(py, &summary)
}

/// Runs a sweep from a JSON config; writes its files and returns the report as a dict.
#[pyfunction]
fn run_sweep<'py>(py: Python<'py>, config_json: &str) -> PyResult<Bound<'py, PyAny>> {
    let config = parse_config(config_json)?;
    let report = harness::run_sweep(&config).map_err(py_err)?;
    json_to_py(py, &report)
}

#[pymodule]
fn arrows(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyArrows>()?;
    m.add_function(wrap_pyfunction!(haar_transform, m)?)?;
    m.add_function(wrap_pyfunction!(pad_and_recenter, m)?)?;
    m.add_function(wrap_pyfunction!(soft_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(restart_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_sigma_mad, m)?)?;
    m.add_function(wrap_pyfunction!(bin_count_bound, m)?)?;
    m.add_function(wrap_pyfunction!(ogd_batch_size_tv, m)?)?;
    m.add_function(wrap_pyfunction!(ogd_batch_size_sobolev, m)?)?;
    m.add_function(wrap_pyfunction!(ma_window_tv, m)?)?;
    m.add_function(wrap_pyfunction!(run_ogd, m)?)?;
    m.add_function(wrap_pyfunction!(run_ma, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(add_noise, m)?)?;
    m.add_function(wrap_pyfunction!(dynamic_regret, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_slope, m)?)?;
    m.add_function(wrap_pyfunction!(run_trial, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    Ok(())
}
