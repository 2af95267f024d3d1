use std::path::PathBuf;

use chrono::NaiveDate;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use hailchi::cluster::{cut_dendrogram, event_features, single_linkage};
use hailchi::fit::DistanceMetric;
use hailchi::report::{analyze_storm, load_events, FitOptions, StormReport};
use hailchi::storm::{sample_events, total_damage_closed, Velocity2};
use hailchi::{stats, Error};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io { .. } => PyIOError::new_err(err.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn value_err(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// One radar hail detection.
#[pyclass(name = "HailEvent", module = "hailchi", from_py_object)]
#[derive(Clone)]
struct PyHailEvent {
    inner: hailchi::HailEvent,
}

#[pymethods]
impl PyHailEvent {
    #[new]
    fn new(time: &str, lon: f64, lat: f64, prob: f64) -> PyResult<Self> {
        let time = chrono::DateTime::parse_from_rfc3339(time)
            .map_err(value_err)?
            .with_timezone(&chrono::Utc);
        let inner = hailchi::HailEvent::new(time, lon, lat, prob);
        if !inner.is_valid() {
            return Err(PyValueError::new_err("coordinates must be finite and prob in (0, 1]"));
        }
        Ok(Self { inner })
    }

    #[getter]
    fn time(&self) -> String {
        self.inner.time.to_rfc3339_opts(chrono::SecondsFormat::AutoSi, true)
    }

    #[getter]
    fn lon(&self) -> f64 {
        self.inner.lon
    }

    #[getter]
    fn lat(&self) -> f64 {
        self.inner.lat
    }

    #[getter]
    fn prob(&self) -> f64 {
        self.inner.prob
    }

    fn __repr__(&self) -> String {
        format!(
            "HailEvent(time='{}', lon={}, lat={}, prob={})",
            self.time(),
            self.inner.lon,
            self.inner.lat,
            self.inner.prob
        )
    }
}

/// Result of fitting one storm.
#[pyclass(name = "StormFit", module = "hailchi")]
struct PyStormFit {
    report: StormReport,
}

#[pymethods]
impl PyStormFit {
    #[getter]
    fn event_count(&self) -> usize {
        self.report.event_count
    }

    #[getter]
    fn skipped(&self) -> Option<String> {
        self.report.skipped.clone()
    }

    #[getter]
    fn mean(&self) -> Option<(f64, f64)> {
        self.report.binormal.as_ref().map(|b| (b.mean[0], b.mean[1]))
    }

    #[getter]
    fn cov(&self) -> Option<[[f64; 2]; 2]> {
        self.report.binormal.as_ref().map(|b| b.cov)
    }

    #[getter]
    fn lambda_hat(&self) -> Option<f64> {
        self.report.chi.map(|c| c.lambda_hat)
    }

    #[getter]
    fn s_f(&self) -> Option<f64> {
        self.report.chi.map(|c| c.sse)
    }

    #[getter]
    fn mu_hat(&self) -> Option<f64> {
        self.report.lognormal_d.map(|l| l.mu_hat)
    }

    #[getter]
    fn sigma_hat(&self) -> Option<f64> {
        self.report.lognormal_d.map(|l| l.sigma_hat)
    }

    #[getter]
    fn s_g_d(&self) -> Option<f64> {
        self.report.lognormal_d.map(|l| l.sse)
    }

    #[getter]
    fn s_g(&self) -> Option<f64> {
        self.report.lognormal_euclidean.map(|l| l.sse)
    }

    #[getter]
    fn p_value(&self) -> Option<f64> {
        self.report.gof.as_ref().map(|g| g.p_value)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.report).map_err(value_err)
    }
}

fn events_of(events: &[PyHailEvent]) -> Vec<hailchi::HailEvent> {
    events.iter().map(|e| e.inner.clone()).collect()
}

/// Reads an event CSV. `date` (YYYY-MM-DD) is needed for HH:MM:SS times.
#[pyfunction]
#[pyo3(signature = (path, date=None))]
fn read_events(path: PathBuf, date: Option<&str>) -> PyResult<Vec<PyHailEvent>> {
    let date = date.map(|d| d.parse::<NaiveDate>()).transpose().map_err(value_err)?;
    let events = load_events(&[path], date).map_err(to_py)?;
    Ok(events.into_iter().map(|inner| PyHailEvent { inner }).collect())
}

/// Samples events from the traveling storm model.
#[pyfunction]
#[pyo3(signature = (count, velocity=(0.0, 0.0), seed=0))]
fn simulate(count: usize, velocity: (f64, f64), seed: u64) -> PyResult<Vec<PyHailEvent>> {
    let v = Velocity2::new(velocity.0, velocity.1).map_err(value_err)?;
    let events = sample_events(count, v, seed).map_err(value_err)?;
    Ok(events.into_iter().map(|inner| PyHailEvent { inner }).collect())
}

/// Storm label (0-based) for each event.
#[pyfunction]
#[pyo3(signature = (events, time_scale=0.0, jump_threshold=3.0))]
fn cluster(events: Vec<PyHailEvent>, time_scale: f64, jump_threshold: f64) -> PyResult<Vec<usize>> {
    let features = event_features(&events_of(&events), time_scale).map_err(value_err)?;
    let dendrogram = single_linkage(&features).map_err(value_err)?;
    Ok(cut_dendrogram(&dendrogram, jump_threshold).map_err(value_err)?.assignments)
}

/// Binormal, chi and log-normal fits of a single storm.
#[pyfunction]
#[pyo3(signature = (events, metric="mahalanobis"))]
fn fit_storm(events: Vec<PyHailEvent>, metric: &str) -> PyResult<PyStormFit> {
    let metric: DistanceMetric = metric.parse().map_err(value_err)?;
    let options = FitOptions {
        metric,
        plots: false,
        ..FitOptions::default()
    };
    let analysis = analyze_storm(1, &events_of(&events), &options);
    Ok(PyStormFit { report: analysis.report })
}

#[pyfunction]
fn chi_cdf(r: f64, dof: u32) -> PyResult<f64> {
    stats::chi_cdf(r, dof).map_err(value_err)
}

#[pyfunction]
fn reg_gamma_p(a: f64, x: f64) -> PyResult<f64> {
    stats::reg_gamma_p(a, x).map_err(value_err)
}

/// Time-integrated damage at `x` for a storm moving with `velocity`.
#[pyfunction]
fn total_damage(x: (f64, f64), velocity: (f64, f64)) -> PyResult<f64> {
    let v = Velocity2::new(velocity.0, velocity.1).map_err(value_err)?;
    Ok(total_damage_closed([x.0, x.1], v))
}

#[pymodule]
#[pyo3(name = "hailchi")]
fn hailchi_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHailEvent>()?;
    m.add_class::<PyStormFit>()?;
    m.add_function(wrap_pyfunction!(read_events, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(cluster, m)?)?;
    m.add_function(wrap_pyfunction!(fit_storm, m)?)?;
    m.add_function(wrap_pyfunction!(chi_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(reg_gamma_p, m)?)?;
    m.add_function(wrap_pyfunction!(total_damage, m)?)?;
    Ok(())
}
