//! Python module `rirsim`: thin wrappers over the core crate.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rirsim::harness::{self, ExperimentConfig, ExperimentOutput, SweepRow};
use rirsim::metrics::{self, DsfTable};
use rirsim::model::{self, CsitClass};
use rirsim::schemes::{self, CsitFault, DecodeEvent, SimOptions};
use rirsim::{DataSetSpec, RngStream, Scheme};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_scheme(name: &str) -> PyResult<Scheme> {
    name.parse().map_err(value_err)
}

fn dataset(a: usize, b: usize) -> PyResult<DataSetSpec> {
    DataSetSpec::new(a, b).map_err(value_err)
}

#[pyclass(name = "NetworkConfig", frozen)]
struct PyNetworkConfig {
    inner: model::NetworkConfig,
}

#[pymethods]
impl PyNetworkConfig {
    /// `q` defaults to the smallest relay every scheme accepts.
    #[new]
    #[pyo3(signature = (k, m, n, q=None))]
    fn new(k: usize, m: usize, n: usize, q: Option<usize>) -> PyResult<Self> {
        let inner = match q {
            Some(q) => model::NetworkConfig::new(k, m, n, q),
            None => model::NetworkConfig::with_ample_relay(k, m, n),
        }
        .map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn q(&self) -> usize {
        self.inner.q
    }

    fn rho(&self) -> f64 {
        self.inner.rho()
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!("NetworkConfig(k={}, m={}, n={}, q={})", c.k, c.m, c.n, c.q)
    }
}

#[pyclass(name = "Trace", frozen)]
struct PyTrace {
    inner: schemes::SchemeTrace,
}

#[pymethods]
impl PyTrace {
    #[getter]
    fn scheme(&self) -> &'static str {
        self.inner.scheme.name()
    }

    #[getter]
    fn slots_used(&self) -> usize {
        self.inner.slots_used
    }

    /// `(symbol_id, priority, decode_slot, user)` per decoded symbol.
    #[getter]
    fn events(&self) -> Vec<(usize, u8, usize, usize)> {
        self.inner
            .events
            .iter()
            .map(|e| (e.symbol_id, e.priority, e.decode_slot, e.user))
            .collect()
    }

    #[getter]
    fn max_recovery_error(&self) -> Option<f64> {
        self.inner.max_recovery_error
    }

    #[getter]
    fn max_interference_residual(&self) -> Option<f64> {
        self.inner.max_interference_residual
    }

    #[getter]
    fn resamples(&self) -> u64 {
        self.inner.resamples
    }

    #[getter]
    fn dummy_symbols(&self) -> usize {
        self.inner.dummy_symbols
    }

    fn empirical_dof(&self) -> f64 {
        self.inner.empirical_dof()
    }

    fn decodes_per_slot(&self) -> Vec<usize> {
        self.inner.decodes_per_slot()
    }

    fn dod(&self) -> PyResult<f64> {
        Ok(metrics::event_dod(&self.inner.events, &DsfTable::default())
            .map_err(value_err)?
            .dod)
    }

    fn __repr__(&self) -> String {
        format!(
            "Trace(scheme={}, slots_used={}, events={})",
            self.inner.scheme,
            self.inner.slots_used,
            self.inner.events.len()
        )
    }
}

/// Canonical scheme names.
#[pyfunction(name = "schemes")]
fn scheme_names() -> Vec<&'static str> {
    Scheme::ALL.iter().map(|s| s.name()).collect()
}

#[pyfunction]
#[pyo3(signature = (scheme, config, a, b, seed=0, stream=0, signal_level=true, pad=false, stale_relay_csi=false))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    scheme: &str,
    config: &PyNetworkConfig,
    a: usize,
    b: usize,
    seed: u64,
    stream: u64,
    signal_level: bool,
    pad: bool,
    stale_relay_csi: bool,
) -> PyResult<PyTrace> {
    let opts = SimOptions {
        signal_level,
        pad_partial_periods: pad,
        csit_fault: stale_relay_csi.then_some(CsitFault::StaleRelayCsi),
        keep_slot_log: false,
    };
    let mut rng = RngStream::new(seed, stream);
    let inner = schemes::simulate(parse_scheme(scheme)?, &config.inner, &dataset(a, b)?, &mut rng, &opts)
        .map_err(value_err)?;
    Ok(PyTrace { inner })
}

/// Returns `(value, divisible)`.
#[pyfunction]
fn closed_form_dod(scheme: &str, config: &PyNetworkConfig, a: usize, b: usize) -> PyResult<(f64, bool)> {
    let r = metrics::closed_form_dod(parse_scheme(scheme)?, &config.inner, &dataset(a, b)?);
    Ok((r.value, r.divisible))
}

#[pyfunction]
fn closed_form_dof(scheme: &str, config: &PyNetworkConfig) -> PyResult<f64> {
    Ok(metrics::closed_form_dof(parse_scheme(scheme)?, &config.inner))
}

/// `None` for schemes without a precoding cost model.
#[pyfunction]
fn complexity<'py>(py: Python<'py>, scheme: &str, config: &PyNetworkConfig) -> PyResult<Option<Bound<'py, PyDict>>> {
    let Some(r) = metrics::complexity(parse_scheme(scheme)?, &config.inner) else {
        return Ok(None);
    };
    let d = PyDict::new(py);
    d.set_item("relay_cost", r.relay_cost)?;
    d.set_item("user_cost", r.user_cost)?;
    d.set_item("condition_branch", r.condition_branch)?;
    Ok(Some(d))
}

/// DoD of `(symbol_id, priority, decode_slot, user)` tuples.
#[pyfunction]
fn event_dod(events: Vec<(usize, u8, usize, usize)>) -> PyResult<f64> {
    let events: Vec<DecodeEvent> = events
        .into_iter()
        .map(|(symbol_id, priority, decode_slot, user)| DecodeEvent {
            symbol_id,
            priority,
            decode_slot,
            user,
        })
        .collect();
    Ok(metrics::event_dod(&events, &DsfTable::default()).map_err(value_err)?.dod)
}

#[pyfunction]
fn classify_csit(t_fb: f64, t_c: f64, position_in_block: f64) -> PyResult<&'static str> {
    if !(t_c > 0.0 && t_fb >= 0.0) {
        return Err(PyValueError::new_err("need t_c > 0 and t_fb >= 0"));
    }
    Ok(match model::classify_csit(t_fb, t_c, position_in_block) {
        CsitClass::Instantaneous => "instantaneous",
        CsitClass::ModeratelyDelayed => "moderately_delayed",
        CsitClass::Delayed => "delayed",
    })
}

fn row_dict<'py>(py: Python<'py>, r: &SweepRow) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("scheme", r.scheme.name())?;
    d.set_item("K", r.k)?;
    d.set_item("M", r.m)?;
    d.set_item("N", r.n)?;
    d.set_item("A", r.a)?;
    d.set_item("B", r.b)?;
    d.set_item("dod_event", r.dod_event)?;
    d.set_item("dod_closed", r.dod_closed)?;
    d.set_item("dof_empirical", r.dof_empirical)?;
    d.set_item("dof_closed", r.dof_closed)?;
    d.set_item("relay_cost", r.relay_cost)?;
    d.set_item("user_cost", r.user_cost)?;
    d.set_item("max_recovery_error", r.max_recovery_error)?;
    d.set_item("resamples", r.resamples)?;
    d.set_item("slots_used", r.slots_used)?;
    Ok(d)
}

type Rows<'py> = (Vec<Bound<'py, PyDict>>, Vec<String>);

fn rows<'py>(py: Python<'py>, out: &ExperimentOutput) -> PyResult<Rows<'py>> {
    let rows = out.rows.iter().map(|r| row_dict(py, r)).collect::<PyResult<_>>()?;
    Ok((rows, out.skips.iter().map(|s| s.to_string()).collect()))
}

fn build(base: ExperimentConfig, overrides: Vec<String>) -> PyResult<ExperimentConfig> {
    let mut cfg = base;
    cfg.set_all(overrides.iter().map(String::as_str)).map_err(value_err)?;
    cfg.validate().map_err(value_err)?;
    Ok(cfg)
}

/// Runs a sweep given `key=value` overrides; returns `(rows, skip_lines)`.
#[pyfunction]
#[pyo3(signature = (overrides=Vec::new()))]
fn run_experiment(py: Python<'_>, overrides: Vec<String>) -> PyResult<Rows<'_>> {
    let cfg = build(ExperimentConfig::default(), overrides)?;
    let out = py.detach(|| harness::run_experiment(&cfg)).map_err(value_err)?;
    rows(py, &out)
}

#[pyfunction]
#[pyo3(signature = (number, overrides=Vec::new()))]
fn figure(py: Python<'_>, number: u8, overrides: Vec<String>) -> PyResult<Rows<'_>> {
    let base = harness::figure_preset(number).map_err(value_err)?;
    let cfg = build(base, overrides)?;
    let out = py.detach(|| harness::run_experiment(&cfg)).map_err(value_err)?;
    rows(py, &out)
}

/// Returns `(passed, failures)`.
#[pyfunction]
#[pyo3(signature = (overrides=Vec::new()))]
fn selfcheck(py: Python<'_>, overrides: Vec<String>) -> PyResult<(bool, Vec<String>)> {
    let cfg = build(harness::selfcheck_preset(), overrides)?;
    let report = py.detach(|| harness::selfcheck(&cfg)).map_err(value_err)?;
    Ok((report.passed(), report.failures))
}

#[pymodule(name = "rirsim")]
fn rirsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetworkConfig>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(scheme_names, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_dod, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_dof, m)?)?;
    m.add_function(wrap_pyfunction!(complexity, m)?)?;
    m.add_function(wrap_pyfunction!(event_dod, m)?)?;
    m.add_function(wrap_pyfunction!(classify_csit, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(figure, m)?)?;
    m.add_function(wrap_pyfunction!(selfcheck, m)?)?;
    Ok(())
}
