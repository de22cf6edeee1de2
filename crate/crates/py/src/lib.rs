//! Python bindings for the simulator.
//!
//! ```python
//! import dreem_sim
//! cfg = dreem_sim.SimConfig(protocol="dreem-me", seed=7)
//! runs = dreem_sim.run_replications(cfg)
//! print([r.first_node_death_round for r in runs])
//! ```

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use dreem_core::{
    geometry, protocols::Protocol, stats, GeometryError, Metric, Point, RadioParams, RegionId,
    SimError,
};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn sim_err(e: SimError) -> PyErr {
    match e {
        SimError::ConfigInvalid(_) => value_err(e),
        SimError::Protocol(_) => PyRuntimeError::new_err(e.to_string()),
    }
}

fn region(id: u8) -> PyResult<RegionId> {
    RegionId::new(id).map_err(value_err)
}

/// First-order radio model constants.
#[pyclass(name = "RadioParams", from_py_object)]
#[derive(Clone)]
struct PyRadioParams {
    inner: RadioParams,
}

#[pymethods]
impl PyRadioParams {
    #[new]
    #[pyo3(signature = (e_elec=50e-9, e_amp=100e-12, e_da=5e-9, packet_bits=4000, initial_energy=0.5))]
    fn new(
        e_elec: f64,
        e_amp: f64,
        e_da: f64,
        packet_bits: u64,
        initial_energy: f64,
    ) -> PyResult<Self> {
        let inner = RadioParams {
            e_elec,
            e_amp,
            e_da,
            packet_bits,
            initial_energy,
        };
        inner.validate().map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn e_elec(&self) -> f64 {
        self.inner.e_elec
    }

    #[getter]
    fn e_amp(&self) -> f64 {
        self.inner.e_amp
    }

    #[getter]
    fn e_da(&self) -> f64 {
        self.inner.e_da
    }

    #[getter]
    fn packet_bits(&self) -> u64 {
        self.inner.packet_bits
    }

    #[getter]
    fn initial_energy(&self) -> f64 {
        self.inner.initial_energy
    }

    fn tx_cost(&self, bits: u64, distance: f64) -> PyResult<f64> {
        self.inner.tx_cost(bits, distance).map_err(value_err)
    }

    fn rx_cost(&self, bits: u64) -> f64 {
        self.inner.rx_cost(bits)
    }

    fn aggregation_cost(&self, bits: u64, signals: u64) -> f64 {
        self.inner.aggregation_cost(bits, signals)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "RadioParams(e_elec={}, e_amp={}, e_da={}, packet_bits={}, initial_energy={})",
            p.e_elec, p.e_amp, p.e_da, p.packet_bits, p.initial_energy
        )
    }
}

#[pyclass(name = "SimConfig", from_py_object)]
#[derive(Clone)]
struct PySimConfig {
    inner: dreem_core::SimConfig,
}

#[pymethods]
impl PySimConfig {
    #[new]
    #[pyo3(signature = (
        protocol="dreem-me",
        seed=1,
        runs=5,
        max_rounds=5000,
        drop_prob=0.3,
        nodes_per_region=10,
        radio=None,
    ))]
    fn new(
        protocol: &str,
        seed: u64,
        runs: usize,
        max_rounds: u32,
        drop_prob: f64,
        nodes_per_region: usize,
        radio: Option<PyRadioParams>,
    ) -> PyResult<Self> {
        let inner = dreem_core::SimConfig {
            protocol: protocol.parse::<Protocol>().map_err(value_err)?,
            radio: radio.map(|r| r.inner).unwrap_or_default(),
            nodes_per_region,
            drop_prob,
            max_rounds,
            seed,
            runs,
        };
        inner.validate().map_err(sim_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn protocol(&self) -> &'static str {
        self.inner.protocol.slug()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn runs(&self) -> usize {
        self.inner.runs
    }

    #[getter]
    fn max_rounds(&self) -> u32 {
        self.inner.max_rounds
    }

    #[getter]
    fn drop_prob(&self) -> f64 {
        self.inner.drop_prob
    }

    #[getter]
    fn nodes_per_region(&self) -> usize {
        self.inner.nodes_per_region
    }

    #[getter]
    fn radio(&self) -> PyRadioParams {
        PyRadioParams {
            inner: self.inner.radio,
        }
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "SimConfig(protocol='{}', seed={}, runs={}, max_rounds={}, drop_prob={}, nodes_per_region={})",
            c.protocol.slug(),
            c.seed,
            c.runs,
            c.max_rounds,
            c.drop_prob,
            c.nodes_per_region
        )
    }
}

/// One replication's per-round metrics and lifetime markers.
#[pyclass(name = "RunResult", skip_from_py_object)]
#[derive(Clone)]
struct PyRunResult {
    inner: dreem_core::RunResult,
}

#[pymethods]
impl PyRunResult {
    #[getter]
    fn protocol(&self) -> &'static str {
        self.inner.protocol.slug()
    }

    #[getter]
    fn run_index(&self) -> usize {
        self.inner.run_index
    }

    #[getter]
    fn total_nodes(&self) -> usize {
        self.inner.total_nodes
    }

    #[getter]
    fn first_node_death_round(&self) -> Option<u32> {
        self.inner.first_node_death_round
    }

    #[getter]
    fn all_dead_round(&self) -> Option<u32> {
        self.inner.all_dead_round
    }

    fn __len__(&self) -> usize {
        self.inner.rounds.len()
    }

    /// Per-round values of one metric: alive, dead, sent_to_bs,
    /// received_at_bs, dropped, energy_consumed or cluster_heads.
    fn column(&self, name: &str) -> PyResult<Vec<f64>> {
        if name == "cluster_heads" {
            return Ok(self
                .inner
                .rounds
                .iter()
                .map(|m| m.cluster_heads as f64)
                .collect());
        }
        let metric: Metric = name.parse().map_err(value_err)?;
        Ok(self.inner.rounds.iter().map(|m| metric.value(m)).collect())
    }

    /// `(node, region, death_round or None)` for every node.
    fn fates(&self) -> Vec<(usize, u8, Option<u32>)> {
        self.inner
            .fates
            .iter()
            .map(|f| (f.node, f.region.get(), f.death_round))
            .collect()
    }

    /// The per-run CSV text, identical to what the CLI writes.
    fn to_csv(&self) -> String {
        dreem_core::cli::run_csv(&self.inner)
    }
}

#[pyfunction]
fn region_of(x: f64, y: f64) -> PyResult<u8> {
    geometry::region_of(Point::new(x, y))
        .map(RegionId::get)
        .map_err(|e: GeometryError| value_err(e))
}

#[pyfunction]
fn nearby_regions(outer_region: u8) -> PyResult<Vec<u32>> {
    // Vec<u8> would surface in Python as `bytes`
    let set = geometry::nearby_regions(region(outer_region)?).map_err(value_err)?;
    Ok(set.iter().map(|r| u32::from(r.get())).collect())
}

#[pyfunction]
fn relay_target(outer_region: u8) -> PyResult<u8> {
    geometry::relay_target(region(outer_region)?)
        .map(RegionId::get)
        .map_err(value_err)
}

#[pyfunction]
fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    geometry::distance(Point::new(a.0, a.1), Point::new(b.0, b.1))
}

#[pyfunction]
#[pyo3(signature = (config, run_index=0))]
fn run_once(py: Python<'_>, config: PySimConfig, run_index: usize) -> PyResult<PyRunResult> {
    let inner = py
        .detach(|| dreem_core::run_once(&config.inner, run_index))
        .map_err(sim_err)?;
    Ok(PyRunResult { inner })
}

#[pyfunction]
fn run_replications(py: Python<'_>, config: PySimConfig) -> PyResult<Vec<PyRunResult>> {
    let runs = py
        .detach(|| dreem_core::run_replications(&config.inner))
        .map_err(sim_err)?;
    Ok(runs
        .into_iter()
        .map(|inner| PyRunResult { inner })
        .collect())
}

/// `(round, mean, ci_low, ci_high, min, max, n)`
type AggRow = (u32, f64, f64, f64, f64, f64, usize);

/// Per-round aggregate rows, same columns as the aggregate CSV.
#[pyfunction]
#[pyo3(signature = (results, metric, confidence=0.95))]
fn aggregate(
    results: Vec<PyRef<'_, PyRunResult>>,
    metric: &str,
    confidence: f64,
) -> PyResult<Vec<AggRow>> {
    let metric: Metric = metric.parse().map_err(value_err)?;
    let runs: Vec<_> = results.iter().map(|r| r.inner.clone()).collect();
    let series = stats::aggregate(&runs, metric, confidence).map_err(value_err)?;
    Ok(series
        .rows
        .iter()
        .map(|r| {
            let s = r.summary;
            (r.round, s.mean, s.ci_low, s.ci_high, s.min, s.max, s.n)
        })
        .collect())
}

/// `(mean, ci_low, ci_high)` Student-t interval of a sample.
#[pyfunction]
#[pyo3(signature = (values, confidence=0.95))]
fn summarize(values: Vec<f64>, confidence: f64) -> PyResult<(f64, f64, f64)> {
    let s = stats::summarize(&values, confidence).map_err(value_err)?;
    Ok((s.mean, s.ci_low, s.ci_high))
}

#[pymodule]
fn dreem_sim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyRadioParams>()?;
    m.add_class::<PySimConfig>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(region_of, m)?)?;
    m.add_function(wrap_pyfunction!(nearby_regions, m)?)?;
    m.add_function(wrap_pyfunction!(relay_target, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(run_once, m)?)?;
    m.add_function(wrap_pyfunction!(run_replications, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate, m)?)?;
    m.add_function(wrap_pyfunction!(summarize, m)?)?;
    Ok(())
}
