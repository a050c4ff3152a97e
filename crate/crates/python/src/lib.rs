//! Python bindings: `import pypolar`.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use polarcodes::channel::{ChannelParam, DiscreteSymmetricChannel};
use polarcodes::construct::{self, BoxMode};
use polarcodes::density::LlrGrid;
use polarcodes::llr::TieBreak;
use polarcodes::polar::{self, PolarCodeSpec};
use polarcodes::shortcodes::{self, CodeTable, LinearBlockCode, REFERENCE_DISTANCES};
use polarcodes::sim::{run_mc, McOptions, PolarCodec};
use polarcodes::{Bit, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn channel(spec: &str) -> PyResult<DiscreteSymmetricChannel> {
    spec.parse::<ChannelParam>().and_then(|c| c.build()).map_err(py_err)
}

fn grid(q: usize, a: f64) -> PyResult<LlrGrid> {
    LlrGrid::with_bound(q, a).map_err(py_err)
}

// `Vec<u8>` would cross over as `bytes`; lists of ints read better.
fn bits_out(bits: Vec<Bit>) -> Vec<u32> {
    bits.into_iter().map(u32::from).collect()
}

fn box_mode(exact: bool) -> BoxMode {
    if exact {
        BoxMode::Exact
    } else {
        BoxMode::Fast
    }
}

#[pyfunction]
fn boxplus(a: f64, b: f64) -> f64 {
    polarcodes::llr::boxplus(a, b)
}

/// Closed-form per-bit erasure probabilities on BEC(p).
#[pyfunction]
fn bec_bit_errors(p: f64, n: usize) -> PyResult<Vec<f64>> {
    Ok(construct::bec_bit_errors(p, n).map_err(py_err)?.as_slice().to_vec())
}

/// Per-bit error profile by density evolution on a named channel.
#[pyfunction]
#[pyo3(signature = (channel_spec, n, grid_q=8192, grid_a=60.0, exact_box=false))]
fn bit_errors(channel_spec: &str, n: usize, grid_q: usize, grid_a: f64, exact_box: bool) -> PyResult<Vec<f64>> {
    let ch = channel(channel_spec)?;
    let f0 = ch.initial_density(grid(grid_q, grid_a)?);
    let profile = construct::de_bit_errors(&f0, n, box_mode(exact_box)).map_err(py_err)?;
    Ok(profile.as_slice().to_vec())
}

/// A polar code of length `2^n` with a fixed frozen set.
#[pyclass(module = "pypolar")]
struct PolarCode {
    spec: PolarCodeSpec,
}

#[pymethods]
impl PolarCode {
    #[new]
    fn new(n: usize, frozen: Vec<usize>) -> PyResult<Self> {
        Ok(PolarCode {
            spec: PolarCodeSpec::new(n, frozen).map_err(py_err)?,
        })
    }

    /// Density-evolution design; returns the code and its union bound.
    #[staticmethod]
    #[pyo3(signature = (channel_spec, n, k, grid_q=8192, grid_a=60.0, exact_box=false))]
    fn construct(
        channel_spec: &str,
        n: usize,
        k: usize,
        grid_q: usize,
        grid_a: f64,
        exact_box: bool,
    ) -> PyResult<(Self, f64)> {
        let ch = channel(channel_spec)?;
        let c = construct::construct(&ch, n, k, grid(grid_q, grid_a)?, box_mode(exact_box)).map_err(py_err)?;
        Ok((PolarCode { spec: c.spec }, c.bound))
    }

    #[getter]
    fn n(&self) -> usize {
        self.spec.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.spec.k()
    }

    #[getter]
    fn frozen(&self) -> Vec<usize> {
        self.spec.frozen().to_vec()
    }

    fn __len__(&self) -> usize {
        self.spec.len()
    }

    fn encode(&self, info: Vec<Bit>) -> PyResult<Vec<u32>> {
        Ok(bits_out(polar::encode(&info, &self.spec).map_err(py_err)?))
    }

    /// SC decoding of channel LLRs; ties are broken with a generator seeded
    /// by `seed`.
    #[pyo3(signature = (llrs, seed=0))]
    fn decode(&self, llrs: Vec<f64>, seed: u64) -> PyResult<Vec<u32>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let out = polar::sc_decode(&llrs, &self.spec, TieBreak::Random, &mut rng).map_err(py_err)?;
        Ok(bits_out(out.info))
    }

    #[pyo3(signature = (channel_spec, grid_q=8192, grid_a=60.0, exact_box=false))]
    fn bound(&self, channel_spec: &str, grid_q: usize, grid_a: f64, exact_box: bool) -> PyResult<f64> {
        let ch = channel(channel_spec)?;
        construct::analyze(&self.spec, &ch, grid(grid_q, grid_a)?, box_mode(exact_box)).map_err(py_err)
    }

    /// Monte-Carlo FER: `(trials, errors, fer, ci_radius)`.
    #[pyo3(signature = (channel_spec, trials, seed=0))]
    fn simulate(&self, py: Python<'_>, channel_spec: &str, trials: u64, seed: u64) -> PyResult<(u64, u64, f64, f64)> {
        let ch = channel(channel_spec)?;
        let codec = PolarCodec::new(self.spec.clone());
        let r = py
            .detach(|| run_mc(&codec, &ch, trials, seed, McOptions::default()))
            .map_err(py_err)?;
        Ok((r.trials, r.errors, r.fer, r.ci_radius))
    }

    fn __repr__(&self) -> String {
        format!("PolarCode(N={}, K={})", self.spec.len(), self.spec.k())
    }
}

/// `(d, multiplicity)` of the code spanned by `rows` (strings of 0/1).
#[pyfunction]
fn min_distance(rows: Vec<String>) -> PyResult<(u32, u64)> {
    let bits = rows
        .iter()
        .map(|r| polar::parse_bits(r))
        .collect::<Result<Vec<_>, _>>()
        .map_err(py_err)?;
    let code = LinearBlockCode::from_bit_rows(&bits).map_err(py_err)?;
    shortcodes::min_distance(&code).map_err(py_err)
}

type Entry = (usize, Option<u32>);

/// `(K, d)` of each entry of the built-in length-32 table and the reference
/// list it is checked against (`None` for the zero code).
#[pyfunction]
fn shipped_table() -> PyResult<(Vec<Entry>, Vec<Entry>)> {
    let table = CodeTable::shipped().map_err(py_err)?;
    let found = table.codes().iter().map(|c| (c.k(), c.distance())).collect();
    Ok((found, REFERENCE_DISTANCES.to_vec()))
}

#[pymodule]
pub fn pypolar(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(boxplus, m)?)?;
    m.add_function(wrap_pyfunction!(bec_bit_errors, m)?)?;
    m.add_function(wrap_pyfunction!(bit_errors, m)?)?;
    m.add_function(wrap_pyfunction!(min_distance, m)?)?;
    m.add_function(wrap_pyfunction!(shipped_table, m)?)?;
    m.add_class::<PolarCode>()?;
    Ok(())
}
