//! Python bindings. States cross the boundary as lists of complex amplitudes
//! (qubit 1 most significant); partitions as lists of 1-based blocks.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qentangle::circuit::{
    decode_prefix, encode_prefix, encoding_length, EnsembleSpec, ENCODING_VERSION, GATE_SET_ID,
};
use qentangle::descriptive::{qca, sqcd};
use qentangle::distinguish::{build_reversal_distinguisher, worst_case_advantage, AdvantageOptions};
use qentangle::io::circuit_from_json;
use qentangle::qstate::{average_entropy as avg_entropy, fidelity as pure_fidelity, QubitPermutation, Qustring};
use qentangle::separability::{finest_factorization, sdis_with, SdisOptions};
use qentangle::verify::run_suites;
use qentangle::{Error, TOOL_VERSION};

fn err(e: Error) -> PyErr {
    match e {
        Error::Capability(_) | Error::Undefined(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn state(amplitudes: Vec<Complex64>) -> PyResult<Qustring> {
    Qustring::new(amplitudes).map_err(err)
}

/// Amplitudes of a built-in ensemble member: ghz, pairwise, w, basis, phase.
#[pyfunction]
fn ensemble_state(name: &str, n: usize) -> PyResult<Vec<Complex64>> {
    let s = EnsembleSpec::named(name).and_then(|e| e.state(n)).map_err(err)?;
    Ok(s.into_amplitudes())
}

/// `(value, partition)` of the k-separability distance.
#[pyfunction]
#[pyo3(signature = (amplitudes, k, restarts=None, seed=None))]
fn sdis(
    amplitudes: Vec<Complex64>,
    k: usize,
    restarts: Option<usize>,
    seed: Option<u64>,
) -> PyResult<(f64, Vec<Vec<usize>>)> {
    let mut opts = SdisOptions::default();
    if let Some(r) = restarts {
        opts = opts.with_restarts(r);
    }
    if let Some(s) = seed {
        opts = opts.with_seed(s);
    }
    let r = sdis_with(&state(amplitudes)?, k, &opts).map_err(err)?;
    Ok((r.value, r.partition.blocks_one_based()))
}

/// `(sind, finest partition)`.
#[pyfunction]
fn separability_index(amplitudes: Vec<Complex64>) -> PyResult<(usize, Vec<Vec<usize>>)> {
    let r = finest_factorization(&state(amplitudes)?).map_err(err)?;
    Ok((r.sind, r.finest_partition.blocks_one_based()))
}

#[pyfunction]
fn average_entropy(amplitudes: Vec<Complex64>) -> PyResult<f64> {
    avg_entropy(&state(amplitudes)?).map_err(err)
}

#[pyfunction]
fn fidelity(a: Vec<Complex64>, b: Vec<Complex64>) -> PyResult<f64> {
    pure_fidelity(&state(a)?, &state(b)?).map_err(err)
}

/// Certified worst-case advantage of the reversal distinguisher for an
/// ensemble member that has a constructor.
#[pyfunction]
#[pyo3(signature = (name, n, k, restarts=None))]
fn reversal_advantage<'py>(
    py: Python<'py>,
    name: &str,
    n: usize,
    k: usize,
    restarts: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = EnsembleSpec::named(name).map_err(err)?;
    let ctor = spec
        .constructor(n)
        .ok_or_else(|| PyValueError::new_err(format!("ensemble {name} has no constructor")))?
        .map_err(err)?;
    let d = build_reversal_distinguisher(&ctor.circuit).and_then(|d| d.with_k(k)).map_err(err)?;
    let mut opts = AdvantageOptions::default();
    if let Some(r) = restarts {
        opts = opts.with_restarts(r);
    }
    let r = worst_case_advantage(&d, &ctor.target, &opts).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("epsilon_star", r.epsilon_star)?;
    out.set_item("p_target", r.p_target)?;
    out.set_item("worst_partition", r.worst_partition.blocks_one_based())?;
    out.set_item("converged", r.converged)?;
    out.set_item("size", d.size())?;
    Ok(out)
}

/// `(value, witness length, exhaustive)`; `kind` is "qca" or "sqcd".
#[pyfunction]
#[pyo3(signature = (amplitudes, kind, size_bound, k=2))]
fn complexity(amplitudes: Vec<Complex64>, kind: &str, size_bound: usize, k: usize) -> PyResult<(f64, usize, bool)> {
    let s = state(amplitudes)?;
    let e = match kind {
        "qca" => qca(&s, size_bound),
        "sqcd" => sqcd(&s, k, size_bound),
        _ => return Err(PyValueError::new_err(format!("kind must be qca or sqcd, got {kind:?}"))),
    }
    .map_err(err)?;
    Ok((e.value, e.witness_length, e.exhaustive))
}

/// Bit length of a circuit given as JSON.
#[pyfunction]
fn circuit_encoding_length(circuit_json: &str) -> PyResult<usize> {
    Ok(encoding_length(&circuit_from_json(circuit_json).map_err(err)?))
}

/// The unary prefix `1^{σ,m}` as a '0'/'1' string; `sigma` is 1-based.
#[pyfunction]
fn prefix(sigma: Vec<usize>, sectioning: Vec<usize>) -> PyResult<String> {
    let s = QubitPermutation::from_one_based(&sigma).map_err(err)?;
    let e = encode_prefix(&s, &sectioning).map_err(err)?;
    Ok(e.bits.iter().map(|&b| if b { '1' } else { '0' }).collect())
}

/// Inverse of [`prefix`].
#[pyfunction]
fn parse_prefix(bits: &str) -> PyResult<(Vec<usize>, Vec<usize>)> {
    let v: Vec<bool> = bits
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(PyValueError::new_err(format!("unexpected character {c:?}"))),
        })
        .collect::<PyResult<_>>()?;
    let (s, m) = decode_prefix(&v).map_err(err)?;
    Ok((s.to_one_based(), m))
}

/// `[(name, passed, cases)]` for a suite name or "all".
#[pyfunction]
#[pyo3(signature = (suite="all", seed=7))]
fn verify(suite: &str, seed: u64) -> PyResult<Vec<(String, bool, usize)>> {
    let r = run_suites(suite, seed).map_err(err)?;
    Ok(r.into_iter().map(|s| (s.name, s.passed, s.cases)).collect())
}

#[pymodule]
fn pyqentangle(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", TOOL_VERSION)?;
    m.add("GATE_SET_ID", GATE_SET_ID)?;
    m.add("ENCODING_VERSION", ENCODING_VERSION)?;
    m.add_function(wrap_pyfunction!(ensemble_state, m)?)?;
    m.add_function(wrap_pyfunction!(sdis, m)?)?;
    m.add_function(wrap_pyfunction!(separability_index, m)?)?;
    m.add_function(wrap_pyfunction!(average_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(reversal_advantage, m)?)?;
    m.add_function(wrap_pyfunction!(complexity, m)?)?;
    m.add_function(wrap_pyfunction!(circuit_encoding_length, m)?)?;
    m.add_function(wrap_pyfunction!(prefix, m)?)?;
    m.add_function(wrap_pyfunction!(parse_prefix, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
