// Copyright 2026 The qwhile Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Python module `qwhile`: programs, simulation, f-QASM, synthesis and the
//! bundled experiments.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use qwhile_core::experiments::{self as ex, Bb84Channel, Bb84Session, GroverMode, GroverSpec, IterationRule};
use qwhile_core::fqasm;
use qwhile_core::lang::{self, SourceProgram};
use qwhile_core::quantum::{ComplexMatrix, GateLibrary};
use qwhile_core::sim::{self, Executable};
use qwhile_core::synthesis::{self, GateSet, Method};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// serde value → plain Python objects.
fn to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_pyobject(py)?.into_any(),
            (_, Some(i)) => i.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn serialize<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(v).map_err(err)?)
}

/// A parsed and validated while-program.
#[pyclass(name = "Program", module = "qwhile")]
struct PyProgram {
    program: SourceProgram,
    exe: Executable,
}

#[pymethods]
impl PyProgram {
    #[new]
    fn new(source: &str) -> PyResult<Self> {
        let program = lang::parse(source).map_err(err)?;
        let exe = Executable::new(&program, &GateLibrary::standard()).map_err(err)?;
        Ok(Self { program, exe })
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.exe.n_qubits()
    }

    /// Canonical source text.
    fn pretty(&self) -> String {
        lang::pretty_print(&self.program)
    }

    /// Sampled shots: outcome counts per site and loop histograms.
    #[pyo3(signature = (shots = 1000, seed = 42))]
    fn run<'py>(&self, py: Python<'py>, shots: u64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let st = sim::run_shots(&self.exe, shots, seed).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("shots", st.shots)?;
        d.set_item("seed", st.seed)?;
        d.set_item("outcome_counts", st.outcome_counts.clone())?;
        d.set_item("loop_histograms", st.loop_histograms.clone())?;
        let entries: BTreeMap<usize, u64> = st.loop_histograms.keys().map(|s| (*s, st.loop_entries(*s))).collect();
        d.set_item("loop_entries", entries)?;
        Ok(d.into_any())
    }

    /// Distribution mode: `(terminals, residual)`, each terminal a
    /// `(weight, density matrix)` pair.
    #[pyo3(signature = (mass_threshold = sim::DEFAULT_MASS_THRESHOLD, step_limit = sim::DEFAULT_STEP_LIMIT))]
    fn distribution(&self, mass_threshold: f64, step_limit: u64) -> PyResult<(Vec<(f64, Vec<Vec<Complex64>>)>, f64)> {
        let d = sim::run_distribution(&self.exe, mass_threshold, step_limit).map_err(err)?;
        let terms = d
            .terminals
            .iter()
            .map(|t| (t.weight, t.state.debug_matrix().to_rows()))
            .collect();
        Ok((terms, d.residual))
    }

    /// f-QASM text.
    fn compile(&self) -> PyResult<String> {
        Ok(fqasm::compile(&self.program).map_err(err)?.serialize())
    }

    /// Whether the VM and the interpreter agree in distribution mode.
    fn check(&self) -> PyResult<bool> {
        let rep = fqasm::check_equivalence(&self.program, sim::DEFAULT_MASS_THRESHOLD, sim::DEFAULT_STEP_LIMIT, 1e-9)
            .map_err(err)?;
        Ok(rep.passed)
    }

    fn __repr__(&self) -> String {
        format!("Program(n_qubits={})", self.exe.n_qubits())
    }
}

/// Result of [`synthesize`].
#[pyclass(name = "GateSequence", module = "qwhile")]
struct PyGateSequence {
    seq: synthesis::GateSequence,
}

#[pymethods]
impl PyGateSequence {
    #[getter]
    fn n_qubits(&self) -> usize {
        self.seq.n_qubits
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.seq.epsilon
    }

    /// `(name, qubits)` per gate, in time order.
    #[getter]
    fn gates(&self) -> Vec<(String, Vec<usize>)> {
        self.seq.gates.iter().map(|g| (g.name.clone(), g.qubits.clone())).collect()
    }

    fn counts(&self) -> BTreeMap<String, usize> {
        self.seq.counts()
    }

    fn cnot_count(&self) -> usize {
        self.seq.cnot_count()
    }

    /// The product of the gates as a dense matrix.
    fn matrix(&self) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(synthesis::reconstruct(&self.seq, self.seq.n_qubits).map_err(err)?.to_rows())
    }

    fn to_text(&self) -> String {
        self.seq.to_text()
    }

    fn __len__(&self) -> usize {
        self.seq.len()
    }

    fn __repr__(&self) -> String {
        format!("GateSequence(n_qubits={}, gates={}, epsilon={:e})", self.seq.n_qubits, self.seq.len(), self.seq.epsilon)
    }
}

/// Compiles a unitary (list of rows of complex numbers) into the basic
/// gate set; `epsilon` bounds the total approximation error.
#[pyfunction]
#[pyo3(signature = (matrix, method = "qsd", epsilon = 1e-3, gates = None))]
fn synthesize(matrix: Vec<Vec<Complex64>>, method: &str, epsilon: f64, gates: Option<Vec<String>>) -> PyResult<PyGateSequence> {
    let u = ComplexMatrix::from_rows(&matrix).map_err(err)?;
    let method: Method = method.parse().map_err(PyValueError::new_err)?;
    let basic: GateSet = match gates {
        Some(g) => g.into_iter().collect(),
        None => synthesis::default_gate_set(),
    };
    let seq = synthesis::synthesize(&u, method, &basic, epsilon).map_err(err)?;
    Ok(PyGateSequence { seq })
}

/// Phase-invariant operator-norm distance between two unitaries.
#[pyfunction]
fn distance(a: Vec<Vec<Complex64>>, b: Vec<Vec<Complex64>>) -> PyResult<f64> {
    let (a, b) = (ComplexMatrix::from_rows(&a).map_err(err)?, ComplexMatrix::from_rows(&b).map_err(err)?);
    Ok(a.phase_invariant_distance(&b))
}

#[pyfunction]
#[pyo3(signature = (shots = 100_000, seed = 42))]
fn qloop_run(py: Python<'_>, shots: u64, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    serialize(py, &ex::qloop_run(shots, seed).map_err(err)?)
}

/// One BB84 session; `channel` is `identity`, `bit_flip(p)`,
/// `depolarizing(p)` or `amplitude_damping(g)`.
#[pyfunction]
#[pyo3(signature = (n = 1024, channel = "identity", sample = None, seed = 42))]
fn bb84_run<'py>(
    py: Python<'py>,
    n: usize,
    channel: &str,
    sample: Option<f64>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let ch: Bb84Channel = channel.parse().map_err(err)?;
    let mut s = Bb84Session::new(n, ch, seed);
    s.sample_fraction = sample;
    serialize(py, &ex::bb84_run(&s).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (clients = 8, n = 1024, channel = "identity", seed = 42))]
fn bb84_multi_client<'py>(
    py: Python<'py>,
    clients: u64,
    n: usize,
    channel: &str,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let ch: Bb84Channel = channel.parse().map_err(err)?;
    serialize(py, &ex::bb84_multi_client(clients, n, ch, None, seed).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (n, targets, mode = "single", rule = "fixed", rounds = None, seed = 42))]
fn grover_run<'py>(
    py: Python<'py>,
    n: usize,
    targets: Vec<usize>,
    mode: &str,
    rule: &str,
    rounds: Option<usize>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let rule: IterationRule = rule.parse().map_err(err)?;
    let mode: GroverMode = mode.parse().map_err(err)?;
    let mut spec = GroverSpec::new(n, &targets).map_err(err)?.with_rule(rule);
    if let Some(r) = rounds {
        spec = spec.with_iterations(r);
    }
    serialize(py, &ex::grover_run(&spec, mode, seed).map_err(err)?)
}

/// Bundled `.qw` programs by file name.
#[pyfunction]
fn programs() -> BTreeMap<&'static str, &'static str> {
    ex::programs().into_iter().collect()
}

#[pymodule]
fn qwhile(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProgram>()?;
    m.add_class::<PyGateSequence>()?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(qloop_run, m)?)?;
    m.add_function(wrap_pyfunction!(bb84_run, m)?)?;
    m.add_function(wrap_pyfunction!(bb84_multi_client, m)?)?;
    m.add_function(wrap_pyfunction!(grover_run, m)?)?;
    m.add_function(wrap_pyfunction!(programs, m)?)?;
    Ok(())
}
