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

//! Unitary synthesis: exact decomposition into single-qubit gates and CNOTs
//! (two-level/Gray-code or quantum Shannon decomposition), followed by
//! Solovay-Kitaev approximation of every non-basic single-qubit gate.
//!
//! Qubit 0 is the most significant bit of a basis index, as everywhere else.

mod gates;
mod qsd;
mod sk;
mod two_level;


use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::quantum::{qubit_count, ComplexMatrix, GateLibrary, ALGEBRA_TOL, UNITARY_TOL};

pub use qsd::qsd_decompose;
pub use sk::{solovay_kitaev, SkNet, SkResult, DEFAULT_WORD_LENGTH};
pub use two_level::{two_level_decompose, two_level_to_circuit, TwoLevelFactor};

/// Names of the gates a circuit may use (CNOT is always allowed).
pub type GateSet = BTreeSet<String>;

/// `{H, T, Tdg, S, Sdg, X, CNOT}`.
pub fn default_gate_set() -> GateSet {
    ["H", "T", "Tdg", "S", "Sdg", "X", "CNOT"].iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub name: String,
    /// Control first for CNOT.
    pub qubits: Vec<usize>,
    pub matrix: ComplexMatrix,
}

impl Gate {
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate {
            name: "CNOT".into(),
            qubits: vec![control, target],
            matrix: GateLibrary::standard().get("CNOT").expect("CNOT").clone(),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for q in &self.qubits {
            write!(f, " q{q}")?;
        }
        Ok(())
    }
}

/// Gates in time order (first gate acts first).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateSequence {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    /// Upper bound on the phase-invariant operator-norm distance between
    /// the circuit and its target.
    pub epsilon: f64,
}

impl GateSequence {
    pub fn new(n_qubits: usize) -> Self {
        GateSequence { n_qubits, gates: Vec::new(), epsilon: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn counts(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for g in &self.gates {
            *m.entry(g.name.clone()).or_insert(0) += 1;
        }
        m
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.name == "CNOT").count()
    }

    /// One gate per line: `H q0`, `CNOT q0 q1`.
    pub fn to_text(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sequence serializes")
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthesisError {
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("dimension {0} is not a power of two")]
    BadDimension(usize),
    #[error("net too coarse to start the recursion (ε0 = {eps0:.3})")]
    NetTooCoarse { eps0: f64 },
    #[error("qubit {qubit} out of range for {n_qubits} qubits")]
    IndexOutOfRange { qubit: usize, n_qubits: usize },
    #[error("gate alphabet: {0}")]
    Alphabet(String),
}

pub type Result<T> = std::result::Result<T, SynthesisError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Qr,
    Qsd,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "qr" => Ok(Method::Qr),
            "qsd" => Ok(Method::Qsd),
            _ => Err(format!("unknown method `{s}` (expected qr or qsd)")),
        }
    }
}

/// Dense product of the embedded gates, first gate applied first.
pub fn reconstruct(seq: &GateSequence, n_qubits: usize) -> Result<ComplexMatrix> {
    let dim = 1usize << n_qubits;
    let mut out = DMatrix::identity(dim, dim);
    for g in &seq.gates {
        if let Some(&q) = g.qubits.iter().find(|&&q| q >= n_qubits) {
            return Err(SynthesisError::IndexOutOfRange { qubit: q, n_qubits });
        }
        for col in out.as_mut_slice().chunks_mut(dim) {
            crate::quantum::apply_to_qubits(&g.matrix, &g.qubits, n_qubits, col)
                .map_err(|_| SynthesisError::BadDimension(g.matrix.rows()))?;
        }
    }
    Ok(ComplexMatrix::from_nalgebra(out))
}

pub(crate) fn check_unitary(u: &ComplexMatrix) -> Result<usize> {
    if !u.is_square() {
        return Err(SynthesisError::BadDimension(u.rows()));
    }
    let n = qubit_count(u.rows()).map_err(|_| SynthesisError::BadDimension(u.rows()))?;
    let residual = u.unitarity_residual();
    if residual > UNITARY_TOL {
        return Err(SynthesisError::NotUnitary { residual });
    }
    Ok(n)
}

/// The exact circuit for `u` (single-qubit gates named `U`, `Ry`, `Rz`
/// or `X`, plus CNOTs), before any approximation.
pub fn exact_circuit(u: &ComplexMatrix, method: Method) -> Result<GateSequence> {
    let n = check_unitary(u)?;
    if let Some(seq) = tensor_factors(u, n) {
        return Ok(seq);
    }
    if n == 2 {
        let cnot = GateLibrary::standard().get("CNOT").expect("CNOT").clone();
        if u.phase_invariant_distance(&cnot) < ALGEBRA_TOL {
            let mut seq = GateSequence::new(2);
            seq.gates.push(Gate::cnot(0, 1));
            return Ok(seq);
        }
    }
    match method {
        Method::Qsd => qsd_decompose(u),
        Method::Qr => {
            let mut seq = GateSequence::new(n);
            for f in two_level_decompose(u)?.iter().rev() {
                seq.gates.extend(two_level_to_circuit(f).gates);
            }
            Ok(seq)
        }
    }
}

/// Splits `u = u_0 ⊗ u_1 ⊗ … ⊗ u_{n-1}` when it is a product of
/// single-qubit operators.
fn tensor_factors(u: &ComplexMatrix, n: usize) -> Option<GateSequence> {
    let mut seq = GateSequence::new(n);
    let mut rest = u.clone();
    for q in 0..n {
        let (a, b) = if q + 1 == n { (rest.clone(), None) } else {
            let (a, b) = split_kron(&rest)?;
            (a, Some(b))
        };
        seq.gates.push(Gate { name: "U".into(), qubits: vec![q], matrix: a });
        match b {
            Some(b) => rest = b,
            None => break,
        }
    }
    let rebuilt = reconstruct(&seq, n).ok()?;
    ((&rebuilt - u).max_abs() < ALGEBRA_TOL).then_some(seq)
}

/// `m ≈ a ⊗ b` with `a` 2×2, both unitary, or `None`.
fn split_kron(m: &ComplexMatrix) -> Option<(ComplexMatrix, ComplexMatrix)> {
    let (a, b) = kron_factor(m)?;
    let rebuilt = a.kron(&b);
    ((&rebuilt - m).max_abs() < ALGEBRA_TOL).then_some((a, b))
}

/// Best `a ⊗ b` split of `m` (`a` 2×2), read off its largest block.
pub(crate) fn kron_factor(m: &ComplexMatrix) -> Option<(ComplexMatrix, ComplexMatrix)> {
    let d = m.rows() / 2;
    let blocks = [m.block(0, 0, d, d), m.block(0, d, d, d), m.block(d, 0, d, d), m.block(d, d, d, d)];
    let (k, big) = blocks
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.frobenius_norm().total_cmp(&y.1.frobenius_norm()))?;
    // big = a_k · b with b unitary, so ‖big‖_F = |a_k| √d
    let ak = big.frobenius_norm() / (d as f64).sqrt();
    let b = big.scale(crate::quantum::c64(1.0 / ak, 0.0));
    let bd = b.adjoint();
    let mut a = ComplexMatrix::zeros(2, 2);
    for (i, blk) in blocks.iter().enumerate() {
        let v = if i == k { crate::quantum::c64(ak, 0.0) } else { blk.try_mul(&bd).ok()?.trace() / d as f64 };
        a.set(i / 2, i % 2, v);
    }
    Some((a, b))
}

fn net_cache() -> &'static Mutex<HashMap<Vec<String>, Arc<SkNet>>> {
    static CACHE: OnceLock<Mutex<HashMap<Vec<String>, Arc<SkNet>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Net for the single-qubit part of `basic`, built once per alphabet.
pub fn net_for(basic: &GateSet) -> Result<Arc<SkNet>> {
    let lib = GateLibrary::standard();
    let alphabet: Vec<String> = basic
        .iter()
        .filter(|g| lib.get(g).is_some_and(|m| m.rows() == 2) && g.as_str() != "I")
        .cloned()
        .collect();
    if let Some(net) = net_cache().lock().expect("net cache").get(&alphabet) {
        return Ok(net.clone());
    }
    let names: Vec<&str> = alphabet.iter().map(String::as_str).collect();
    let net = Arc::new(SkNet::build(&names, DEFAULT_WORD_LENGTH)?);
    net_cache().lock().expect("net cache").insert(alphabet, net.clone());
    Ok(net)
}

/// Deepest recursion tried before settling for the best word found.
pub const MAX_SK_DEPTH: usize = 8;

/// Full pipeline: exact circuit, then every single-qubit gate that is not a
/// basic gate (up to phase) is replaced by a Solovay-Kitaev word. The
/// reported bound adds the approximation distances to the residual of the
/// exact stage (residuals below 1e-12 count as zero).
pub fn synthesize(u: &ComplexMatrix, method: Method, basic: &GateSet, epsilon: f64) -> Result<GateSequence> {
    let exact = exact_circuit(u, method)?;
    let n = exact.n_qubits;
    let residual = reconstruct(&exact, n)?.phase_invariant_distance(u);
    let mut out = GateSequence::new(n);
    out.epsilon = if residual < ALGEBRA_TOL { 0.0 } else { residual };
    let lib = GateLibrary::standard();
    let mut net: Option<Arc<SkNet>> = None;
    for g in exact.gates {
        if g.name == "CNOT" {
            out.gates.push(g);
            continue;
        }
        let q = g.qubits[0];
        if g.matrix.phase_invariant_distance(&ComplexMatrix::identity(2)) < ALGEBRA_TOL {
            continue;
        }
        let matched = basic.iter().find(|b| {
            lib.get(b).is_some_and(|m| m.rows() == 2 && m.phase_invariant_distance(&g.matrix) < ALGEBRA_TOL)
        });
        if let Some(b) = matched {
            out.gates.push(Gate { name: b.clone(), qubits: vec![q], matrix: lib.get(b).expect("basic").clone() });
            continue;
        }
        let net = match &net {
            Some(n) => n.clone(),
            None => net.insert(net_for(basic)?).clone(),
        };
        let r = solovay_kitaev(&g.matrix, epsilon, &net, MAX_SK_DEPTH)?;
        if r.distance >= ALGEBRA_TOL {
            out.epsilon += r.distance;
        }
        for name in &r.word {
            out.gates.push(Gate { name: name.clone(), qubits: vec![q], matrix: lib.get(name).expect("alphabet").clone() });
        }
    }
    Ok(out)
}
