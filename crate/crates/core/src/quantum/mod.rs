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

//! Complex linear algebra and the quantum type layer: kets, density
//! operators, measurement sets, super-operators and the standard gates.
//!
//! Composite systems follow a single ordering convention everywhere: the
//! leftmost factor of a tensor product (equivalently, the first declared
//! qubit) is the most significant bit of a basis index.

mod gates;
mod matrix;
mod operators;
mod state;
mod validate;
pub mod random;

pub use gates::GateLibrary;
pub use matrix::{c64, ComplexMatrix};
pub(crate) use matrix::apply_to_qubits;
pub use operators::{MeasurementSet, SuperOperator};
pub use state::{inner_product, normalize, DensityOperator, Ensemble, Ket, QuantumState, Tensor};
pub use validate::{
    validate_density, validate_kraus, validate_measurement, validate_unitary, ValidationReport,
    Violation, ViolationKind,
};

pub use num_complex::Complex64;

/// Tolerance for physical invariants: norm, trace, completeness, positivity.
pub const PHYSICAL_TOL: f64 = 1e-9;
/// Tolerance for unitarity checks.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance for exact algebraic identities.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Probabilities below this are treated as zero.
pub const ZERO_PROBABILITY: f64 = 1e-12;
/// Largest register width for which dense density-operator simulation is
/// guaranteed.
pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("vector has no nonzero amplitude")]
    ZeroVector,
    #[error("operator is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("measurement is incomplete (residual {residual:.3e})")]
    IncompleteMeasurement { residual: f64 },
    #[error("Kraus operators do not satisfy sum E^dag E <= I (excess {excess:.3e})")]
    NotTraceNonIncreasing { excess: f64 },
    #[error("not a density operator: {0}")]
    InvalidDensity(String),
    #[error("outcome {0} has zero probability")]
    ZeroProbabilityOutcome(usize),
    #[error("outcome {outcome} out of range for a {count}-outcome measurement")]
    OutcomeOutOfRange { outcome: usize, count: usize },
    #[error("ensemble probabilities must be in [0,1] and sum to 1 (sum {sum})")]
    InvalidEnsemble { sum: f64 },
    #[error("qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit {0} targeted twice")]
    DuplicateQubit(usize),
    #[error("dimension {dim} is not a power of two")]
    NotPowerOfTwo { dim: usize },
    #[error("{n_qubits} qubits exceeds the dense simulation capacity of {max} qubits")]
    CapacityExceeded { n_qubits: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, QuantumError>;

/// `log2(dim)` for a power-of-two dimension.
pub fn qubit_count(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(QuantumError::NotPowerOfTwo { dim });
    }
    Ok(dim.trailing_zeros() as usize)
}

#[cfg(test)]
mod tests;
