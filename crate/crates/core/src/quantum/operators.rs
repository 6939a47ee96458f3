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

use std::f64::consts::FRAC_1_SQRT_2;

use super::matrix::c64;
use super::state::{DensityOperator, Ket};
use super::{
    validate_kraus, validate_measurement, ComplexMatrix, QuantumError, QuantumState, Result,
    ViolationKind,
};

/// A complete set of measurement operators `{M_i}`; outcome labels are the
/// indices `0..len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    operators: Vec<ComplexMatrix>,
    effects: Vec<ComplexMatrix>,
}

impl MeasurementSet {
    /// Validates completeness `∑ M_i†M_i = I`.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let report = validate_measurement(&operators);
        if let Some(v) = report.violations.first() {
            return Err(match v.kind {
                ViolationKind::DimMismatch => QuantumError::DimMismatch {
                    expected: operators[0].rows(),
                    found: 0,
                },
                _ => QuantumError::IncompleteMeasurement {
                    residual: v.residual,
                },
            });
        }
        Ok(Self::unchecked(operators))
    }

    fn unchecked(operators: Vec<ComplexMatrix>) -> Self {
        let effects = operators.iter().map(|m| &m.adjoint() * m).collect();
        Self { operators, effects }
    }

    /// Projectors onto the computational basis of a `dim`-dimensional space.
    pub fn computational(dim: usize) -> Self {
        let operators = (0..dim)
            .map(|i| {
                let k = Ket::basis(dim, i).expect("in range");
                ComplexMatrix::outer(k.debug_amplitudes(), k.debug_amplitudes())
            })
            .collect();
        Self::unchecked(operators)
    }

    /// `{|+⟩⟨+|, |−⟩⟨−|}`.
    pub fn plus_minus() -> Self {
        let p = Ket::plus();
        let m = Ket::minus();
        Self::unchecked(vec![
            ComplexMatrix::outer(p.debug_amplitudes(), p.debug_amplitudes()),
            ComplexMatrix::outer(m.debug_amplitudes(), m.debug_amplitudes()),
        ])
    }

    pub fn dim(&self) -> usize {
        self.operators[0].rows()
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// The effects `M_i†M_i`.
    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }
}

/// A trace-non-increasing channel in Kraus form.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    kraus: Vec<ComplexMatrix>,
}

impl SuperOperator {
    /// Validates `∑ E_i†E_i ≤ I`.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let report = validate_kraus(&kraus);
        if let Some(v) = report.violations.first() {
            return Err(match v.kind {
                ViolationKind::DimMismatch => QuantumError::DimMismatch {
                    expected: kraus[0].rows(),
                    found: 0,
                },
                _ => QuantumError::NotTraceNonIncreasing { excess: v.residual },
            });
        }
        Ok(Self { kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// `{√p I, √(1−p) X}`: `p` is the probability the bit survives.
    pub fn bit_flip(p: f64) -> Result<Self> {
        let keep = p.sqrt();
        let flip = (1.0 - p).sqrt();
        Self::new(vec![
            ComplexMatrix::from_real(2, 2, &[keep, 0.0, 0.0, keep])?,
            ComplexMatrix::from_real(2, 2, &[0.0, flip, flip, 0.0])?,
        ])
    }

    /// `{√(1−3p/4) I, √(p/4) X, √(p/4) Y, √(p/4) Z}`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        let a = (1.0 - 0.75 * p).sqrt();
        let b = (p / 4.0).sqrt();
        Self::new(vec![
            ComplexMatrix::from_real(2, 2, &[a, 0.0, 0.0, a])?,
            ComplexMatrix::from_real(2, 2, &[0.0, b, b, 0.0])?,
            ComplexMatrix::new(
                2,
                2,
                vec![c64(0.0, 0.0), c64(0.0, -b), c64(0.0, b), c64(0.0, 0.0)],
            )?,
            ComplexMatrix::from_real(2, 2, &[b, 0.0, 0.0, -b])?,
        ])
    }

    /// `{|0⟩⟨0| + √(1−γ)|1⟩⟨1|, √γ |0⟩⟨1|}`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        Self::new(vec![
            ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()])?,
            ComplexMatrix::from_real(2, 2, &[0.0, gamma.sqrt(), 0.0, 0.0])?,
        ])
    }

    /// The loop-example channel `{|0⟩⟨0| + |1⟩⟨1|/√2, |0⟩⟨1|/√2}`.
    pub fn qloop() -> Self {
        Self {
            kraus: vec![
                ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap(),
                ComplexMatrix::from_real(2, 2, &[0.0, FRAC_1_SQRT_2, 0.0, 0.0]).unwrap(),
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].rows()
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn is_trace_preserving(&self) -> bool {
        validate_measurement(&self.kraus).is_ok()
    }

    /// `∑ E_i ρ E_i†`.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.dim() {
            return Err(QuantumError::DimMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        let m = rho.debug_matrix();
        let out = self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(m.rows(), m.cols()), |acc, e| {
                &acc + &(&(e * m) * &e.adjoint())
            });
        Ok(DensityOperator::from_matrix_unchecked(out))
    }

    /// `∑ E_i ρ E_i†` with the channel on a subset of qubits.
    pub fn apply_on(&self, rho: &DensityOperator, targets: &[usize]) -> Result<DensityOperator> {
        let mut acc: Option<nalgebra::DMatrix<num_complex::Complex64>> = None;
        for e in &self.kraus {
            let term = rho.conjugate_on(e, targets)?;
            acc = Some(match acc {
                None => term.as_nalgebra().clone(),
                Some(a) => a + term.as_nalgebra(),
            });
        }
        Ok(DensityOperator::from_nalgebra_unchecked(acc.expect("at least one operator")))
    }
}
