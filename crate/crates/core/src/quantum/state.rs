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

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::{apply_to_qubits, c64, check_targets, conjugate_on_qubits, local_offsets};
use super::{
    qubit_count, validate_density, ComplexMatrix, MeasurementSet, QuantumError, Result,
    SuperOperator, MAX_QUBITS, PHYSICAL_TOL, UNITARY_TOL, ZERO_PROBABILITY,
};

/// A normalized pure state of arbitrary (finite) dimension.
///
/// Amplitudes are not part of the observable API: simulation code sees a
/// ket only through measurement. [`Ket::debug_amplitudes`] exists for tests
/// and diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amplitudes: Vec<Complex64>,
}

/// Returns `v / ‖v‖`.
pub fn normalize(v: &[Complex64]) -> Result<Ket> {
    Ket::new(v.to_vec())
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner_product(a: &Ket, b: &Ket) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(QuantumError::DimMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

impl Ket {
    /// Normalizes the given amplitudes.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.is_empty() || amplitudes.iter().all(|z| z.norm() < 1e-12) {
            return Err(QuantumError::ZeroVector);
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// Computational basis state `|index⟩` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(QuantumError::DimMismatch {
                expected: dim,
                found: index,
            });
        }
        let mut amplitudes = vec![Complex64::default(); dim];
        amplitudes[index] = c64(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(1 << n_qubits, 0).expect("index 0 always valid")
    }

    pub fn plus() -> Self {
        Self {
            amplitudes: vec![c64(FRAC_1_SQRT_2, 0.0), c64(FRAC_1_SQRT_2, 0.0)],
        }
    }

    pub fn minus() -> Self {
        Self {
            amplitudes: vec![c64(FRAC_1_SQRT_2, 0.0), c64(-FRAC_1_SQRT_2, 0.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Raw amplitudes. Debug/diagnostic access only.
    pub fn debug_amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// The conjugate transpose `⟨ψ|`, as a row of amplitudes.
    pub fn bra(&self) -> Vec<Complex64> {
        self.amplitudes.iter().map(|z| z.conj()).collect()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    /// Applies a unitary to a subset of qubits (first target most
    /// significant).
    pub fn apply_unitary_on(&self, u: &ComplexMatrix, targets: &[usize]) -> Result<Self> {
        let residual = u.unitarity_residual();
        if residual > UNITARY_TOL {
            return Err(QuantumError::NotUnitary { residual });
        }
        let n = qubit_count(self.dim())?;
        let mut amplitudes = self.amplitudes.clone();
        apply_to_qubits(u, targets, n, &mut amplitudes)?;
        Ket::new(amplitudes)
    }

    fn unnormalized_branch(&self, op: &ComplexMatrix) -> Result<Vec<Complex64>> {
        if op.cols() != self.dim() {
            return Err(QuantumError::DimMismatch {
                expected: self.dim(),
                found: op.cols(),
            });
        }
        Ok((0..op.rows())
            .map(|i| {
                (0..op.cols())
                    .map(|j| op.get(i, j) * self.amplitudes[j])
                    .sum()
            })
            .collect())
    }
}

/// Operations shared by pure and mixed states.
pub trait QuantumState: Sized {
    fn dim(&self) -> usize;

    /// `U|ψ⟩` or `UρU†`.
    fn apply_unitary(&self, u: &ComplexMatrix) -> Result<Self>;

    /// Outcome probabilities of a complete measurement.
    fn measurement_probabilities(&self, m: &MeasurementSet) -> Result<Vec<f64>>;

    /// The renormalized state after observing `outcome`.
    fn post_measurement_state(&self, m: &MeasurementSet, outcome: usize) -> Result<Self>;
}

fn check_unitary(u: &ComplexMatrix, dim: usize) -> Result<()> {
    if u.rows() != dim || u.cols() != dim {
        return Err(QuantumError::DimMismatch {
            expected: dim,
            found: u.rows(),
        });
    }
    let residual = u.unitarity_residual();
    if residual > UNITARY_TOL {
        return Err(QuantumError::NotUnitary { residual });
    }
    Ok(())
}

fn check_measurement(m: &MeasurementSet, dim: usize, outcome: Option<usize>) -> Result<()> {
    if m.dim() != dim {
        return Err(QuantumError::DimMismatch {
            expected: dim,
            found: m.dim(),
        });
    }
    if let Some(outcome) = outcome {
        if outcome >= m.len() {
            return Err(QuantumError::OutcomeOutOfRange {
                outcome,
                count: m.len(),
            });
        }
    }
    Ok(())
}

impl QuantumState for Ket {
    fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    fn apply_unitary(&self, u: &ComplexMatrix) -> Result<Self> {
        check_unitary(u, self.dim())?;
        Ket::new(self.unnormalized_branch(u)?)
    }

    fn measurement_probabilities(&self, m: &MeasurementSet) -> Result<Vec<f64>> {
        check_measurement(m, self.dim(), None)?;
        m.operators()
            .iter()
            .map(|op| {
                Ok(self
                    .unnormalized_branch(op)?
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum())
            })
            .collect()
    }

    fn post_measurement_state(&self, m: &MeasurementSet, outcome: usize) -> Result<Self> {
        check_measurement(m, self.dim(), Some(outcome))?;
        let branch = self.unnormalized_branch(&m.operators()[outcome])?;
        let p: f64 = branch.iter().map(|z| z.norm_sqr()).sum();
        if p < ZERO_PROBABILITY {
            return Err(QuantumError::ZeroProbabilityOutcome(outcome));
        }
        Ket::new(branch)
    }
}

/// A positive, trace-one operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates a matrix as a density operator.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let report = validate_density(&matrix);
        if let Some(v) = report.violations.first() {
            return Err(QuantumError::InvalidDensity(v.to_string()));
        }
        Ok(Self { matrix })
    }

    /// `|0…0⟩⟨0…0|` on `n_qubits` qubits.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(QuantumError::CapacityExceeded {
                n_qubits,
                max: MAX_QUBITS,
            });
        }
        let dim = 1 << n_qubits;
        let mut matrix = ComplexMatrix::zeros(dim, dim);
        matrix.set(0, 0, c64(1.0, 0.0));
        Ok(Self { matrix })
    }

    /// `∑ p_k ρ_k` over the ensemble.
    pub fn from_ensemble(ensemble: &Ensemble) -> Result<Self> {
        let dim = ensemble.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (p, rho) in &ensemble.entries {
            acc = &acc + &rho.matrix.scale(c64(*p, 0.0));
        }
        Ok(Self { matrix: acc })
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub(crate) fn from_nalgebra_unchecked(data: DMatrix<Complex64>) -> Self {
        Self {
            matrix: ComplexMatrix::from_nalgebra(data),
        }
    }

    pub(crate) fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        self.matrix.as_nalgebra()
    }

    /// The underlying matrix. Debug/diagnostic access only.
    pub fn debug_matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Frobenius distance to another operator.
    pub fn distance(&self, other: &DensityOperator) -> f64 {
        (&self.matrix - &other.matrix).frobenius_norm()
    }

    /// Diagonal in the computational basis.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.matrix.rows())
            .map(|i| self.matrix.get(i, i).re)
            .collect()
    }

    pub fn apply_superoperator(&self, chan: &SuperOperator) -> Result<Self> {
        chan.apply(self)
    }

    /// `U ρ U†` with `U` on a subset of qubits.
    pub fn apply_unitary_on(&self, u: &ComplexMatrix, targets: &[usize]) -> Result<Self> {
        let residual = u.unitarity_residual();
        if residual > UNITARY_TOL {
            return Err(QuantumError::NotUnitary { residual });
        }
        self.conjugate_on(u, targets)
    }

    /// `O ρ O†` with an arbitrary operator on a subset of qubits; not
    /// renormalized.
    pub(crate) fn conjugate_on(&self, op: &ComplexMatrix, targets: &[usize]) -> Result<Self> {
        let n = qubit_count(self.dim())?;
        let mut data = self.matrix.as_nalgebra().clone();
        conjugate_on_qubits(op, targets, n, &mut data)?;
        Ok(Self::from_nalgebra_unchecked(data))
    }

    /// Partial trace keeping `targets`, in the order given.
    pub fn reduced(&self, targets: &[usize]) -> Result<ComplexMatrix> {
        let n = qubit_count(self.dim())?;
        check_targets(&ComplexMatrix::identity(1 << targets.len()), targets, n)?;
        let offsets = local_offsets(targets, n);
        let mask = offsets.iter().fold(0, |acc, o| acc | o);
        let k = offsets.len();
        let rho = self.matrix.as_nalgebra();
        let mut out = DMatrix::<Complex64>::zeros(k, k);
        for base in (0..self.dim()).filter(|b| b & mask == 0) {
            for (a, oa) in offsets.iter().enumerate() {
                for (b, ob) in offsets.iter().enumerate() {
                    out[(a, b)] += rho[(base | oa, base | ob)];
                }
            }
        }
        Ok(ComplexMatrix::from_nalgebra(out))
    }

    /// Outcome probabilities `tr(M_i†M_i ρ)` for a measurement on `targets`,
    /// clamped at zero.
    pub fn probabilities_on(&self, m: &MeasurementSet, targets: &[usize]) -> Result<Vec<f64>> {
        check_measurement(m, 1 << targets.len(), None)?;
        let red = self.reduced(targets)?;
        let red = red.as_nalgebra();
        Ok(m.effects()
            .iter()
            .map(|e| {
                let e = e.as_nalgebra();
                let mut acc = Complex64::default();
                for i in 0..e.nrows() {
                    for j in 0..e.ncols() {
                        acc += e[(i, j)] * red[(j, i)];
                    }
                }
                acc.re.max(0.0)
            })
            .collect())
    }

    /// Normalized `M_i ρ M_i† / p_i` for a measurement on `targets`, with
    /// `p_i`.
    pub fn post_measurement_on(
        &self,
        m: &MeasurementSet,
        targets: &[usize],
        outcome: usize,
    ) -> Result<(Self, f64)> {
        check_measurement(m, 1 << targets.len(), Some(outcome))?;
        let branch = self.conjugate_on(&m.operators()[outcome], targets)?;
        let p = branch.trace();
        if p < ZERO_PROBABILITY {
            return Err(QuantumError::ZeroProbabilityOutcome(outcome));
        }
        Ok((
            Self {
                matrix: branch.matrix.scale(c64(1.0 / p, 0.0)),
            },
            p,
        ))
    }

    /// Resets each listed qubit to `|0⟩` via `|0⟩⟨0|ρ|0⟩⟨0| + |0⟩⟨1|ρ|1⟩⟨0|`,
    /// least significant qubit first.
    pub fn init_qubits(&self, qubits: &[usize]) -> Result<Self> {
        let n = qubit_count(self.dim())?;
        let k0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0])?;
        let k1 = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0])?;
        let mut order = qubits.to_vec();
        order.sort_unstable_by(|a, b| b.cmp(a));
        let mut rho = self.matrix.as_nalgebra().clone();
        for q in order {
            let mut a = rho.clone();
            conjugate_on_qubits(&k0, &[q], n, &mut a)?;
            conjugate_on_qubits(&k1, &[q], n, &mut rho)?;
            rho += a;
        }
        Ok(Self::from_nalgebra_unchecked(rho))
    }

    /// Stable content hash of the state rounded to `1e-9`, used to match
    /// terminal states between engines.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for z in self.matrix.to_row_major() {
            ((z.re * 1e9).round() as i64).hash(&mut h);
            ((z.im * 1e9).round() as i64).hash(&mut h);
        }
        h.finish()
    }
}

impl QuantumState for DensityOperator {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn apply_unitary(&self, u: &ComplexMatrix) -> Result<Self> {
        check_unitary(u, self.dim())?;
        let m = &(u * &self.matrix) * &u.adjoint();
        Ok(Self { matrix: m })
    }

    fn measurement_probabilities(&self, m: &MeasurementSet) -> Result<Vec<f64>> {
        check_measurement(m, self.dim(), None)?;
        Ok(m.operators()
            .iter()
            .map(|op| (&(&op.adjoint() * op) * &self.matrix).trace().re.max(0.0))
            .collect())
    }

    fn post_measurement_state(&self, m: &MeasurementSet, outcome: usize) -> Result<Self> {
        check_measurement(m, self.dim(), Some(outcome))?;
        let op = &m.operators()[outcome];
        let branch = &(op * &self.matrix) * &op.adjoint();
        let p = branch.trace().re;
        if p < ZERO_PROBABILITY {
            return Err(QuantumError::ZeroProbabilityOutcome(outcome));
        }
        Ok(Self {
            matrix: branch.scale(c64(1.0 / p, 0.0)),
        })
    }
}

/// Probabilities paired with states; materialized into a single density
/// operator on construction of a mixed state.
#[derive(Clone, Debug)]
pub struct Ensemble {
    entries: Vec<(f64, DensityOperator)>,
}

impl Ensemble {
    pub fn new(entries: Vec<(f64, DensityOperator)>) -> Result<Self> {
        let sum: f64 = entries.iter().map(|(p, _)| p).sum();
        let bad_p = entries.iter().any(|(p, _)| !(0.0..=1.0).contains(p));
        if entries.is_empty() || bad_p || (sum - 1.0).abs() > PHYSICAL_TOL {
            return Err(QuantumError::InvalidEnsemble { sum });
        }
        let dim = entries[0].1.dim();
        if let Some((_, r)) = entries.iter().find(|(_, r)| r.dim() != dim) {
            return Err(QuantumError::DimMismatch {
                expected: dim,
                found: r.dim(),
            });
        }
        Ok(Self { entries })
    }

    pub fn from_kets(entries: Vec<(f64, Ket)>) -> Result<Self> {
        Self::new(
            entries
                .into_iter()
                .map(|(p, k)| (p, k.to_density()))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.entries[0].1.dim()
    }
}

/// Kronecker product, leftmost operand most significant.
pub trait Tensor {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for ComplexMatrix {
    fn tensor(&self, other: &Self) -> Self {
        self.kron(other)
    }
}

impl Tensor for Ket {
    fn tensor(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ket { amplitudes }
    }
}

impl Tensor for DensityOperator {
    fn tensor(&self, other: &Self) -> Self {
        DensityOperator {
            matrix: self.matrix.kron(&other.matrix),
        }
    }
}
