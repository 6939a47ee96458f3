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

//! Dense complex matrices and the qubit-embedding kernels the rest of the
//! crate is built on.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{QuantumError, Result};

/// Shorthand for `Complex64::new`.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A dense complex matrix with at least one row and one column.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, row_major: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(QuantumError::EmptyMatrix);
        }
        if row_major.len() != rows * cols {
            return Err(QuantumError::DimMismatch {
                expected: rows * cols,
                found: row_major.len(),
            });
        }
        Ok(Self {
            data: DMatrix::from_row_slice(rows, cols, &row_major),
        })
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(QuantumError::DimMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, row_major: &[f64]) -> Result<Self> {
        Self::new(rows, cols, row_major.iter().map(|&x| c64(x, 0.0)).collect())
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: DMatrix::identity(dim.max(1), dim.max(1)),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: DMatrix::zeros(rows.max(1), cols.max(1)),
        }
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len().max(1);
        let mut data = DMatrix::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            data[(i, i)] = e;
        }
        Self { data }
    }

    /// The outer product `|a><b|` of two column vectors.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        let mut data = DMatrix::zeros(a.len().max(1), b.len().max(1));
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                data[(i, j)] = ai * bj.conj();
            }
        }
        Self { data }
    }

    pub(crate) fn from_nalgebra(data: DMatrix<Complex64>) -> Self {
        Self { data }
    }

    pub(crate) fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[(row, col)] = value;
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.data[(i, j)]);
            }
        }
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.data[(i, j)]).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            data: self.data.transpose(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            data: self.data.map(|z| z.conj()),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            data: &self.data * factor,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        let svd = self.data.clone().svd(false, false);
        svd.singular_values.iter().cloned().fold(0.0, f64::max)
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Checked product; fails when inner dimensions disagree.
    pub fn try_mul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols() != rhs.rows() {
            return Err(QuantumError::DimMismatch {
                expected: self.cols(),
                found: rhs.rows(),
            });
        }
        Ok(Self {
            data: &self.data * &rhs.data,
        })
    }

    /// Kronecker product. The left operand indexes the most significant part.
    pub fn kron(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        Self {
            data: self.data.kronecker(&rhs.data),
        }
    }

    /// `‖U†U − I‖_F`, or infinity for non-square input.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let prod = self.data.adjoint() * &self.data;
        residual_from_identity(&prod)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    /// `‖A − A†‖_F`.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.data - self.data.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Eigenvalues of the Hermitian part `(A + A†)/2`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.data + self.data.adjoint()) * c64(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().cloned().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    /// Complex Schur form `A = Q T Q†`; returns `(Q, T)`.
    ///
    /// Deflation uses a tolerance relative to the norm: with an absolute
    /// machine-epsilon tolerance the QR iteration can stall on
    /// near-multiples of the identity.
    pub fn schur(&self) -> (ComplexMatrix, ComplexMatrix) {
        let scale = self.data.norm().max(1.0);
        for tol in [4.0 * f64::EPSILON, 1e-13, 1e-11] {
            if let Some(s) = Schur::try_new(self.data.clone(), tol * scale, 10_000) {
                let (q, t) = s.unpack();
                return (Self { data: q }, Self { data: t });
            }
        }
        let (q, t) = Schur::new(self.data.clone()).unpack();
        (Self { data: q }, Self { data: t })
    }

    /// Eigenvalues read off the complex Schur form.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let (_, t) = self.schur();
        (0..t.rows()).map(|i| t.get(i, i)).collect()
    }

    pub fn determinant(&self) -> Complex64 {
        self.data.clone().determinant()
    }

    /// Sub-block copy.
    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> ComplexMatrix {
        Self {
            data: self.data.view((row, col), (rows, cols)).into_owned(),
        }
    }

    /// Block-diagonal matrix `diag(a, b)`.
    pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let (ra, ca) = (a.rows(), a.cols());
        let mut data = DMatrix::zeros(ra + b.rows(), ca + b.cols());
        data.view_mut((0, 0), (ra, ca)).copy_from(&a.data);
        data.view_mut((ra, ca), (b.rows(), b.cols()))
            .copy_from(&b.data);
        Self { data }
    }

    /// Distance between two unitaries, minimised over a global phase:
    /// `min_φ ‖A − e^{iφ} B‖` in operator norm.
    ///
    /// With `W = A†B` unitary, `‖A − e^{iφ}B‖ = max_k |1 − e^{i(φ+θ_k)}|` over the
    /// eigenphases `θ_k` of `W`; the optimum centres the smallest arc holding
    /// every eigenphase, giving `2 sin(w/4)` for arc width `w`.
    pub fn phase_invariant_distance(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.rows(), other.rows());
        let w = self.adjoint().try_mul(other).expect("square operands");
        let mut phases: Vec<f64> = w.eigenvalues().iter().map(|z| z.arg()).collect();
        phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = phases.len();
        // Largest circular gap between consecutive eigenphases.
        let mut max_gap = phases[0] + 2.0 * std::f64::consts::PI - phases[n - 1];
        for k in 1..n {
            max_gap = max_gap.max(phases[k] - phases[k - 1]);
        }
        let width = (2.0 * std::f64::consts::PI - max_gap).max(0.0);
        2.0 * (width / 4.0).sin()
    }

    /// Frobenius distance minimised over a global phase: the optimal phase
    /// is that of `tr(B†A)`.
    pub fn frobenius_distance_up_to_phase(&self, other: &ComplexMatrix) -> f64 {
        let overlap = (other.data.adjoint() * &self.data).trace();
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
        (&self.data - &other.data * phase).norm()
    }

    /// Expands an operator on `targets` (first target most significant) into
    /// the full `2^n_qubits` space.
    pub fn embed(&self, targets: &[usize], n_qubits: usize) -> Result<ComplexMatrix> {
        let dim = 1usize << n_qubits;
        let mut out = DMatrix::<Complex64>::identity(dim, dim);
        for col in out.as_mut_slice().chunks_mut(dim) {
            apply_to_qubits(self, targets, n_qubits, col)?;
        }
        Ok(Self { data: out })
    }
}

pub(crate) fn residual_from_identity(m: &DMatrix<Complex64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            acc += (m[(i, j)] - c64(target, 0.0)).norm_sqr();
        }
    }
    acc.sqrt()
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{:?}", self.to_rows())
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix dimensions must agree")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

/// Row-major `[[re, im], ...]` rows, the JSON matrix format used across the
/// toolchain.
#[derive(Serialize, Deserialize)]
struct MatrixRepr(Vec<Vec<[f64; 2]>>);

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr(
            self.to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        )
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let MatrixRepr(rows) = MatrixRepr::deserialize(d)?;
        let rows: Vec<Vec<Complex64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| c64(re, im)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Bit position (from the least significant end) of `qubit` in an
/// `n_qubits`-wide basis index. Qubit 0 is the most significant.
#[inline]
pub(crate) fn bit_of(qubit: usize, n_qubits: usize) -> usize {
    n_qubits - 1 - qubit
}

/// Offsets, within a full basis index, of every local basis state of the
/// target qubits (local index most significant = `targets[0]`).
pub(crate) fn local_offsets(targets: &[usize], n_qubits: usize) -> Vec<usize> {
    let k = targets.len();
    (0..1usize << k)
        .map(|local| {
            targets.iter().enumerate().fold(0, |acc, (pos, &q)| {
                if (local >> (k - 1 - pos)) & 1 == 1 {
                    acc | (1 << bit_of(q, n_qubits))
                } else {
                    acc
                }
            })
        })
        .collect()
}

pub(crate) fn check_targets(op: &ComplexMatrix, targets: &[usize], n_qubits: usize) -> Result<()> {
    if !op.is_square() || op.rows() != 1 << targets.len() {
        return Err(QuantumError::DimMismatch {
            expected: 1 << targets.len(),
            found: op.rows(),
        });
    }
    for (i, &q) in targets.iter().enumerate() {
        if q >= n_qubits {
            return Err(QuantumError::QubitOutOfRange { qubit: q, n_qubits });
        }
        if targets[..i].contains(&q) {
            return Err(QuantumError::DuplicateQubit(q));
        }
    }
    Ok(())
}

/// In-place `v ← (op on targets) v` for a state vector of `n_qubits` qubits.
pub(crate) fn apply_to_qubits(
    op: &ComplexMatrix,
    targets: &[usize],
    n_qubits: usize,
    v: &mut [Complex64],
) -> Result<()> {
    check_targets(op, targets, n_qubits)?;
    if v.len() != 1 << n_qubits {
        return Err(QuantumError::DimMismatch {
            expected: 1 << n_qubits,
            found: v.len(),
        });
    }
    let offsets = local_offsets(targets, n_qubits);
    let mask = offsets.iter().fold(0, |acc, o| acc | o);
    let k = offsets.len();
    let mut gathered = vec![Complex64::default(); k];
    for base in 0..v.len() {
        if base & mask != 0 {
            continue;
        }
        for (slot, off) in gathered.iter_mut().zip(&offsets) {
            *slot = v[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = Complex64::default();
            for (c, g) in gathered.iter().enumerate() {
                acc += op.data[(r, c)] * g;
            }
            v[base | off] = acc;
        }
    }
    Ok(())
}

/// `ρ ← O ρ O†` with `O` acting on `targets`.
pub(crate) fn conjugate_on_qubits(
    op: &ComplexMatrix,
    targets: &[usize],
    n_qubits: usize,
    rho: &mut DMatrix<Complex64>,
) -> Result<()> {
    let dim = rho.nrows();
    // Column-major storage: each column is a contiguous state vector.
    for col in rho.as_mut_slice().chunks_mut(dim) {
        apply_to_qubits(op, targets, n_qubits, col)?;
    }
    // (O X†)† = X O†
    let mut t = rho.adjoint();
    for col in t.as_mut_slice().chunks_mut(dim) {
        apply_to_qubits(op, targets, n_qubits, col)?;
    }
    *rho = t.adjoint();
    Ok(())
}
