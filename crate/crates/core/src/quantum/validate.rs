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

use std::fmt;

use super::matrix::{c64, residual_from_identity};
use super::{ComplexMatrix, PHYSICAL_TOL, UNITARY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ViolationKind {
    NotSquare,
    DimMismatch,
    NotUnitary,
    IncompleteMeasurement,
    NotTraceNonIncreasing,
    NotHermitian,
    NotPositive,
    TraceNotOne,
}

/// One failed invariant and how far off it was.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub residual: f64,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?}: {} (residual {:.3e})",
            self.kind, self.detail, self.residual
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: ViolationKind, residual: f64, detail: impl Into<String>) {
        self.violations.push(Violation {
            kind,
            residual,
            detail: detail.into(),
        });
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_unitary(u: &ComplexMatrix) -> ValidationReport {
    let mut report = ValidationReport::default();
    if !u.is_square() {
        report.push(
            ViolationKind::NotSquare,
            f64::INFINITY,
            format!("{}x{} matrix", u.rows(), u.cols()),
        );
        return report;
    }
    let residual = u.unitarity_residual();
    if residual > UNITARY_TOL {
        report.push(ViolationKind::NotUnitary, residual, "‖U†U − I‖");
    }
    report
}

fn same_square_dims(ops: &[ComplexMatrix], report: &mut ValidationReport) -> Option<usize> {
    let dim = ops.first()?.rows();
    for (i, op) in ops.iter().enumerate() {
        if op.rows() != dim || op.cols() != dim {
            report.push(
                ViolationKind::DimMismatch,
                f64::INFINITY,
                format!("operator {i} is {}x{}, expected {dim}x{dim}", op.rows(), op.cols()),
            );
            return None;
        }
    }
    Some(dim)
}

fn gram_sum(ops: &[ComplexMatrix], dim: usize) -> ComplexMatrix {
    ops.iter().fold(ComplexMatrix::zeros(dim, dim), |acc, op| {
        &acc + &(&op.adjoint() * op)
    })
}

/// Completeness `∑ M†M = I`.
pub fn validate_measurement(ops: &[ComplexMatrix]) -> ValidationReport {
    let mut report = ValidationReport::default();
    if ops.is_empty() {
        report.push(ViolationKind::IncompleteMeasurement, 1.0, "no operators");
        return report;
    }
    let Some(dim) = same_square_dims(ops, &mut report) else {
        return report;
    };
    let residual = residual_from_identity(gram_sum(ops, dim).as_nalgebra());
    if residual > PHYSICAL_TOL {
        report.push(ViolationKind::IncompleteMeasurement, residual, "‖I − ∑ M†M‖");
    }
    report
}

/// `∑ E†E ≤ I`, i.e. every eigenvalue of `I − ∑ E†E` is nonnegative.
pub fn validate_kraus(ops: &[ComplexMatrix]) -> ValidationReport {
    let mut report = ValidationReport::default();
    if ops.is_empty() {
        report.push(ViolationKind::NotTraceNonIncreasing, 1.0, "no operators");
        return report;
    }
    let Some(dim) = same_square_dims(ops, &mut report) else {
        return report;
    };
    let slack = &ComplexMatrix::identity(dim) - &gram_sum(ops, dim);
    let floor = slack.hermitian_eigenvalues()[0];
    if floor < -PHYSICAL_TOL {
        report.push(
            ViolationKind::NotTraceNonIncreasing,
            -floor,
            "smallest eigenvalue of I − ∑ E†E",
        );
    }
    report
}

/// Trace one, Hermitian, eigenvalue floor of the Hermitian part ≥ 0.
pub fn validate_density(rho: &ComplexMatrix) -> ValidationReport {
    let mut report = ValidationReport::default();
    if !rho.is_square() {
        report.push(
            ViolationKind::NotSquare,
            f64::INFINITY,
            format!("{}x{} matrix", rho.rows(), rho.cols()),
        );
        return report;
    }
    let tr = rho.trace();
    let trace_err = (tr - c64(1.0, 0.0)).norm();
    if trace_err > PHYSICAL_TOL {
        report.push(ViolationKind::TraceNotOne, trace_err, format!("trace {tr}"));
    }
    let herm = rho.hermiticity_residual();
    if herm > PHYSICAL_TOL {
        report.push(ViolationKind::NotHermitian, herm, "‖ρ − ρ†‖");
    }
    let floor = rho.hermitian_eigenvalues()[0];
    if floor < -PHYSICAL_TOL {
        report.push(ViolationKind::NotPositive, -floor, "smallest eigenvalue");
    }
    report
}
