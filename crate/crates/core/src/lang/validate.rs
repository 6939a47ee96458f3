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

use std::collections::HashSet;
use std::fmt;

use super::{report_to_issues, ChannelDef, Decl, GateDef, MeasDef, QubitRef, SourceProgram, Stmt};
use crate::quantum::{
    validate_kraus, validate_measurement, validate_unitary, ComplexMatrix, GateLibrary,
    MeasurementSet, SuperOperator, Violation, ViolationKind, MAX_QUBITS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum LangIssueKind {
    UndeclaredName,
    DuplicateName,
    DimensionError,
    DuplicateQubit,
    NotUnitary,
    IncompleteMeasurement,
    NotTraceNonIncreasing,
    InvalidParameter,
    GuardArity,
    OutcomeOutOfRange,
    DuplicateOutcome,
    CapacityExceeded,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LangIssue {
    pub kind: LangIssueKind,
    /// Declaration or statement the issue was found in.
    pub location: String,
    pub residual: Option<f64>,
    pub detail: String,
}

impl LangIssue {
    fn new(kind: LangIssueKind, location: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            kind,
            location: location.into(),
            residual: None,
            detail: detail.into(),
        }
    }

    pub(crate) fn from_violation(v: Violation, location: &str) -> Self {
        let kind = match v.kind {
            ViolationKind::NotUnitary => LangIssueKind::NotUnitary,
            ViolationKind::IncompleteMeasurement => LangIssueKind::IncompleteMeasurement,
            ViolationKind::NotTraceNonIncreasing => LangIssueKind::NotTraceNonIncreasing,
            _ => LangIssueKind::DimensionError,
        };
        Self {
            kind,
            location: location.to_string(),
            residual: Some(v.residual),
            detail: v.detail,
        }
    }
}

impl fmt::Display for LangIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} in {}: {}", self.kind, self.location, self.detail)?;
        if let Some(r) = self.residual {
            write!(f, " (residual {r:.3e})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct LangReport {
    pub issues: Vec<LangIssue>,
}

impl LangReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has(&self, kind: LangIssueKind) -> bool {
        self.issues.iter().any(|i| i.kind == kind)
    }
}

impl fmt::Display for LangReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        let lines: Vec<String> = self.issues.iter().map(|i| i.to_string()).collect();
        f.write_str(&lines.join("\n"))
    }
}

impl SourceProgram {
    /// The matrix a gate name denotes: a declaration, or a library gate.
    pub fn gate_matrix(&self, name: &str, lib: &GateLibrary) -> Option<ComplexMatrix> {
        match self.decl(name) {
            Some(Decl::Gate { def, .. }) => match def {
                GateDef::Library(l) => lib.get(l).cloned(),
                GateDef::Matrix(m) => Some(m.clone()),
                GateDef::Diagonal(d) => Some(ComplexMatrix::diagonal(d)),
            },
            Some(_) => None,
            None => lib.get(name).cloned(),
        }
    }

    /// Measurement operators for a declared name, unchecked.
    pub fn measurement_ops(&self, name: &str) -> Option<Vec<ComplexMatrix>> {
        match self.decl(name) {
            Some(Decl::Meas { def, .. }) => Some(match def {
                MeasDef::Computational(n) => MeasurementSet::computational(1 << n).operators().to_vec(),
                MeasDef::PlusMinus => MeasurementSet::plus_minus().operators().to_vec(),
                MeasDef::Operators(ops) => ops.clone(),
            }),
            _ => None,
        }
    }

    pub fn measurement(&self, name: &str) -> Option<MeasurementSet> {
        MeasurementSet::new(self.measurement_ops(name)?).ok()
    }

    /// Kraus operators for a declared channel, unchecked.
    pub fn channel_kraus(&self, name: &str) -> Option<Vec<ComplexMatrix>> {
        let def = match self.decl(name) {
            Some(Decl::Channel { def, .. }) => def,
            _ => return None,
        };
        let built = match def {
            ChannelDef::Identity(n) => Ok(SuperOperator::identity(1 << n)),
            ChannelDef::BitFlip(p) => SuperOperator::bit_flip(*p),
            ChannelDef::Depolarizing(p) => SuperOperator::depolarizing(*p),
            ChannelDef::AmplitudeDamping(g) => SuperOperator::amplitude_damping(*g),
            ChannelDef::Kraus(k) => return Some(k.clone()),
        };
        built.ok().map(|c| c.kraus().to_vec())
    }

    pub fn channel(&self, name: &str) -> Option<SuperOperator> {
        SuperOperator::new(self.channel_kraus(name)?).ok()
    }
}

/// Checks gate unitarity, measurement completeness, channel validity and the
/// arity of every application site.
pub fn validate(p: &SourceProgram, lib: &GateLibrary) -> LangReport {
    let mut issues = Vec::new();
    let mut names = HashSet::new();
    for d in &p.decls {
        let loc = format!("declaration of `{}`", d.name());
        if !names.insert(d.name()) {
            issues.push(LangIssue::new(LangIssueKind::DuplicateName, &loc, "declared twice"));
        }
        match d {
            Decl::Register { width, .. } => {
                if *width == 0 {
                    issues.push(LangIssue::new(LangIssueKind::DimensionError, &loc, "zero width"));
                }
            }
            Decl::Gate { def, name } => match def {
                GateDef::Library(l) if !lib.contains(l) => {
                    issues.push(LangIssue::new(
                        LangIssueKind::UndeclaredName,
                        &loc,
                        format!("no library gate `{l}`"),
                    ));
                }
                _ => {
                    let m = p.gate_matrix(name, lib).expect("declared gate");
                    if !m.rows().is_power_of_two() {
                        issues.push(LangIssue::new(
                            LangIssueKind::DimensionError,
                            &loc,
                            "dimension is not a power of two",
                        ));
                    }
                    issues.extend(report_to_issues(validate_unitary(&m), &loc));
                }
            },
            Decl::Meas { def, name } => {
                if let MeasDef::Computational(n) = def {
                    if *n == 0 || *n > MAX_QUBITS {
                        issues.push(LangIssue::new(LangIssueKind::DimensionError, &loc, "qubit count out of range"));
                        continue;
                    }
                }
                let ops = p.measurement_ops(name).expect("declared measurement");
                issues.extend(report_to_issues(validate_measurement(&ops), &loc));
            }
            Decl::Channel { def, name } => {
                let param = match def {
                    ChannelDef::BitFlip(x) | ChannelDef::Depolarizing(x) | ChannelDef::AmplitudeDamping(x) => Some(*x),
                    _ => None,
                };
                if param.is_some_and(|x| !(0.0..=1.0).contains(&x)) {
                    issues.push(LangIssue::new(LangIssueKind::InvalidParameter, &loc, "parameter outside [0, 1]"));
                    continue;
                }
                if let ChannelDef::Kraus(k) = def {
                    issues.extend(report_to_issues(validate_kraus(k), &loc));
                } else if p.channel_kraus(name).is_none() {
                    issues.push(LangIssue::new(LangIssueKind::InvalidParameter, &loc, "invalid channel"));
                }
            }
        }
    }
    let n = p.n_qubits();
    if n > MAX_QUBITS {
        issues.push(LangIssue::new(
            LangIssueKind::CapacityExceeded,
            "registers",
            format!("{n} qubits exceeds the limit of {MAX_QUBITS}"),
        ));
    }
    let mut site = 0;
    check_stmt(p, lib, &p.body, &mut site, &mut issues);
    LangReport { issues }
}

fn operand_dim(p: &SourceProgram, qs: &[QubitRef], loc: &str, issues: &mut Vec<LangIssue>) -> Option<usize> {
    let mut seen = HashSet::new();
    let mut width = 0usize;
    for q in qs {
        let Some(idx) = p.qubit_indices(q) else {
            let kind = if p.registers().iter().any(|(n, _)| *n == q.register) {
                LangIssueKind::DimensionError
            } else {
                LangIssueKind::UndeclaredName
            };
            issues.push(LangIssue::new(kind, loc, format!("bad qubit reference `{q}`")));
            return None;
        };
        for i in idx {
            if !seen.insert(i) {
                issues.push(LangIssue::new(LangIssueKind::DuplicateQubit, loc, format!("qubit {i} used twice")));
                return None;
            }
            width += 1;
        }
    }
    if qs.is_empty() || width >= usize::BITS as usize {
        issues.push(LangIssue::new(LangIssueKind::DimensionError, loc, "empty operand list"));
        return None;
    }
    Some(1 << width)
}

fn check_stmt(p: &SourceProgram, lib: &GateLibrary, s: &Stmt, site: &mut usize, issues: &mut Vec<LangIssue>) {
    let dim_issue = |loc: &str, what: &str, dim: usize, want: usize| {
        LangIssue::new(
            LangIssueKind::DimensionError,
            loc,
            format!("{what} has dimension {dim} but its operands span dimension {want}"),
        )
    };
    match s {
        Stmt::Skip => {}
        Stmt::Init(q) => {
            let loc = format!("{q} := |0>");
            operand_dim(p, std::slice::from_ref(q), &loc, issues);
        }
        Stmt::Unitary { gate, qubits } => {
            let loc = super::stmt_to_string(s);
            let want = operand_dim(p, qubits, &loc, issues);
            match p.gate_matrix(gate, lib) {
                None => issues.push(LangIssue::new(LangIssueKind::UndeclaredName, &loc, format!("no gate `{gate}`"))),
                Some(m) => {
                    if let Some(w) = want.filter(|w| *w != m.rows()) {
                        issues.push(dim_issue(&loc, gate, m.rows(), w));
                    }
                }
            }
        }
        Stmt::Channel { channel, qubits } => {
            let loc = super::stmt_to_string(s);
            let want = operand_dim(p, qubits, &loc, issues);
            match p.channel_kraus(channel) {
                None => issues.push(LangIssue::new(LangIssueKind::UndeclaredName, &loc, format!("no channel `{channel}`"))),
                Some(k) => {
                    if let Some(w) = want.filter(|w| *w != k[0].rows()) {
                        issues.push(dim_issue(&loc, channel, k[0].rows(), w));
                    }
                }
            }
        }
        Stmt::Seq(v) => v.iter().for_each(|s| check_stmt(p, lib, s, site, issues)),
        Stmt::Case { meas, qubits, branches } => {
            let loc = format!("case site {}", *site);
            *site += 1;
            let count = check_meas(p, meas, qubits, &loc, issues);
            let mut seen = HashSet::new();
            for b in branches {
                if !seen.insert(b.outcome) {
                    issues.push(LangIssue::new(LangIssueKind::DuplicateOutcome, &loc, format!("outcome {}", b.outcome)));
                }
                if count.is_some_and(|c| b.outcome >= c) {
                    issues.push(LangIssue::new(LangIssueKind::OutcomeOutOfRange, &loc, format!("outcome {}", b.outcome)));
                }
                check_stmt(p, lib, &b.body, site, issues);
            }
        }
        Stmt::While { meas, qubits, body } => {
            let loc = format!("loop site {}", *site);
            *site += 1;
            if let Some(c) = check_meas(p, meas, qubits, &loc, issues) {
                if c != 2 {
                    issues.push(LangIssue::new(
                        LangIssueKind::GuardArity,
                        &loc,
                        format!("guard `{meas}` has {c} outcomes, needs 2"),
                    ));
                }
            }
            check_stmt(p, lib, body, site, issues);
        }
    }
}

fn check_meas(p: &SourceProgram, meas: &str, qubits: &[QubitRef], loc: &str, issues: &mut Vec<LangIssue>) -> Option<usize> {
    let want = operand_dim(p, qubits, loc, issues);
    let Some(ops) = p.measurement_ops(meas) else {
        issues.push(LangIssue::new(LangIssueKind::UndeclaredName, loc, format!("no measurement `{meas}`")));
        return None;
    };
    if let Some(w) = want.filter(|w| *w != ops[0].rows()) {
        issues.push(LangIssue::new(
            LangIssueKind::DimensionError,
            loc,
            format!("`{meas}` has dimension {} but its operands span dimension {w}", ops[0].rows()),
        ));
    }
    Some(ops.len())
}

