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

//! f-QASM: a flat instruction set with classical registers, one flag
//! register `fr1` and labelled jumps, a compiler from while-programs, a
//! line-oriented text format and a virtual machine.
//!
//! Canonical text, one instruction per line:
//!
//! ```text
//! q1 : qubit;                 // header: while-language declarations
//! meas M = computational;
//!
//! L1:
//! MOV(r1,{M}(q1));            // measure q1 with M, store the outcome in r1
//! CMP(r1,0);                  // fr1 := (r1 == 0)
//! JE L2;                      // jump if fr1 = 1
//! xGate(q1,0);                // gate X, tag 0 = basic gate
//! JMP L1;
//! L2:
//! ```
//!
//! Other accepted forms: `APPLY x q1 0`, `XGate(q1)` (tag inferred),
//! `r2 := {M}(q1);` followed by `MOV(r1,r2);`, a missing trailing `;`,
//! `SUPOP(E,q1);` for channels and `BASIC(H,X);` to override the basic set.

mod check;
mod compile;
mod text;
mod vm;


use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::lang::{Decl, LangError, QubitRef};
use crate::quantum::{GateLibrary, QuantumError};
use crate::sim::SimError;

pub use check::{check_equivalence, EquivalenceReport};
pub use compile::{compile, compile_with};
pub use text::parse_fqasm;
pub use vm::{vm_distribution, vm_run, vm_run_with, vm_shots, Vm};

/// Second operand of `CMP`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Reg(String),
    Lit(u64),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Reg(r) => f.write_str(r),
            Operand::Lit(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instruction {
    Init(QubitRef),
    /// `num` is 0 for gates in the basic set and 1 otherwise.
    Apply {
        gate: String,
        qubits: Vec<QubitRef>,
        num: u32,
    },
    SupOp {
        channel: String,
        qubits: Vec<QubitRef>,
    },
    /// `MOV(r,{M}(q))`: measure and store the outcome in `r`.
    MeasMov {
        reg: String,
        meas: String,
        qubits: Vec<QubitRef>,
    },
    /// `r := {M}(q)`, the unfused form.
    Measure {
        reg: String,
        meas: String,
        qubits: Vec<QubitRef>,
    },
    /// Copies `src` into `dst` and leaves `src` unset.
    Mov { dst: String, src: String },
    Cmp { reg: String, operand: Operand },
    Jmp(String),
    Je(String),
    Label(String),
}

impl Instruction {
    pub fn is_measurement(&self) -> bool {
        matches!(self, Instruction::MeasMov { .. } | Instruction::Measure { .. })
    }

    fn jump_target(&self) -> Option<&str> {
        match self {
            Instruction::Jmp(l) | Instruction::Je(l) => Some(l),
            _ => None,
        }
    }

    fn qubit_refs(&self) -> &[QubitRef] {
        match self {
            Instruction::Init(q) => std::slice::from_ref(q),
            Instruction::Apply { qubits, .. }
            | Instruction::SupOp { qubits, .. }
            | Instruction::MeasMov { qubits, .. }
            | Instruction::Measure { qubits, .. } => qubits,
            _ => &[],
        }
    }
}

fn join_refs(qs: &[QubitRef]) -> String {
    qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Init(q) => write!(f, "INIT({q});"),
            Instruction::Apply { gate, qubits, num } => {
                write!(f, "{}Gate({},{num});", gate.to_lowercase(), join_refs(qubits))
            }
            Instruction::SupOp { channel, qubits } => {
                write!(f, "SUPOP({channel},{});", join_refs(qubits))
            }
            Instruction::MeasMov { reg, meas, qubits } => {
                write!(f, "MOV({reg},{{{meas}}}({}));", join_refs(qubits))
            }
            Instruction::Measure { reg, meas, qubits } => {
                write!(f, "{reg} := {{{meas}}}({});", join_refs(qubits))
            }
            Instruction::Mov { dst, src } => write!(f, "MOV({dst},{src});"),
            Instruction::Cmp { reg, operand } => write!(f, "CMP({reg},{operand});"),
            Instruction::Jmp(l) => write!(f, "JMP {l};"),
            Instruction::Je(l) => write!(f, "JE {l};"),
            Instruction::Label(l) => write!(f, "{l}:"),
        }
    }
}

/// Declarations (registers, gates, measurements, channels) plus code.
/// Register declarations fix the global qubit order.
#[derive(Debug, Clone, PartialEq)]
pub struct FqasmProgram {
    pub decls: Vec<Decl>,
    /// Gate names that may carry tag 0.
    pub basic: BTreeSet<String>,
    pub instructions: Vec<Instruction>,
}

/// Every gate of the standard library.
pub fn default_basic_set() -> BTreeSet<String> {
    GateLibrary::standard().names().map(String::from).collect()
}

impl FqasmProgram {
    /// Quantum registers as `(name, width)` in declaration order.
    pub fn registers(&self) -> Vec<(&str, usize)> {
        self.decls
            .iter()
            .filter_map(|d| match d {
                Decl::Register { name, width } => Some((name.as_str(), *width)),
                _ => None,
            })
            .collect()
    }

    /// Classical registers in order of first appearance.
    pub fn classical_registers(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for ins in &self.instructions {
            let regs: Vec<&str> = match ins {
                Instruction::MeasMov { reg, .. } | Instruction::Measure { reg, .. } => vec![reg],
                Instruction::Mov { dst, src } => vec![dst, src],
                Instruction::Cmp { reg, operand: Operand::Reg(r2) } => vec![reg, r2],
                Instruction::Cmp { reg, .. } => vec![reg],
                _ => vec![],
            };
            for r in regs {
                if !seen.contains(&r) {
                    seen.push(r);
                }
            }
        }
        seen
    }

    /// Instructions only, one per line.
    pub fn listing(&self) -> String {
        self.instructions.iter().map(|i| format!("{i}\n")).collect()
    }

    /// Header declarations, an optional `BASIC` line, a blank line, then the
    /// listing.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for d in &self.decls {
            out.push_str(&crate::lang::decl_to_string(d));
            out.push('\n');
        }
        if self.basic != default_basic_set() {
            let names: Vec<&str> = self.basic.iter().map(String::as_str).collect();
            out.push_str(&format!("BASIC({});\n", names.join(",")));
        }
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&self.listing());
        out
    }

    /// Structural checks: labels unique, jump targets present, registers
    /// declared and well named, tag 0 only on basic gates. `lines` maps
    /// instruction index to source line (1-based) for error messages.
    pub(crate) fn check(&self, lines: Option<&[usize]>) -> Result<()> {
        let line = |i: usize| lines.map_or(i + 1, |l| l[i]);
        let mut labels = HashSet::new();
        for (i, ins) in self.instructions.iter().enumerate() {
            if let Instruction::Label(l) = ins {
                if !labels.insert(l.as_str()) {
                    return Err(FqasmError::DuplicateLabel { line: line(i), label: l.clone() });
                }
            }
        }
        let regs: HashMap<&str, usize> = self.registers().into_iter().collect();
        for (i, ins) in self.instructions.iter().enumerate() {
            if let Some(l) = ins.jump_target() {
                if !labels.contains(l) {
                    return Err(FqasmError::UnknownLabel { line: line(i), label: l.to_string() });
                }
            }
            for q in ins.qubit_refs() {
                match (regs.get(q.register.as_str()), q.index) {
                    (Some(_), None) => {}
                    (Some(w), Some(k)) if k < *w => {}
                    _ => {
                        return Err(FqasmError::UnknownRegister { line: line(i), name: q.to_string() })
                    }
                }
            }
            if let Instruction::Apply { gate, num: 0, .. } = ins {
                if !self.basic.contains(gate) {
                    return Err(FqasmError::NotBasic { line: line(i), gate: gate.clone() });
                }
            }
        }
        for r in self.classical_registers() {
            if !is_classical_register(r) {
                return Err(FqasmError::UnknownRegister { line: 0, name: r.to_string() });
            }
        }
        Ok(())
    }
}

/// `r`, `r1`, `r2`, ...
pub(crate) fn is_classical_register(s: &str) -> bool {
    s.strip_prefix('r').is_some_and(|d| d.chars().all(|c| c.is_ascii_digit()))
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FqasmError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown register `{name}`")]
    UnknownRegister { line: usize, name: String },
    #[error("line {line}: duplicate label `{label}`")]
    DuplicateLabel { line: usize, label: String },
    #[error("line {line}: jump to undefined label `{label}`")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: gate `{gate}` tagged 0 but not in the basic set")]
    NotBasic { line: usize, gate: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("instruction {pc}: `{op}` acts on {got} qubits, operator needs {want}")]
    Dimension { pc: usize, op: String, got: usize, want: usize },
    #[error("instruction {pc}: read of unset register `{reg}`")]
    UninitializedRegisterRead { pc: usize, reg: String },
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl From<QuantumError> for FqasmError {
    fn from(e: QuantumError) -> Self {
        FqasmError::Sim(e.into())
    }
}

pub type Result<T> = std::result::Result<T, FqasmError>;
