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

use std::fmt::Write;

use super::{ChannelDef, Decl, GateDef, MeasDef, QubitRef, SourceProgram, Stmt};
use crate::quantum::{Complex64, ComplexMatrix};

/// Canonical source text: declarations first, then one statement per line.
pub fn pretty_print(p: &SourceProgram) -> String {
    let mut out = String::new();
    for d in &p.decls {
        out.push_str(&decl_to_string(d));
        out.push('\n');
    }
    if !p.decls.is_empty() {
        out.push('\n');
    }
    block(&mut out, &p.body, 0);
    out
}

/// Single-line rendering of a statement, e.g. `skip; skip;`.
pub fn stmt_to_string(s: &Stmt) -> String {
    let mut out = String::new();
    inline(&mut out, s);
    out.trim_end().to_string()
}

pub(crate) fn format_real(x: f64) -> String {
    format!("{x}")
}

pub(crate) fn format_complex(z: Complex64) -> String {
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => format_real(z.re),
        (true, false) => format!("{}i", format_real(z.im)),
        (false, false) if z.im < 0.0 => format!("{}-{}i", format_real(z.re), format_real(-z.im)),
        (false, false) => format!("{}+{}i", format_real(z.re), format_real(z.im)),
    }
}

pub(crate) fn format_matrix(m: &ComplexMatrix) -> String {
    let rows: Vec<String> = m
        .to_rows()
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|z| format_complex(*z)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn format_set(ms: &[ComplexMatrix]) -> String {
    let parts: Vec<String> = ms.iter().map(format_matrix).collect();
    format!("{{{}}}", parts.join(", "))
}

pub(crate) fn decl_to_string(d: &Decl) -> String {
    match d {
        Decl::Register { name, width: 1 } => format!("{name} : qubit;"),
        Decl::Register { name, width } => format!("{name} : qubit[{width}];"),
        Decl::Gate { name, def } => {
            let rhs = match def {
                GateDef::Library(l) => l.clone(),
                GateDef::Matrix(m) => format_matrix(m),
                GateDef::Diagonal(v) => {
                    let cells: Vec<String> = v.iter().map(|z| format_complex(*z)).collect();
                    format!("diag({})", cells.join(", "))
                }
            };
            format!("gate {name} = {rhs};")
        }
        Decl::Meas { name, def } => {
            let rhs = match def {
                MeasDef::Computational(1) => "computational".to_string(),
                MeasDef::Computational(n) => format!("computational({n})"),
                MeasDef::PlusMinus => "plusminus".to_string(),
                MeasDef::Operators(ops) => format_set(ops),
            };
            format!("meas {name} = {rhs};")
        }
        Decl::Channel { name, def } => {
            let rhs = match def {
                ChannelDef::Identity(1) => "identity".to_string(),
                ChannelDef::Identity(n) => format!("identity({n})"),
                ChannelDef::BitFlip(p) => format!("bit_flip({})", format_real(*p)),
                ChannelDef::Depolarizing(p) => format!("depolarizing({})", format_real(*p)),
                ChannelDef::AmplitudeDamping(g) => {
                    format!("amplitude_damping({})", format_real(*g))
                }
                ChannelDef::Kraus(ks) => format_set(ks),
            };
            format!("channel {name} = {rhs};")
        }
    }
}

fn refs(qs: &[QubitRef]) -> String {
    let parts: Vec<String> = qs.iter().map(|q| q.to_string()).collect();
    parts.join(", ")
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn block(out: &mut String, s: &Stmt, level: usize) {
    match s {
        Stmt::Seq(v) => v.iter().for_each(|s| block(out, s, level)),
        Stmt::Case {
            meas,
            qubits,
            branches,
        } => {
            indent(out, level);
            let _ = write!(out, "if {meas}[{}] = ", refs(qubits));
            for (k, b) in branches.iter().enumerate() {
                if k > 0 {
                    indent(out, level);
                    out.push_str("[] ");
                }
                let _ = writeln!(out, "{} ->", b.outcome);
                block(out, &b.body, level + 1);
            }
            indent(out, level);
            out.push_str("fi;\n");
        }
        Stmt::While {
            meas,
            qubits,
            body,
        } => {
            indent(out, level);
            let _ = writeln!(out, "while {meas}[{}] = 1 do", refs(qubits));
            block(out, body, level + 1);
            indent(out, level);
            out.push_str("od;\n");
        }
        simple => {
            indent(out, level);
            inline(out, simple);
            out.truncate(out.trim_end().len());
            out.push('\n');
        }
    }
}

fn inline(out: &mut String, s: &Stmt) {
    match s {
        Stmt::Skip => out.push_str("skip; "),
        Stmt::Init(q) => {
            let _ = write!(out, "{q} := |0>; ");
        }
        Stmt::Unitary { gate, qubits } => {
            let _ = write!(out, "{gate}[{}]; ", refs(qubits));
        }
        Stmt::Channel { channel, qubits } => {
            let _ = write!(out, "{channel}[{}]; ", refs(qubits));
        }
        Stmt::Seq(v) => v.iter().for_each(|s| inline(out, s)),
        Stmt::Case {
            meas,
            qubits,
            branches,
        } => {
            let _ = write!(out, "if {meas}[{}] = ", refs(qubits));
            for (k, b) in branches.iter().enumerate() {
                if k > 0 {
                    out.push_str("[] ");
                }
                let _ = write!(out, "{} -> ", b.outcome);
                inline(out, &b.body);
            }
            out.push_str("fi; ");
        }
        Stmt::While {
            meas,
            qubits,
            body,
        } => {
            let _ = write!(out, "while {meas}[{}] = 1 do ", refs(qubits));
            inline(out, body);
            out.push_str("od; ");
        }
    }
}
