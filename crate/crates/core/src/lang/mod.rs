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

//! The quantum while-language: abstract syntax, a concrete grammar, a
//! pretty-printer and a validator.
//!
//! ```text
//! program  := { decl | stmt }
//! decl     := IDENT ':' 'qubit' [ '[' INT ']' ] ';'
//!           | 'gate' IDENT '=' ( IDENT | matrix | 'diag' '(' expr { ',' expr } ')' ) ';'
//!           | 'meas' IDENT '=' ( 'computational' [ '(' INT ')' ] | 'plusminus' | '{' matrix { ',' matrix } '}' ) ';'
//!           | 'channel' IDENT '=' ( 'identity' [ '(' INT ')' ] | 'bit_flip' '(' expr ')'
//!                                 | 'depolarizing' '(' expr ')' | 'amplitude_damping' '(' expr ')'
//!                                 | '{' matrix { ',' matrix } '}' ) ';'
//! stmt     := 'skip' ';'
//!           | qref ':=' '|0>' ';'
//!           | IDENT '[' qrefs ']' ';'
//!           | 'if' IDENT '[' qrefs ']' '=' [ branch { '[]' branch } ] 'fi' [ ';' ]
//!           | 'while' IDENT '[' qrefs ']' '=' '1' 'do' { stmt } 'od' [ ';' ]
//! branch   := INT '->' { stmt }
//! qref     := IDENT [ '[' INT ']' ]
//! matrix   := '[' row { ',' row } ']'     row := '[' expr { ',' expr } ']'
//! expr     := complex arithmetic over numbers, 'i', 'pi', sqrt/exp/cos/sin, + - * / ( )
//! ```
//!
//! `//` starts a comment. Library gates (`H`, `X`, `CNOT`, ...) need no
//! declaration. `NAME[q]` applies a gate or a channel depending on how
//! `NAME` was declared.

pub mod generate;
mod lexer;
mod parser;
mod printer;
mod validate;

#[cfg(test)]
mod tests;

use std::fmt;

use crate::quantum::{ComplexMatrix, Complex64, ValidationReport};

pub use parser::parse;
pub use printer::{pretty_print, stmt_to_string};
pub(crate) use printer::decl_to_string;
pub use validate::{validate, LangIssue, LangIssueKind, LangReport};

/// One qubit of a register (`q[2]`) or a whole register (`q`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QubitRef {
    pub register: String,
    pub index: Option<usize>,
}

impl QubitRef {
    pub fn whole(register: impl Into<String>) -> Self {
        Self {
            register: register.into(),
            index: None,
        }
    }

    pub fn at(register: impl Into<String>, index: usize) -> Self {
        Self {
            register: register.into(),
            index: Some(index),
        }
    }
}

impl fmt::Display for QubitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}[{}]", self.register, i),
            None => f.write_str(&self.register),
        }
    }
}

/// A case branch: the body runs when the measurement yields `outcome`.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub outcome: usize,
    pub body: Stmt,
}

/// Program statements. A `While` always continues on outcome 1 and exits
/// on outcome 0.
#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Skip,
    Init(QubitRef),
    Unitary {
        gate: String,
        qubits: Vec<QubitRef>,
    },
    Channel {
        channel: String,
        qubits: Vec<QubitRef>,
    },
    Seq(Vec<Stmt>),
    Case {
        meas: String,
        qubits: Vec<QubitRef>,
        branches: Vec<Branch>,
    },
    While {
        meas: String,
        qubits: Vec<QubitRef>,
        body: Box<Stmt>,
    },
}

impl Stmt {
    /// Measurement sites (case and while statements) in pre-order.
    pub fn site_count(&self) -> usize {
        match self {
            Stmt::Seq(v) => v.iter().map(Stmt::site_count).sum(),
            Stmt::Case { branches, .. } => {
                1 + branches.iter().map(|b| b.body.site_count()).sum::<usize>()
            }
            Stmt::While { body, .. } => 1 + body.site_count(),
            _ => 0,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Stmt::Seq(v) => v.iter().map(Stmt::depth).max().unwrap_or(0),
            Stmt::Case { branches, .. } => {
                1 + branches.iter().map(|b| b.body.depth()).max().unwrap_or(0)
            }
            Stmt::While { body, .. } => 1 + body.depth(),
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateDef {
    Library(String),
    Matrix(ComplexMatrix),
    Diagonal(Vec<Complex64>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeasDef {
    /// Projectors onto the computational basis of `n` qubits.
    Computational(usize),
    PlusMinus,
    Operators(Vec<ComplexMatrix>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChannelDef {
    Identity(usize),
    BitFlip(f64),
    Depolarizing(f64),
    AmplitudeDamping(f64),
    Kraus(Vec<ComplexMatrix>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Register { name: String, width: usize },
    Gate { name: String, def: GateDef },
    Meas { name: String, def: MeasDef },
    Channel { name: String, def: ChannelDef },
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::Register { name, .. }
            | Decl::Gate { name, .. }
            | Decl::Meas { name, .. }
            | Decl::Channel { name, .. } => name,
        }
    }
}

/// Declarations in source order plus the program body (always a `Seq`).
#[derive(Clone, Debug, PartialEq)]
pub struct SourceProgram {
    pub decls: Vec<Decl>,
    pub body: Stmt,
}

impl SourceProgram {
    /// Registers as `(name, width)` in declaration order; this order fixes the
    /// global qubit numbering.
    pub fn registers(&self) -> Vec<(&str, usize)> {
        self.decls
            .iter()
            .filter_map(|d| match d {
                Decl::Register { name, width } => Some((name.as_str(), *width)),
                _ => None,
            })
            .collect()
    }

    pub fn n_qubits(&self) -> usize {
        self.registers().iter().map(|(_, w)| w).sum()
    }

    pub fn decl(&self, name: &str) -> Option<&Decl> {
        self.decls.iter().find(|d| d.name() == name)
    }

    /// Global qubit indices named by `r`, or `None` if `r` is undeclared or
    /// out of range.
    pub fn qubit_indices(&self, r: &QubitRef) -> Option<Vec<usize>> {
        let mut offset = 0;
        for (name, width) in self.registers() {
            if name == r.register {
                return match r.index {
                    None => Some((offset..offset + width).collect()),
                    Some(i) if i < width => Some(vec![offset + i]),
                    Some(_) => None,
                };
            }
            offset += width;
        }
        None
    }

    /// Flattened global qubit indices for a list of references.
    pub fn targets(&self, refs: &[QubitRef]) -> Option<Vec<usize>> {
        let mut out = Vec::new();
        for r in refs {
            out.extend(self.qubit_indices(r)?);
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LangError {
    #[error("line {line}, column {col}: syntax error: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("line {line}, column {col}: undeclared name `{name}`")]
    UndeclaredName {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("line {line}, column {col}: dimension error: {message}")]
    Dimension {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("invalid program:\n{0}")]
    Invalid(LangReport),
}

impl LangError {
    /// Source line of the error, when known.
    pub fn line(&self) -> Option<usize> {
        match self {
            LangError::Syntax { line, .. }
            | LangError::UndeclaredName { line, .. }
            | LangError::Dimension { line, .. } => Some(*line),
            LangError::Invalid(_) => None,
        }
    }
}

pub(crate) fn report_to_issues(report: ValidationReport, what: &str) -> Vec<LangIssue> {
    report
        .violations
        .into_iter()
        .map(|v| LangIssue::from_violation(v, what))
        .collect()
}
