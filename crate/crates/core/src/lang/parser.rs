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

use super::lexer::{lex, Tok, Token};
use super::{
    Branch, ChannelDef, Decl, GateDef, LangError, MeasDef, QubitRef, SourceProgram, Stmt,
};
use crate::quantum::{c64, Complex64, ComplexMatrix, GateLibrary};

const KEYWORDS: &[&str] = &[
    "skip", "if", "fi", "while", "do", "od", "gate", "meas", "channel", "qubit",
];

/// Parses source text, resolving names and checking dimensions as it goes.
/// Numeric properties (unitarity, completeness) are left to
/// [`validate`](super::validate).
pub fn parse(text: &str) -> Result<SourceProgram, LangError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        decls: Vec::new(),
        library: GateLibrary::standard(),
    };
    let mut body = Vec::new();
    loop {
        match p.peek() {
            Tok::Eof => break,
            Tok::Ident(k) if k == "gate" || k == "meas" || k == "channel" => p.decl()?,
            Tok::Ident(_) if p.peek_at(1) == &Tok::Colon => p.decl()?,
            _ => body.push(p.stmt()?),
        }
    }
    Ok(SourceProgram {
        decls: p.decls,
        body: Stmt::Seq(body),
    })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    decls: Vec<Decl>,
    library: GateLibrary,
}

/// What a name in `NAME[...]` position refers to.
enum Applied {
    Gate(usize),
    Channel(usize),
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.tokens[(self.pos + k).min(self.tokens.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.tokens[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, LangError> {
        let (line, col) = self.here();
        Err(LangError::Syntax {
            line,
            col,
            message: message.into(),
        })
    }

    fn dimension_at<T>(&self, at: (usize, usize), message: impl Into<String>) -> Result<T, LangError> {
        Err(LangError::Dimension {
            line: at.0,
            col: at.1,
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<(), LangError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            ))
        }
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == want {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn keyword(&mut self, k: &str) -> Result<(), LangError> {
        if self.is_keyword(k) {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected `{k}`, found {}", self.peek().describe()))
        }
    }

    fn ident(&mut self) -> Result<String, LangError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            t => self.syntax(format!("expected a name, found {}", t.describe())),
        }
    }

    fn integer(&mut self) -> Result<usize, LangError> {
        match *self.peek() {
            Tok::Num {
                value,
                integral: true,
            } if value <= u32::MAX as f64 => {
                self.bump();
                Ok(value as usize)
            }
            ref t => self.syntax(format!("expected an integer, found {}", t.describe())),
        }
    }

    fn new_name(&mut self) -> Result<String, LangError> {
        let at = self.here();
        let name = self.ident()?;
        if self.decls.iter().any(|d| d.name() == name) {
            return Err(LangError::Syntax {
                line: at.0,
                col: at.1,
                message: format!("`{name}` is already declared"),
            });
        }
        Ok(name)
    }

    fn decl(&mut self) -> Result<(), LangError> {
        let decl = if self.is_keyword("gate") {
            self.bump();
            let name = self.new_name()?;
            self.expect(Tok::Eq)?;
            let def = self.gate_def()?;
            Decl::Gate { name, def }
        } else if self.is_keyword("meas") {
            self.bump();
            let name = self.new_name()?;
            self.expect(Tok::Eq)?;
            let def = self.meas_def()?;
            Decl::Meas { name, def }
        } else if self.is_keyword("channel") {
            self.bump();
            let name = self.new_name()?;
            self.expect(Tok::Eq)?;
            let def = self.channel_def()?;
            Decl::Channel { name, def }
        } else {
            let name = self.new_name()?;
            self.expect(Tok::Colon)?;
            self.keyword("qubit")?;
            let width = if self.eat(&Tok::LBracket) {
                let at = self.here();
                let w = self.integer()?;
                if w == 0 {
                    return self.dimension_at(at, "register width must be at least 1");
                }
                self.expect(Tok::RBracket)?;
                w
            } else {
                1
            };
            Decl::Register { name, width }
        };
        self.expect(Tok::Semi)?;
        self.decls.push(decl);
        Ok(())
    }

    fn gate_def(&mut self) -> Result<GateDef, LangError> {
        let at = self.here();
        match self.peek().clone() {
            Tok::LBracket => {
                let m = self.matrix()?;
                Ok(GateDef::Matrix(m))
            }
            Tok::Ident(s) if s == "diag" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let entries = self.expr_list(Tok::RParen)?;
                if !entries.len().is_power_of_two() {
                    return self.dimension_at(at, "diagonal length must be a power of two");
                }
                Ok(GateDef::Diagonal(entries))
            }
            Tok::Ident(s) => {
                if !self.library.contains(&s) {
                    return Err(LangError::UndeclaredName {
                        line: at.0,
                        col: at.1,
                        name: s,
                    });
                }
                self.bump();
                Ok(GateDef::Library(s))
            }
            t => self.syntax(format!("expected a gate definition, found {}", t.describe())),
        }
    }

    fn meas_def(&mut self) -> Result<MeasDef, LangError> {
        if self.is_keyword("computational") {
            self.bump();
            let n = if self.eat(&Tok::LParen) {
                let at = self.here();
                let n = self.integer()?;
                if n == 0 || n > crate::quantum::MAX_QUBITS {
                    return self.dimension_at(at, "qubit count out of range");
                }
                self.expect(Tok::RParen)?;
                n
            } else {
                1
            };
            Ok(MeasDef::Computational(n))
        } else if self.is_keyword("plusminus") {
            self.bump();
            Ok(MeasDef::PlusMinus)
        } else {
            Ok(MeasDef::Operators(self.matrix_set()?))
        }
    }

    fn channel_def(&mut self) -> Result<ChannelDef, LangError> {
        let param = |p: &mut Self| -> Result<f64, LangError> {
            p.bump();
            p.expect(Tok::LParen)?;
            let at = p.here();
            let v = p.expr()?;
            p.expect(Tok::RParen)?;
            if v.im != 0.0 || !(0.0..=1.0).contains(&v.re) {
                return p.dimension_at(at, "channel parameter must be a real number in [0, 1]");
            }
            Ok(v.re)
        };
        match self.peek().clone() {
            Tok::Ident(s) if s == "identity" => {
                self.bump();
                let n = if self.eat(&Tok::LParen) {
                    let n = self.integer()?;
                    self.expect(Tok::RParen)?;
                    n
                } else {
                    1
                };
                Ok(ChannelDef::Identity(n))
            }
            Tok::Ident(s) if s == "bit_flip" => Ok(ChannelDef::BitFlip(param(self)?)),
            Tok::Ident(s) if s == "depolarizing" => Ok(ChannelDef::Depolarizing(param(self)?)),
            Tok::Ident(s) if s == "amplitude_damping" => {
                Ok(ChannelDef::AmplitudeDamping(param(self)?))
            }
            _ => Ok(ChannelDef::Kraus(self.matrix_set()?)),
        }
    }

    fn matrix_set(&mut self) -> Result<Vec<ComplexMatrix>, LangError> {
        let at = self.here();
        self.expect(Tok::LBrace)?;
        let mut out = vec![self.matrix()?];
        while self.eat(&Tok::Comma) {
            out.push(self.matrix()?);
        }
        self.expect(Tok::RBrace)?;
        if out.iter().any(|m| m.rows() != out[0].rows()) {
            return self.dimension_at(at, "operators in a set must share one dimension");
        }
        Ok(out)
    }

    fn matrix(&mut self) -> Result<ComplexMatrix, LangError> {
        let at = self.here();
        self.expect(Tok::LBracket)?;
        let mut rows = Vec::new();
        loop {
            self.expect(Tok::LBracket)?;
            rows.push(self.expr_list(Tok::RBracket)?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBracket)?;
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return self.dimension_at(at, "matrix must be square");
        }
        if !d.is_power_of_two() {
            return self.dimension_at(at, format!("matrix dimension {d} is not a power of two"));
        }
        Ok(ComplexMatrix::from_rows(&rows).expect("square, nonempty"))
    }

    fn expr_list(&mut self, close: Tok) -> Result<Vec<Complex64>, LangError> {
        let mut out = vec![self.expr()?];
        while self.eat(&Tok::Comma) {
            out.push(self.expr()?);
        }
        self.expect(close)?;
        Ok(out)
    }

    fn expr(&mut self) -> Result<Complex64, LangError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc += self.term()?;
            } else if self.eat(&Tok::Minus) {
                acc -= self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Complex64, LangError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                acc *= self.unary()?;
            } else if self.eat(&Tok::Slash) {
                acc /= self.unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Complex64, LangError> {
        if self.eat(&Tok::Minus) {
            return Ok(-self.unary()?);
        }
        if self.eat(&Tok::Plus) {
            return self.unary();
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Complex64, LangError> {
        match self.peek().clone() {
            Tok::Num { value, .. } => {
                self.bump();
                Ok(c64(value, 0.0))
            }
            Tok::Imag(v) => {
                self.bump();
                Ok(c64(0.0, v))
            }
            Tok::LParen => {
                self.bump();
                let v = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(v)
            }
            Tok::Ident(s) => match s.as_str() {
                "i" => {
                    self.bump();
                    Ok(c64(0.0, 1.0))
                }
                "pi" => {
                    self.bump();
                    Ok(c64(std::f64::consts::PI, 0.0))
                }
                "sqrt" | "exp" | "cos" | "sin" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let v = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(match s.as_str() {
                        "sqrt" => v.sqrt(),
                        "exp" => v.exp(),
                        "cos" => v.cos(),
                        _ => v.sin(),
                    })
                }
                _ => self.syntax(format!("unknown name `{s}` in a numeric expression")),
            },
            t => self.syntax(format!("expected a number, found {}", t.describe())),
        }
    }

    fn register_width(&self, name: &str) -> Option<usize> {
        self.decls.iter().find_map(|d| match d {
            Decl::Register { name: n, width } if n == name => Some(*width),
            _ => None,
        })
    }

    fn qref(&mut self) -> Result<(QubitRef, usize), LangError> {
        let at = self.here();
        let register = self.ident()?;
        let Some(width) = self.register_width(&register) else {
            return Err(LangError::UndeclaredName {
                line: at.0,
                col: at.1,
                name: register,
            });
        };
        if self.eat(&Tok::LBracket) {
            let iat = self.here();
            let index = self.integer()?;
            self.expect(Tok::RBracket)?;
            if index >= width {
                return self.dimension_at(
                    iat,
                    format!("index {index} out of range for `{register}` of width {width}"),
                );
            }
            Ok((QubitRef::at(register, index), 1))
        } else {
            Ok((QubitRef::whole(register), width))
        }
    }

    /// `'[' qref { ',' qref } ']'`, returning the references and total width.
    fn qrefs(&mut self) -> Result<(Vec<QubitRef>, usize), LangError> {
        let at = self.here();
        self.expect(Tok::LBracket)?;
        let mut refs = Vec::new();
        let mut total = 0;
        loop {
            let (r, w) = self.qref()?;
            refs.push(r);
            total += w;
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBracket)?;
        let program = SourceProgram {
            decls: self.decls.clone(),
            body: Stmt::Skip,
        };
        let idx = program.targets(&refs).expect("checked above");
        let mut seen = HashSet::new();
        if let Some(d) = idx.iter().find(|q| !seen.insert(**q)) {
            return self.dimension_at(at, format!("qubit {d} appears twice in one operand list"));
        }
        Ok((refs, total))
    }

    fn applied(&self, name: &str) -> Option<Applied> {
        match self.decls.iter().find(|d| d.name() == name) {
            Some(Decl::Gate { def, .. }) => Some(Applied::Gate(match def {
                GateDef::Library(l) => self.library.get(l).expect("checked").rows(),
                GateDef::Matrix(m) => m.rows(),
                GateDef::Diagonal(d) => d.len(),
            })),
            Some(Decl::Channel { def, .. }) => Some(Applied::Channel(match def {
                ChannelDef::Identity(n) => 1 << n,
                ChannelDef::Kraus(k) => k[0].rows(),
                _ => 2,
            })),
            Some(_) => None,
            None => self.library.get(name).map(|g| Applied::Gate(g.rows())),
        }
    }

    fn measurement(&self, name: &str) -> Option<(usize, usize)> {
        self.decls.iter().find_map(|d| match d {
            Decl::Meas { name: n, def } if n == name => Some(match def {
                MeasDef::Computational(k) => (1 << k, 1 << k),
                MeasDef::PlusMinus => (2, 2),
                MeasDef::Operators(ops) => (ops[0].rows(), ops.len()),
            }),
            _ => None,
        })
    }

    /// Parses `M[qs]` and returns (name, refs, outcome count).
    fn measured(&mut self) -> Result<(String, Vec<QubitRef>, usize), LangError> {
        let at = self.here();
        let meas = self.ident()?;
        let Some((dim, outcomes)) = self.measurement(&meas) else {
            return Err(LangError::UndeclaredName {
                line: at.0,
                col: at.1,
                name: meas,
            });
        };
        let (qubits, width) = self.qrefs()?;
        if width >= usize::BITS as usize || 1usize << width != dim {
            return self.dimension_at(
                at,
                format!("`{meas}` acts on dimension {dim} but is applied to {width} qubit(s)"),
            );
        }
        Ok((meas, qubits, outcomes))
    }

    fn block(&mut self, terminators: &[&str]) -> Result<Stmt, LangError> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Tok::Box | Tok::Eof => break,
                Tok::Ident(s) if terminators.contains(&s.as_str()) => break,
                _ => out.push(self.stmt()?),
            }
        }
        Ok(Stmt::Seq(out))
    }

    fn stmt(&mut self) -> Result<Stmt, LangError> {
        let at = self.here();
        if self.is_keyword("skip") {
            self.bump();
            self.expect(Tok::Semi)?;
            return Ok(Stmt::Skip);
        }
        if self.is_keyword("if") {
            self.bump();
            let (meas, qubits, outcomes) = self.measured()?;
            self.expect(Tok::Eq)?;
            let mut branches = Vec::new();
            let mut seen = HashSet::new();
            while !self.is_keyword("fi") {
                let oat = self.here();
                let outcome = self.integer()?;
                if outcome >= outcomes {
                    return self.dimension_at(
                        oat,
                        format!("outcome {outcome} out of range for `{meas}` with {outcomes} outcomes"),
                    );
                }
                if !seen.insert(outcome) {
                    return Err(LangError::Syntax {
                        line: oat.0,
                        col: oat.1,
                        message: format!("duplicate branch for outcome {outcome}"),
                    });
                }
                self.expect(Tok::Arrow)?;
                let body = self.block(&["fi"])?;
                branches.push(Branch { outcome, body });
                if !self.eat(&Tok::Box) {
                    break;
                }
            }
            self.keyword("fi")?;
            self.eat(&Tok::Semi);
            return Ok(Stmt::Case {
                meas,
                qubits,
                branches,
            });
        }
        if self.is_keyword("while") {
            self.bump();
            let (meas, qubits, outcomes) = self.measured()?;
            if outcomes != 2 {
                return self.dimension_at(
                    at,
                    format!("loop guard `{meas}` must have exactly two outcomes, has {outcomes}"),
                );
            }
            self.expect(Tok::Eq)?;
            match *self.peek() {
                Tok::Num {
                    value,
                    integral: true,
                } if value == 1.0 => {
                    self.bump();
                }
                _ => return self.syntax("a loop guard must read `= 1` (outcome 1 continues)"),
            }
            self.keyword("do")?;
            let body = self.block(&["od"])?;
            self.keyword("od")?;
            self.eat(&Tok::Semi);
            return Ok(Stmt::While {
                meas,
                qubits,
                body: Box::new(body),
            });
        }
        if let (Tok::Ident(_), Tok::Assign | Tok::LBracket) = (self.peek(), self.peek_at(1)) {
            if self.peek_at(1) == &Tok::LBracket && self.peek_at(3) == &Tok::RBracket {
                if let Tok::Assign = self.peek_at(4) {
                    return self.init();
                }
            }
            if self.peek_at(1) == &Tok::Assign {
                return self.init();
            }
            let name = self.ident()?;
            let Some(kind) = self.applied(&name) else {
                return Err(LangError::UndeclaredName {
                    line: at.0,
                    col: at.1,
                    name,
                });
            };
            let (qubits, width) = self.qrefs()?;
            let dim = match kind {
                Applied::Gate(d) | Applied::Channel(d) => d,
            };
            if width >= usize::BITS as usize || 1usize << width != dim {
                return self.dimension_at(
                    at,
                    format!("`{name}` has dimension {dim} but is applied to {width} qubit(s)"),
                );
            }
            self.expect(Tok::Semi)?;
            return Ok(match kind {
                Applied::Gate(_) => Stmt::Unitary { gate: name, qubits },
                Applied::Channel(_) => Stmt::Channel {
                    channel: name,
                    qubits,
                },
            });
        }
        self.syntax(format!("expected a statement, found {}", self.peek().describe()))
    }

    fn init(&mut self) -> Result<Stmt, LangError> {
        let (target, _) = self.qref()?;
        self.expect(Tok::Assign)?;
        self.expect(Tok::Ket0)?;
        self.expect(Tok::Semi)?;
        Ok(Stmt::Init(target))
    }
}
