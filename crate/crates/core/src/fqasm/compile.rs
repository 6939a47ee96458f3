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

use std::collections::BTreeSet;

use super::{default_basic_set, FqasmProgram, Instruction, Operand, Result};
use crate::lang::{self, LangError, SourceProgram, Stmt};
use crate::quantum::GateLibrary;

/// Compiles against the standard library with every library gate basic.
pub fn compile(p: &SourceProgram) -> Result<FqasmProgram> {
    compile_with(p, &GateLibrary::standard(), &default_basic_set())
}

/// Classical registers `r1, r2, …` and labels `L1, L2, …` are numbered in
/// pre-order, so measurement sites keep the interpreter's numbering.
pub fn compile_with(p: &SourceProgram, lib: &GateLibrary, basic: &BTreeSet<String>) -> Result<FqasmProgram> {
    let report = lang::validate(p, lib);
    if !report.is_ok() {
        return Err(LangError::Invalid(report).into());
    }
    let mut c = Compiler {
        p,
        basic,
        out: Vec::new(),
        regs: 0,
        labels: 0,
    };
    c.stmt(&p.body);
    Ok(FqasmProgram {
        decls: p.decls.clone(),
        basic: basic.clone(),
        instructions: c.out,
    })
}

struct Compiler<'a> {
    p: &'a SourceProgram,
    basic: &'a BTreeSet<String>,
    out: Vec<Instruction>,
    regs: usize,
    labels: usize,
}

impl Compiler<'_> {
    fn reg(&mut self) -> String {
        self.regs += 1;
        format!("r{}", self.regs)
    }

    fn label(&mut self) -> String {
        self.labels += 1;
        format!("L{}", self.labels)
    }

    fn stmt(&mut self, s: &Stmt) {
        match s {
            Stmt::Skip => {}
            Stmt::Init(q) => self.out.push(Instruction::Init(q.clone())),
            Stmt::Unitary { gate, qubits } => self.out.push(Instruction::Apply {
                gate: gate.clone(),
                qubits: qubits.clone(),
                num: u32::from(!self.basic.contains(gate)),
            }),
            Stmt::Channel { channel, qubits } => self.out.push(Instruction::SupOp {
                channel: channel.clone(),
                qubits: qubits.clone(),
            }),
            Stmt::Seq(v) => v.iter().for_each(|s| self.stmt(s)),
            Stmt::Case { meas, qubits, branches } => {
                let reg = self.reg();
                // bodies (and their labels) in source order, so nested sites
                // keep pre-order numbering; the ladder goes in outcome order
                let targets: Vec<String> = branches.iter().map(|_| self.label()).collect();
                let end = self.label();
                self.out.push(Instruction::MeasMov {
                    reg: reg.clone(),
                    meas: meas.clone(),
                    qubits: qubits.clone(),
                });
                let mut ladder: Vec<(usize, &String)> =
                    branches.iter().map(|b| b.outcome).zip(&targets).collect();
                ladder.sort();
                for (outcome, l) in ladder {
                    self.out.push(Instruction::Cmp {
                        reg: reg.clone(),
                        operand: Operand::Lit(outcome as u64),
                    });
                    self.out.push(Instruction::Je(l.clone()));
                }
                // outcomes without a branch skip the whole statement
                let arity = self.p.measurement_ops(meas).expect("validated").len();
                if branches.len() < arity {
                    self.out.push(Instruction::Jmp(end.clone()));
                }
                for (b, l) in branches.iter().zip(targets) {
                    self.out.push(Instruction::Label(l));
                    self.stmt(&b.body);
                    self.out.push(Instruction::Jmp(end.clone()));
                }
                self.out.push(Instruction::Label(end));
            }
            Stmt::While { meas, qubits, body } => {
                let reg = self.reg();
                let entry = self.label();
                let exit = self.label();
                self.out.push(Instruction::Label(entry.clone()));
                self.out.push(Instruction::MeasMov {
                    reg: reg.clone(),
                    meas: meas.clone(),
                    qubits: qubits.clone(),
                });
                self.out.push(Instruction::Cmp { reg, operand: Operand::Lit(0) });
                self.out.push(Instruction::Je(exit.clone()));
                self.stmt(body);
                self.out.push(Instruction::Jmp(entry));
                self.out.push(Instruction::Label(exit));
            }
        }
    }
}
