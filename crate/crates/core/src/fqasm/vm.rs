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

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::{FqasmError, FqasmProgram, Instruction, Operand, Result};
use crate::lang::{self, LangError, SourceProgram, Stmt};
use crate::quantum::{ComplexMatrix, DensityOperator, GateLibrary, MeasurementSet, SuperOperator, ZERO_PROBABILITY};
use crate::sim::{
    sample_outcome, shot_seed, Distribution, Frontier, RunRecord, SamplerState, ShotStats, SimError, SiteKind,
    DEFAULT_STEP_LIMIT,
};

#[derive(Debug, Clone, Copy)]
enum Rhs {
    Reg(usize),
    Lit(u64),
}

#[derive(Debug)]
enum Op {
    Nop,
    Init(Vec<usize>),
    Unitary(Arc<ComplexMatrix>, Vec<usize>),
    Channel(Arc<SuperOperator>, Vec<usize>),
    Measure {
        site: usize,
        reg: usize,
        meas: Arc<MeasurementSet>,
        targets: Vec<usize>,
    },
    Mov(usize, usize),
    Cmp(usize, Rhs),
    Jmp(usize),
    Je(usize),
}

/// A loaded program: symbols resolved, labels turned into instruction
/// indices, registers numbered.
#[derive(Debug)]
pub struct Vm {
    n_qubits: usize,
    code: Vec<Op>,
    reg_names: Vec<String>,
    sites: Vec<SiteKind>,
    /// Per instruction, the registers (and, last, `fr1`) that may be read
    /// before being written again.
    live: Vec<Vec<bool>>,
}

/// Program counter, classical registers (`None` = unset), `fr1` and the
/// quantum state.
#[derive(Debug, Clone)]
struct Machine {
    pc: usize,
    regs: Vec<Option<u64>>,
    flag: Option<bool>,
    state: DensityOperator,
    weight: f64,
    steps: u64,
}

impl Vm {
    pub fn new(f: &FqasmProgram, lib: &GateLibrary) -> Result<Self> {
        let p = SourceProgram {
            decls: f.decls.clone(),
            body: Stmt::Seq(Vec::new()),
        };
        let report = lang::validate(&p, lib);
        if !report.is_ok() {
            return Err(LangError::Invalid(report).into());
        }
        f.check(None)?;

        let labels: HashMap<&str, usize> = f
            .instructions
            .iter()
            .enumerate()
            .filter_map(|(i, ins)| match ins {
                Instruction::Label(l) => Some((l.as_str(), i)),
                _ => None,
            })
            .collect();
        let reg_names: Vec<String> = f.classical_registers().into_iter().map(String::from).collect();
        let reg = |r: &str| reg_names.iter().position(|n| n == r).expect("collected");
        let targets = |pc: usize, op: &str, qs: &[lang::QubitRef], dim: usize| -> Result<Vec<usize>> {
            let t = p.targets(qs).ok_or_else(|| FqasmError::UnknownRegister {
                line: pc + 1,
                name: qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(","),
            })?;
            if dim != 1 << t.len() {
                return Err(FqasmError::Dimension {
                    pc,
                    op: op.to_string(),
                    got: t.len(),
                    want: dim.trailing_zeros() as usize,
                });
            }
            Ok(t)
        };

        let mut code = Vec::with_capacity(f.instructions.len());
        let mut sites = Vec::new();
        for (pc, ins) in f.instructions.iter().enumerate() {
            let op = match ins {
                Instruction::Label(_) => Op::Nop,
                Instruction::Init(q) => {
                    let t = p.targets(std::slice::from_ref(q)).expect("checked");
                    Op::Init(t)
                }
                Instruction::Apply { gate, qubits, .. } => {
                    let m = p
                        .gate_matrix(gate, lib)
                        .ok_or_else(|| FqasmError::UnknownSymbol(gate.clone()))?;
                    let t = targets(pc, gate, qubits, m.rows())?;
                    Op::Unitary(Arc::new(m), t)
                }
                Instruction::SupOp { channel, qubits } => {
                    let e = p
                        .channel(channel)
                        .ok_or_else(|| FqasmError::UnknownSymbol(channel.clone()))?;
                    let t = targets(pc, channel, qubits, e.dim())?;
                    Op::Channel(Arc::new(e), t)
                }
                Instruction::MeasMov { reg: r, meas, qubits } | Instruction::Measure { reg: r, meas, qubits } => {
                    let m = p
                        .measurement(meas)
                        .ok_or_else(|| FqasmError::UnknownSymbol(meas.clone()))?;
                    let t = targets(pc, meas, qubits, m.dim())?;
                    let site = sites.len();
                    sites.push(if is_loop_head(f, &labels, pc) { SiteKind::Loop } else { SiteKind::Case });
                    Op::Measure {
                        site,
                        reg: reg(r),
                        meas: Arc::new(m),
                        targets: t,
                    }
                }
                Instruction::Mov { dst, src } => Op::Mov(reg(dst), reg(src)),
                Instruction::Cmp { reg: r, operand } => Op::Cmp(
                    reg(r),
                    match operand {
                        Operand::Reg(r2) => Rhs::Reg(reg(r2)),
                        Operand::Lit(v) => Rhs::Lit(*v),
                    },
                ),
                Instruction::Jmp(l) => Op::Jmp(labels[l.as_str()]),
                Instruction::Je(l) => Op::Je(labels[l.as_str()]),
            };
            code.push(op);
        }
        let live = liveness(&code, reg_names.len());
        Ok(Self {
            n_qubits: p.n_qubits(),
            code,
            reg_names,
            sites,
            live,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Kind of each measurement instruction in program order.
    pub fn sites(&self) -> &[SiteKind] {
        &self.sites
    }

    fn initial(&self) -> Result<Machine> {
        Ok(Machine {
            pc: 0,
            regs: vec![None; self.reg_names.len()],
            flag: None,
            state: DensityOperator::zero_state(self.n_qubits)?,
            weight: 1.0,
            steps: 0,
        })
    }

    fn read(&self, m: &Machine, pc: usize, r: usize) -> Result<u64> {
        m.regs[r].ok_or_else(|| FqasmError::UninitializedRegisterRead {
            pc,
            reg: self.reg_names[r].clone(),
        })
    }

    /// Executes the instruction at `m.pc`. Measurements return one successor
    /// per outcome (or the sampled one) tagged with `(site, outcome)`.
    fn exec(&self, mut m: Machine, rng: Option<&mut SamplerState>) -> Result<Vec<(Machine, Option<(usize, usize)>)>> {
        let pc = m.pc;
        m.pc += 1;
        m.steps += 1;
        match &self.code[pc] {
            Op::Nop => {}
            Op::Init(t) => m.state = m.state.init_qubits(t)?,
            Op::Unitary(u, t) => m.state = m.state.conjugate_on(u, t)?,
            Op::Channel(e, t) => m.state = e.apply_on(&m.state, t)?,
            Op::Mov(dst, src) => {
                let v = self.read(&m, pc, *src)?;
                m.regs[*src] = None;
                m.regs[*dst] = Some(v);
            }
            Op::Cmp(r, rhs) => {
                let a = self.read(&m, pc, *r)?;
                let b = match rhs {
                    Rhs::Reg(r2) => self.read(&m, pc, *r2)?,
                    Rhs::Lit(v) => *v,
                };
                m.flag = Some(a == b);
            }
            Op::Jmp(t) => m.pc = *t,
            Op::Je(t) => match m.flag {
                Some(true) => m.pc = *t,
                Some(false) => {}
                None => {
                    return Err(FqasmError::UninitializedRegisterRead { pc, reg: "fr1".into() })
                }
            },
            Op::Measure { site, reg, meas, targets } => {
                let probs = m.state.probabilities_on(meas, targets)?;
                let outcomes: Vec<usize> = match rng {
                    Some(r) => vec![sample_outcome(&probs, r)?],
                    None => (0..probs.len()).filter(|&i| probs[i] >= ZERO_PROBABILITY).collect(),
                };
                let mut out = Vec::with_capacity(outcomes.len());
                for i in outcomes {
                    let (state, _) = m.state.post_measurement_on(meas, targets, i)?;
                    let mut next = m.clone();
                    next.state = state;
                    next.weight = m.weight * probs[i];
                    next.regs[*reg] = Some(i as u64);
                    out.push((next, Some((*site, i))));
                }
                return Ok(out);
            }
        }
        Ok(vec![(m, None)])
    }

    /// One sampled run. `steps` counts executed instructions, labels
    /// included.
    pub fn run_shot_with(&self, rng: &mut SamplerState, step_limit: u64) -> Result<RunRecord> {
        let mut m = self.initial()?;
        let mut outcomes = Vec::new();
        let mut loop_counts: BTreeMap<usize, u64> = self
            .sites
            .iter()
            .enumerate()
            .filter(|(_, k)| **k == SiteKind::Loop)
            .map(|(i, _)| (i, 0))
            .collect();
        while m.pc < self.code.len() {
            if m.steps >= step_limit {
                return Err(SimError::StepLimitExceeded { limit: step_limit }.into());
            }
            let (next, event) = self.exec(m, Some(rng))?.pop().expect("one successor");
            m = next;
            if let Some((site, outcome)) = event {
                outcomes.push((site, outcome));
                if self.sites[site] == SiteKind::Loop && outcome == 1 {
                    *loop_counts.get_mut(&site).expect("loop site") += 1;
                }
            }
        }
        Ok(RunRecord {
            outcomes,
            final_state: m.state,
            steps: m.steps,
            loop_counts,
        })
    }

    pub fn run_shots(&self, n: u64, seed: u64, step_limit: u64) -> Result<ShotStats> {
        let mut stats = ShotStats::new(&self.sites, n, seed);
        for k in 0..n {
            let mut rng = SamplerState::new(shot_seed(seed, k));
            stats.record(self.run_shot_with(&mut rng, step_limit)?);
        }
        Ok(stats)
    }

    /// Explores every branch, one measurement layer at a time, merging
    /// branches that wait at the same instruction with the same live
    /// registers and state. The mass threshold applies to merged branches.
    /// A branch that runs `step_limit` instructions without measuring, and
    /// everything left after `step_limit` layers, goes to the residual.
    pub fn distribution(&self, mass_threshold: f64, step_limit: u64) -> Result<Distribution> {
        let mut dist = Distribution::empty();
        let mut frontier = vec![self.initial()?];
        while !frontier.is_empty() {
            let mut waiting = Frontier::new(|m: &Machine| &m.state);
            for mut m in frontier {
                let start = m.steps;
                loop {
                    match self.code.get(m.pc) {
                        None => {
                            dist.add_terminal(m.weight, m.state);
                            break;
                        }
                        Some(Op::Measure { .. }) => {
                            let w = m.weight;
                            waiting.insert(self.merge_key(&m), w, m);
                            break;
                        }
                        Some(_) if m.steps - start >= step_limit => {
                            dist.residual += m.weight;
                            break;
                        }
                        Some(_) => m = self.exec(m, None)?.pop().expect("one successor").0,
                    }
                }
            }
            if waiting.is_empty() {
                break;
            }
            if dist.rounds >= step_limit {
                dist.residual += waiting.total_weight();
                break;
            }
            let mut next = Vec::new();
            for (weight, mut m) in waiting.into_items() {
                if weight < mass_threshold {
                    dist.residual += weight;
                    continue;
                }
                m.weight = weight;
                next.extend(self.exec(m, None)?.into_iter().map(|(m, _)| m));
            }
            frontier = next;
            dist.rounds += 1;
        }
        Ok(dist)
    }

    fn merge_key(&self, m: &Machine) -> (usize, Vec<Option<u64>>, Option<bool>) {
        let live = &self.live[m.pc];
        let regs = m
            .regs
            .iter()
            .zip(live)
            .map(|(v, l)| if *l { *v } else { None })
            .collect();
        (m.pc, regs, if live[self.reg_names.len()] { m.flag } else { None })
    }
}

/// Backward live-variable analysis; index `n_regs` stands for `fr1`.
fn liveness(code: &[Op], n_regs: usize) -> Vec<Vec<bool>> {
    let flag = n_regs;
    let mut live = vec![vec![false; n_regs + 1]; code.len() + 1];
    let mut changed = true;
    while changed {
        changed = false;
        for pc in (0..code.len()).rev() {
            let succ: Vec<usize> = match &code[pc] {
                Op::Jmp(t) => vec![*t],
                Op::Je(t) => vec![pc + 1, *t],
                _ => vec![pc + 1],
            };
            let mut l = vec![false; n_regs + 1];
            for s in succ {
                for (a, b) in l.iter_mut().zip(&live[s]) {
                    *a |= b;
                }
            }
            match &code[pc] {
                Op::Measure { reg, .. } => l[*reg] = false,
                Op::Mov(dst, src) => {
                    l[*dst] = false;
                    l[*src] = true;
                }
                Op::Cmp(r, rhs) => {
                    l[flag] = false;
                    l[*r] = true;
                    if let Rhs::Reg(r2) = rhs {
                        l[*r2] = true;
                    }
                }
                Op::Je(_) => l[flag] = true,
                _ => {}
            }
            if l != live[pc] {
                live[pc] = l;
                changed = true;
            }
        }
    }
    live.truncate(code.len());
    live
}

/// A measurement directly after a label that some later `JMP` targets.
fn is_loop_head(f: &FqasmProgram, labels: &HashMap<&str, usize>, pc: usize) -> bool {
    let Some(Instruction::Label(l)) = pc.checked_sub(1).map(|i| &f.instructions[i]) else {
        return false;
    };
    debug_assert_eq!(labels.get(l.as_str()), Some(&(pc - 1)));
    f.instructions[pc..]
        .iter()
        .any(|ins| matches!(ins, Instruction::Jmp(t) if t == l))
}

/// One shot with the default step limit, against the standard library.
pub fn vm_run(f: &FqasmProgram, seed: u64) -> Result<RunRecord> {
    Vm::new(f, &GateLibrary::standard())?.run_shot_with(&mut SamplerState::new(seed), DEFAULT_STEP_LIMIT)
}

pub fn vm_run_with(vm: &Vm, rng: &mut SamplerState, step_limit: u64) -> Result<RunRecord> {
    vm.run_shot_with(rng, step_limit)
}

/// `n` shots; shot `k` uses seed `shot_seed(seed, k)`.
pub fn vm_shots(f: &FqasmProgram, n: u64, seed: u64) -> Result<ShotStats> {
    Vm::new(f, &GateLibrary::standard())?.run_shots(n, seed, DEFAULT_STEP_LIMIT)
}

pub fn vm_distribution(f: &FqasmProgram, mass_threshold: f64, step_limit: u64) -> Result<Distribution> {
    Vm::new(f, &GateLibrary::standard())?.distribution(mass_threshold, step_limit)
}
