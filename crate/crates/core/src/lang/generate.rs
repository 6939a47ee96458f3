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

//! Random well-formed programs for property tests and cross-engine checks.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::{Branch, ChannelDef, Decl, GateDef, MeasDef, QubitRef, SourceProgram, Stmt};
use crate::quantum::random::random_unitary;
use crate::quantum::ComplexMatrix;

#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Total qubits, 1 to 3.
    pub max_qubits: usize,
    /// Maximum nesting depth, counting simple statements as depth 1.
    pub max_depth: usize,
    /// Maximum statements per block.
    pub max_block: usize,
    pub allow_channels: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            max_qubits: 3,
            max_depth: 4,
            max_block: 3,
            allow_channels: true,
        }
    }
}

struct Ctx {
    qubits: Vec<QubitRef>,
    cfg: GenConfig,
}

/// A random program that parses, validates and whose loops each perturb
/// their guard qubit.
pub fn random_program<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> SourceProgram {
    let n = rng.random_range(1..=cfg.max_qubits.clamp(1, 3));
    let mut decls = Vec::new();
    let mut qubits = Vec::new();
    if n == 3 && rng.random_bool(0.5) {
        decls.push(Decl::Register { name: "a".into(), width: 1 });
        decls.push(Decl::Register { name: "r".into(), width: 2 });
        qubits.extend([QubitRef::whole("a"), QubitRef::at("r", 0), QubitRef::at("r", 1)]);
    } else {
        for name in ["a", "b", "c"].iter().take(n) {
            decls.push(Decl::Register { name: name.to_string(), width: 1 });
            qubits.push(QubitRef::whole(*name));
        }
    }
    decls.push(Decl::Gate { name: "U".into(), def: GateDef::Matrix(random_unitary(2, rng)) });
    if n >= 2 {
        decls.push(Decl::Gate { name: "V".into(), def: GateDef::Matrix(random_unitary(4, rng)) });
        decls.push(Decl::Meas { name: "C".into(), def: MeasDef::Computational(2) });
    }
    decls.push(Decl::Meas { name: "M".into(), def: MeasDef::Computational(1) });
    decls.push(Decl::Meas { name: "P".into(), def: MeasDef::PlusMinus });
    let u = random_unitary(2, rng);
    let ops: Vec<ComplexMatrix> = crate::quantum::MeasurementSet::computational(2)
        .operators()
        .iter()
        .map(|p| &(&u * p) * &u.adjoint())
        .collect();
    decls.push(Decl::Meas { name: "K".into(), def: MeasDef::Operators(ops) });
    if cfg.allow_channels {
        decls.push(Decl::Channel { name: "E".into(), def: ChannelDef::AmplitudeDamping(0.5) });
        decls.push(Decl::Channel { name: "F".into(), def: ChannelDef::BitFlip(0.75) });
    }
    let ctx = Ctx { qubits, cfg: cfg.clone() };
    let body = block(&ctx, rng, cfg.max_depth.max(1));
    SourceProgram { decls, body }
}

fn one<R: Rng + ?Sized>(ctx: &Ctx, rng: &mut R) -> QubitRef {
    ctx.qubits.choose(rng).expect("at least one qubit").clone()
}

fn two<R: Rng + ?Sized>(ctx: &Ctx, rng: &mut R) -> Vec<QubitRef> {
    let picked: Vec<&QubitRef> = ctx.qubits.choose_multiple(rng, 2).collect();
    let mut v: Vec<QubitRef> = picked.into_iter().cloned().collect();
    if rng.random_bool(0.5) {
        v.reverse();
    }
    v
}

fn block<R: Rng + ?Sized>(ctx: &Ctx, rng: &mut R, depth: usize) -> Stmt {
    let len = rng.random_range(1..=ctx.cfg.max_block.max(1));
    Stmt::Seq((0..len).map(|_| stmt(ctx, rng, depth)).collect())
}

fn simple<R: Rng + ?Sized>(ctx: &Ctx, rng: &mut R) -> Stmt {
    let multi = ctx.qubits.len() >= 2;
    match rng.random_range(0..10) {
        0 => Stmt::Skip,
        1 => Stmt::Init(one(ctx, rng)),
        2 | 3 if multi => {
            let gate = if rng.random_bool(0.5) { "CNOT" } else { "V" };
            Stmt::Unitary { gate: gate.into(), qubits: two(ctx, rng) }
        }
        4 if ctx.cfg.allow_channels => {
            let channel = if rng.random_bool(0.5) { "E" } else { "F" };
            Stmt::Channel { channel: channel.into(), qubits: vec![one(ctx, rng)] }
        }
        _ => {
            let gate = *["H", "X", "Y", "Z", "S", "T", "U"].choose(rng).expect("nonempty");
            Stmt::Unitary { gate: gate.into(), qubits: vec![one(ctx, rng)] }
        }
    }
}

fn stmt<R: Rng + ?Sized>(ctx: &Ctx, rng: &mut R, depth: usize) -> Stmt {
    if depth <= 1 || rng.random_bool(0.55) {
        return simple(ctx, rng);
    }
    let multi = ctx.qubits.len() >= 2;
    if rng.random_bool(0.5) {
        let (meas, qubits, outcomes) = if multi && rng.random_bool(0.3) {
            ("C", two(ctx, rng), 4)
        } else {
            (*["M", "P", "K"].choose(rng).expect("nonempty"), vec![one(ctx, rng)], 2)
        };
        let mut branches = Vec::new();
        for outcome in 0..outcomes {
            if rng.random_bool(0.8) {
                branches.push(Branch { outcome, body: block(ctx, rng, depth - 1) });
            }
        }
        if rng.random_bool(0.3) {
            branches.reverse();
        }
        Stmt::Case { meas: meas.into(), qubits, branches }
    } else {
        let guard = one(ctx, rng);
        let meas = *["M", "P", "K"].choose(rng).expect("nonempty");
        let Stmt::Seq(mut body) = block(ctx, rng, depth - 1) else { unreachable!() };
        let kick = if ctx.cfg.allow_channels && rng.random_bool(0.3) {
            Stmt::Channel { channel: "E".into(), qubits: vec![guard.clone()] }
        } else {
            let gate = *["H", "U"].choose(rng).expect("nonempty");
            Stmt::Unitary { gate: gate.into(), qubits: vec![guard.clone()] }
        };
        body.push(kick);
        Stmt::While { meas: meas.into(), qubits: vec![guard], body: Box::new(Stmt::Seq(body)) }
    }
}
