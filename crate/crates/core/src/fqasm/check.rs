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

use serde::Serialize;

use super::{compile_with, default_basic_set, parse_fqasm, vm_distribution, Result};
use crate::lang::SourceProgram;
use crate::quantum::GateLibrary;
use crate::sim::{run_distribution, Distribution, Executable};

/// Outcome of [`check_equivalence`].
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub terminals: usize,
    /// Largest weight difference over terminals and the residual.
    pub max_weight_gap: f64,
    /// The serialized program parses back to the same instructions.
    pub text_round_trip: bool,
    pub passed: bool,
    pub detail: Option<String>,
}

/// Compiles `p`, reads the text form back, and compares the VM's
/// distribution with the interpreter's within `tol`.
pub fn check_equivalence(p: &SourceProgram, mass_threshold: f64, step_limit: u64, tol: f64) -> Result<EquivalenceReport> {
    let lib = GateLibrary::standard();
    let compiled = compile_with(p, &lib, &default_basic_set())?;
    let reread = parse_fqasm(&compiled.serialize())?;
    let text_round_trip = reread.instructions == compiled.instructions;
    let d_sim = run_distribution(&Executable::new(p, &lib)?, mass_threshold, step_limit)?;
    let d_vm = vm_distribution(&reread, mass_threshold, step_limit)?;
    let (gap, detail) = compare(&d_sim, &d_vm, tol);
    let detail = detail.or_else(|| (!text_round_trip).then(|| "text form does not round-trip".to_string()));
    Ok(EquivalenceReport {
        terminals: d_sim.terminals.len(),
        max_weight_gap: gap,
        text_round_trip,
        passed: detail.is_none(),
        detail,
    })
}

fn compare(a: &Distribution, b: &Distribution, tol: f64) -> (f64, Option<String>) {
    let mut gap = (a.residual - b.residual).abs();
    for t in &a.terminals {
        gap = gap.max((b.weight_of(&t.state, tol) - t.weight).abs());
    }
    for t in &b.terminals {
        gap = gap.max((a.weight_of(&t.state, tol) - t.weight).abs());
    }
    let detail = if a.terminals.len() != b.terminals.len() {
        Some(format!("{} interpreter terminals vs {} VM terminals", a.terminals.len(), b.terminals.len()))
    } else if gap > tol {
        Some(format!("weights differ by {gap:.3e}"))
    } else {
        None
    };
    (gap, detail)
}
