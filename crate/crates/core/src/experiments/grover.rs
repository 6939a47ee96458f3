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
use std::f64::consts::PI;
use std::str::FromStr;

use serde::Serialize;

use super::{ExperimentError, Result};
use crate::sim::{run_distribution, run_shot, shot_seed, Executable, DEFAULT_MASS_THRESHOLD, DEFAULT_STEP_LIMIT};

pub(super) const GROVER_SOURCE: &str = include_str!("../../programs/grover.qw");

/// Largest register the harness accepts.
const MAX_GROVER_QUBITS: usize = 10;

/// How many oracle calls a round makes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IterationRule {
    /// `round(π/4 · √N)` in every round.
    Fixed,
    /// `round(π/4 · √(N/m))` for the `m` positions the round's oracle marks.
    Marked,
}

impl FromStr for IterationRule {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(IterationRule::Fixed),
            "marked" => Ok(IterationRule::Marked),
            _ => Err(ExperimentError::InvalidParameter(format!("unknown iteration rule `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GroverMode {
    Single,
    Multi,
}

impl FromStr for GroverMode {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(GroverMode::Single),
            "multi" => Ok(GroverMode::Multi),
            _ => Err(ExperimentError::InvalidParameter(format!("unknown grover mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroverSpec {
    pub n: usize,
    pub targets: Vec<usize>,
    pub rule: IterationRule,
    /// Oracle calls per round, overriding `rule`.
    pub fixed_iterations: Option<usize>,
}

impl GroverSpec {
    /// Targets are sorted and must be distinct positions below `2^n`,
    /// leaving at least one unmarked.
    pub fn new(n: usize, targets: &[usize]) -> Result<Self> {
        if n == 0 || n > MAX_GROVER_QUBITS {
            return Err(ExperimentError::InvalidParameter(format!("{n} qubits; expected 1..={MAX_GROVER_QUBITS}")));
        }
        let set: BTreeSet<usize> = targets.iter().copied().collect();
        let dim = 1usize << n;
        if set.is_empty() {
            return Err(ExperimentError::InvalidTarget("no target positions".into()));
        }
        if set.len() != targets.len() {
            return Err(ExperimentError::InvalidTarget("duplicate target positions".into()));
        }
        if let Some(t) = set.iter().find(|t| **t >= dim) {
            return Err(ExperimentError::InvalidTarget(format!("position {t} outside 0..{dim}")));
        }
        if set.len() >= dim {
            return Err(ExperimentError::InvalidTarget("every position is a target".into()));
        }
        Ok(Self {
            n,
            targets: set.into_iter().collect(),
            rule: IterationRule::Fixed,
            fixed_iterations: None,
        })
    }

    pub fn with_rule(mut self, rule: IterationRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_iterations(mut self, r: usize) -> Self {
        self.fixed_iterations = Some(r);
        self
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Oracle calls for an oracle marking `marked` positions.
    pub fn iterations(&self, marked: usize) -> usize {
        if let Some(r) = self.fixed_iterations {
            return r;
        }
        let n = self.dim() as f64;
        match self.rule {
            IterationRule::Fixed => (PI / 4.0 * n.sqrt()).round() as usize,
            IterationRule::Marked => (PI / 4.0 * (n / marked.max(1) as f64).sqrt()).round() as usize,
        }
    }

    /// Diagonal of the oracle: `−1` on the targets.
    pub fn oracle(&self) -> Vec<f64> {
        sign_diagonal(self.dim(), &self.targets)
    }

    /// Diagonal of the blind box: `−1` on positions already reported.
    pub fn blind_box(&self, found: &[usize]) -> Vec<f64> {
        sign_diagonal(self.dim(), found)
    }

    /// Oracle composed with the blind box over `found`.
    pub fn combined_oracle(&self, found: &[usize]) -> Vec<f64> {
        self.oracle().iter().zip(self.blind_box(found)).map(|(a, b)| a * b).collect()
    }
}

fn sign_diagonal(dim: usize, positions: &[usize]) -> Vec<f64> {
    let mut d = vec![1.0; dim];
    for &p in positions {
        if p < dim {
            d[p] = -d[p];
        }
    }
    d
}

/// Grover program: `H` on every qubit, then `r` rounds of the diagonal
/// oracle followed by the diffusion `H^n F H^n` with `F = 2|0⟩⟨0| − I`,
/// optionally ending with a computational measurement.
pub fn grover_source(n: usize, oracle: &[f64], r: usize, measure: bool) -> String {
    let dim = 1usize << n;
    let entries = |v: &[f64]| v.iter().map(|x| if *x < 0.0 { "-1" } else { "1" }).collect::<Vec<_>>().join(", ");
    let flip: Vec<f64> = (0..dim).map(|i| if i == 0 { 1.0 } else { -1.0 }).collect();
    let hs: String = (0..n).map(|i| format!("H[q[{i}]]; ")).collect::<String>().trim_end().to_string();
    let mut s = format!("q : qubit[{n}];\ngate O = diag({});\ngate F = diag({});\n", entries(oracle), entries(&flip));
    if measure {
        s += &format!("meas C = computational({n});\n");
    }
    s += &format!("\nq := |0>;\n{hs}\n");
    for _ in 0..r {
        s += &format!("O[q];\n{hs}\nF[q];\n{hs}\n");
    }
    if measure {
        s += "if C[q] = fi\n";
    }
    s
}

/// Pre-measurement probabilities after `r` rounds with `oracle`,
/// computed in distribution mode.
pub fn grover_probabilities(n: usize, oracle: &[f64], r: usize) -> Result<Vec<f64>> {
    let exe = Executable::from_source(&grover_source(n, oracle, r, false))?;
    let d = run_distribution(&exe, DEFAULT_MASS_THRESHOLD, DEFAULT_STEP_LIMIT)?;
    Ok(d.terminals[0].state.diagonal())
}

/// `sin²((2r+1)θ/2)` with `sin θ = 2√(m(N−m))/N`.
pub fn formula_probability(dim: usize, marked: usize, r: usize) -> f64 {
    let (n, m) = (dim as f64, marked as f64);
    let theta = (2.0 * (m * (n - m)).sqrt() / n).asin();
    // asin returns the acute angle; the rotation is obtuse when m > N/2
    let theta = if 2.0 * m > n { PI - theta } else { theta };
    ((2 * r + 1) as f64 * theta / 2.0).sin().powi(2)
}

/// Probability of measuring a target not in `found`, for the round whose
/// oracle is composed with the blind box over `found`.
pub fn next_round_success(spec: &GroverSpec, found: &[usize]) -> Result<f64> {
    let oracle = spec.combined_oracle(found);
    let marked = oracle.iter().filter(|x| **x < 0.0).count();
    let p = grover_probabilities(spec.n, &oracle, spec.iterations(marked))?;
    Ok(spec.targets.iter().filter(|t| !found.contains(t)).map(|&t| p[t]).sum())
}

#[derive(Debug, Clone, Serialize)]
pub struct GroverRound {
    pub round: usize,
    pub oracle_calls: usize,
    /// Positions the round's oracle marks.
    pub marked: Vec<usize>,
    /// Probability of measuring a target not yet found.
    pub success_probability: f64,
    pub distribution: Vec<f64>,
    pub measured: usize,
    pub correct: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroverReport {
    pub n: usize,
    pub targets: Vec<usize>,
    pub mode: GroverMode,
    pub rule: IterationRule,
    pub seed: u64,
    pub rounds: Vec<GroverRound>,
    /// Targets measured, in order.
    pub found: Vec<usize>,
    /// Every measured position, correct or not, in order; the blind box
    /// flips each of them.
    pub reported: Vec<usize>,
    pub oracle_calls: usize,
}

/// Single mode runs one round. Multi mode repeats, composing the oracle
/// with a blind box over every position measured so far, until all
/// targets are found or `2|T|` rounds have run.
pub fn grover_run(spec: &GroverSpec, mode: GroverMode, seed: u64) -> Result<GroverReport> {
    let max_rounds = match mode {
        GroverMode::Single => 1,
        GroverMode::Multi => 2 * spec.targets.len(),
    };
    let mut rounds = Vec::new();
    let (mut found, mut reported) = (Vec::new(), Vec::new());
    for round in 0..max_rounds {
        let oracle = spec.combined_oracle(&reported);
        let marked: Vec<usize> = (0..oracle.len()).filter(|&i| oracle[i] < 0.0).collect();
        let r = spec.iterations(marked.len());
        let distribution = grover_probabilities(spec.n, &oracle, r)?;
        let success_probability = spec.targets.iter().filter(|t| !found.contains(*t)).map(|&t| distribution[t]).sum();
        let exe = Executable::from_source(&grover_source(spec.n, &oracle, r, true))?;
        let rec = run_shot(&exe, shot_seed(seed, round as u64))?;
        let measured = rec.outcomes[0].1;
        let correct = spec.targets.contains(&measured) && !found.contains(&measured);
        if correct {
            found.push(measured);
        }
        if !reported.contains(&measured) {
            reported.push(measured);
        }
        rounds.push(GroverRound {
            round,
            oracle_calls: r,
            marked,
            success_probability,
            distribution,
            measured,
            correct,
        });
        if found.len() == spec.targets.len() {
            break;
        }
    }
    Ok(GroverReport {
        n: spec.n,
        targets: spec.targets.clone(),
        mode,
        rule: spec.rule,
        seed,
        oracle_calls: rounds.iter().map(|r| r.oracle_calls).sum(),
        rounds,
        found,
        reported,
    })
}
