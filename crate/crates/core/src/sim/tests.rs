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

use std::f64::consts::FRAC_1_SQRT_2;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::lang::generate::{random_program, GenConfig};
use crate::lang::QubitRef;
use crate::quantum::{c64, Ket};

const QLOOP: &str = "
q : qubit;
meas M = computational;
channel E = {[[1, 0], [0, 1/sqrt(2)]], [[0, 1/sqrt(2)], [0, 0]]};
q := |0>;
H[q];
E[q];
while M[q] = 1 do H[q]; od
";

fn basis_rho(dim: usize, i: usize) -> DensityOperator {
    Ket::basis(dim, i).unwrap().to_density()
}

#[test]
fn sample_outcome_examples() {
    let mut rng = SamplerState::new(1);
    assert_eq!(sample_outcome(&[1.0, 0.0], &mut rng).unwrap(), 0);
    assert_eq!(rng.draws(), 0);
    assert_eq!(sample_outcome(&[0.0, 1.0], &mut rng).unwrap(), 1);
    assert_eq!(rng.draws(), 0);

    let mut rng = SamplerState::new(2024);
    let n = 100_000;
    let zeros = (0..n)
        .filter(|_| sample_outcome(&[0.5, 0.5], &mut rng).unwrap() == 0)
        .count();
    let freq = zeros as f64 / n as f64;
    assert!((freq - 0.5).abs() <= 0.01, "{freq}");
    assert_eq!(rng.draws(), n as u64);

    assert!(matches!(sample_outcome(&[0.5, 0.4], &mut rng), Err(SimError::MalformedDistribution(_))));
    assert!(matches!(sample_outcome(&[1.5, -0.5], &mut rng), Err(SimError::MalformedDistribution(_))));
    assert!(matches!(sample_outcome(&[], &mut rng), Err(SimError::MalformedDistribution(_))));
}

#[test]
fn shot_seeds_are_distinct_and_stable() {
    let seeds: std::collections::HashSet<u64> = (0..1000).map(|k| shot_seed(7, k)).collect();
    assert_eq!(seeds.len(), 1000);
    assert_eq!(shot_seed(7, 3), shot_seed(7, 3));
    assert_ne!(shot_seed(7, 3), shot_seed(8, 3));
}

#[test]
fn step_examples() {
    let exe = Executable::from_source("q : qubit; skip;").unwrap();
    let c = Configuration::with_state(&exe, basis_rho(2, 1));
    let next = step(&c, None).unwrap();
    assert_eq!(next.len(), 1);
    assert!(next[0].is_terminal());
    assert!(next[0].state.distance(&basis_rho(2, 1)) < 1e-15);
    assert!(matches!(step(&next[0], None), Err(SimError::Terminal)));

    let exe = Executable::from_source("q : qubit; q := |0>;").unwrap();
    let c = Configuration::with_state(&exe, basis_rho(2, 1));
    let next = step(&c, None).unwrap();
    assert!(next[0].state.distance(&basis_rho(2, 0)) < 1e-15);

    // p_1 = tr(M_1†M_1 |1><1|) = 1, so the only successor continues the loop.
    let exe = Executable::from_source("q : qubit; meas M = computational; while M[q] = 1 do X[q]; od").unwrap();
    let c = Configuration::with_state(&exe, basis_rho(2, 1));
    let next = step(&c, None).unwrap();
    assert_eq!(next.len(), 1);
    assert_eq!(next[0].weight, 1.0);
    assert!(next[0].state.distance(&basis_rho(2, 1)) < 1e-15);
    let rest = next[0].remaining();
    assert_eq!(rest.len(), 2);
    assert_eq!(rest[0], Stmt::Unitary { gate: "X".into(), qubits: vec![QubitRef::whole("q")] });
    assert!(matches!(rest[1], Stmt::While { .. }));
    assert_eq!(next[0].event, Some(Event { site: 0, outcome: 1 }));
}

#[test]
fn loop_rules_one_iteration() {
    // X flips |1> to |0>; the second guard measurement exits.
    let exe = Executable::from_source("q : qubit; meas M = computational; while M[q] = 1 do X[q]; od").unwrap();
    let mut c = Configuration::with_state(&exe, basis_rho(2, 1));
    let mut events = Vec::new();
    while !c.is_terminal() {
        let mut next = step(&c, None).unwrap();
        assert_eq!(next.len(), 1);
        c = next.pop().unwrap();
        events.extend(c.event);
    }
    assert_eq!(events, vec![Event { site: 0, outcome: 1 }, Event { site: 0, outcome: 0 }]);
    assert!(c.state.distance(&basis_rho(2, 0)) < 1e-15);
}

#[test]
fn run_shot_examples() {
    let exe = Executable::from_source("q : qubit; q := |0>; skip;").unwrap();
    let r = run_shot(&exe, 1).unwrap();
    assert_eq!(r.steps, 2);
    assert!(r.final_state.distance(&basis_rho(2, 0)) < 1e-15);

    let exe = Executable::from_source(QLOOP).unwrap();
    for seed in 0..200 {
        let r = run_shot(&exe, seed).unwrap();
        assert!(r.final_state.distance(&basis_rho(2, 0)) < 1e-12);
        assert_eq!(r.outcomes.last(), Some(&(0, 0)));
        assert!(r.steps >= r.outcomes.len() as u64);
    }

    let exe = Executable::from_source("q : qubit; meas M = computational; X[q]; while M[q] = 1 do skip; od").unwrap();
    assert_eq!(run_shot(&exe, 3), Err(SimError::StepLimitExceeded { limit: DEFAULT_STEP_LIMIT }));
}

#[test]
fn deterministic_program_shots_are_identical() {
    let exe = Executable::from_source("a : qubit; b : qubit; H[a]; CNOT[a, b]; H[a]; CNOT[a, b];").unwrap();
    let first = run_shot(&exe, shot_seed(5, 0)).unwrap();
    for k in 1..10 {
        assert_eq!(run_shot(&exe, shot_seed(5, k)).unwrap(), first);
    }
    let stats = run_shots(&exe, 10, 5).unwrap();
    assert_eq!(stats.final_states.len(), 1);
    assert_eq!(stats.final_states[0].count, 10);
}

#[test]
fn qloop_shot_statistics() {
    let exe = Executable::from_source(QLOOP).unwrap();
    let stats = run_shots(&exe, 20_000, 42).unwrap();
    let hist = &stats.loop_histograms[&0];
    assert_eq!(hist.values().sum::<u64>(), 20_000);
    // P(enter) = 1/4; 5 sigma of Binomial(20000, 1/4) is about 306.
    let entries = stats.loop_entries(0) as f64;
    assert!((entries - 5000.0).abs() < 306.0, "{entries}");
    let outcome_total: u64 = stats.outcome_counts[&0].iter().sum();
    assert_eq!(outcome_total, stats.total_steps - 3 * 20_000 - stats.outcome_counts[&0][1]);
}

#[test]
fn qloop_distribution() {
    let exe = Executable::from_source(QLOOP).unwrap();
    let d = run_distribution(&exe, DEFAULT_MASS_THRESHOLD, 10_000).unwrap();
    assert_eq!(d.terminals.len(), 1);
    assert!(d.terminals[0].state.distance(&basis_rho(2, 0)) < 1e-12);
    // exit with 3/4 at once, then each further round halves: 3/4 + 1/4·(1/2 + 1/4 + …)
    assert!(d.residual < 1e-6);
    assert!((d.total_weight() + d.residual - 1.0).abs() < 1e-12);

    // the state after E, before the loop
    let mut c = Configuration::initial(&exe).unwrap();
    for _ in 0..3 {
        c = step(&c, None).unwrap().pop().unwrap();
    }
    let m = c.state.debug_matrix();
    assert!((m.get(0, 0) - c64(0.75, 0.0)).norm() < 1e-12);
    assert!((m.get(1, 1) - c64(0.25, 0.0)).norm() < 1e-12);
    assert!((m.get(0, 1) - c64(FRAC_1_SQRT_2 / 2.0, 0.0)).norm() < 1e-12);
}

#[test]
fn coin_distribution() {
    let exe = Executable::from_source(
        "q : qubit; meas M = computational; H[q]; if M[q] = 0 -> skip; [] 1 -> skip; fi",
    )
    .unwrap();
    let d = run_distribution(&exe, DEFAULT_MASS_THRESHOLD, DEFAULT_STEP_LIMIT).unwrap();
    assert_eq!(d.terminals.len(), 2);
    for t in &d.terminals {
        assert!((t.weight - 0.5).abs() < 1e-12);
    }
    assert_eq!(d.residual, 0.0);
}

fn grover_source(n: usize, target: usize, r: usize) -> String {
    let dim = 1usize << n;
    let oracle: Vec<String> = (0..dim).map(|i| if i == target { "-1".into() } else { "1".into() }).collect();
    let flip: Vec<String> = (0..dim).map(|i| if i == 0 { "1".into() } else { "-1".into() }).collect();
    let hs: String = (0..n).map(|i| format!("H[q[{i}]]; ")).collect();
    let mut s = format!(
        "q : qubit[{n}]; gate O = diag({}); gate F = diag({}); meas C = computational({n});\n{hs}\n",
        oracle.join(", "),
        flip.join(", ")
    );
    for _ in 0..r {
        s += &format!("O[q]; {hs}F[q]; {hs}\n");
    }
    s += "if C[q] = fi";
    s
}

#[test]
fn grover_distribution_matches_statevector() {
    let (n, target) = (3, 5);
    let dim = 8;
    let r = ((std::f64::consts::PI / 4.0) * (dim as f64).sqrt()).round() as usize;
    assert_eq!(r, 2);
    // statevector: uniform start, oracle flips the target, diffusion 2s - a
    let mut amp = vec![1.0 / (dim as f64).sqrt(); dim];
    for _ in 0..r {
        amp[target] = -amp[target];
        let mean = amp.iter().sum::<f64>() / dim as f64;
        for a in amp.iter_mut() {
            *a = 2.0 * mean - *a;
        }
    }
    let exe = Executable::from_source(&grover_source(n, target, r)).unwrap();
    let d = run_distribution(&exe, DEFAULT_MASS_THRESHOLD, DEFAULT_STEP_LIMIT).unwrap();
    for (i, a) in amp.iter().enumerate() {
        let w = d.weight_of(&basis_rho(dim, i), 1e-9);
        assert!((w - a * a).abs() < 1e-9, "{i}: {w} vs {}", a * a);
    }
}

fn gen(seed: u64) -> SourceProgram {
    random_program(&mut ChaCha8Rng::seed_from_u64(seed), &GenConfig::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn weight_is_conserved(seed in any::<u64>()) {
        let p = gen(seed);
        let exe = Executable::new(&p, &GateLibrary::standard()).unwrap();
        let d = run_distribution(&exe, 1e-4, 500).unwrap();
        prop_assert!((d.total_weight() + d.residual - 1.0).abs() < 1e-9);
        for t in &d.terminals {
            prop_assert!((t.state.trace() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn states_stay_normalized(seed in any::<u64>(), shot in any::<u64>()) {
        let p = gen(seed);
        let exe = Executable::new(&p, &GateLibrary::standard()).unwrap();
        let mut rng = SamplerState::new(shot);
        let mut c = Configuration::initial(&exe).unwrap();
        while !c.is_terminal() && c.steps < 2_000 {
            c = step(&c, Some(&mut rng)).unwrap().pop().unwrap();
            prop_assert!((c.state.trace() - 1.0).abs() < 1e-9);
            prop_assert!(c.state.debug_matrix().hermiticity_residual() < 1e-9);
        }
    }

    #[test]
    fn shots_are_deterministic(seed in any::<u64>(), shot in any::<u64>()) {
        let p = gen(seed);
        let exe = Executable::new(&p, &GateLibrary::standard()).unwrap();
        let a = run_shot_with(&exe, &mut SamplerState::new(shot), 5_000);
        let b = run_shot_with(&exe, &mut SamplerState::new(shot), 5_000);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn sampled_outcomes_have_positive_probability(p in proptest::collection::vec(0.0f64..1.0, 1..6), zero in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let mut p = p;
        let z = zero.index(p.len());
        p[z] = 0.0;
        let total: f64 = p.iter().sum();
        prop_assume!(total > 1e-3);
        let p: Vec<f64> = p.iter().map(|x| x / total).collect();
        let mut rng = SamplerState::new(seed);
        for _ in 0..50 {
            let i = sample_outcome(&p, &mut rng).unwrap();
            prop_assert!(p[i] >= ZERO_PROBABILITY);
        }
    }
}

#[test]
fn converging_branches_merge() {
    // every case leaves |1>, so the 2^40 paths collapse into one branch
    let mut src = String::from("q : qubit; meas M = computational; q := |0>;\n");
    for _ in 0..40 {
        src += "H[q]; if M[q] = 0 -> X[q]; [] 1 -> skip; fi;\n";
    }
    let exe = Executable::from_source(&src).unwrap();
    let d = run_distribution(&exe, 1e-6, 1_000).unwrap();
    assert_eq!(d.rounds, 40);
    assert_eq!(d.terminals.len(), 1);
    assert!((d.terminals[0].weight - 1.0).abs() < 1e-12);
    assert!(d.terminals[0].state.distance(&basis_rho(2, 1)) < 1e-12);
    assert_eq!(d.residual, 0.0);
}

#[test]
fn light_branches_are_dropped_after_merging() {
    // two outcomes of weight 1/2 each reach the loop with the same state
    let src = "q : qubit; p : qubit; meas M = computational;
        H[p]; if M[p] = 0 -> X[p]; [] 1 -> skip; fi;
        while M[q] = 1 do skip; od";
    let exe = Executable::from_source(src).unwrap();
    let d = run_distribution(&exe, 0.6, 100).unwrap();
    assert_eq!(d.terminals.len(), 1);
    assert!((d.terminals[0].weight - 1.0).abs() < 1e-12);
    assert_eq!(d.residual, 0.0);
}
