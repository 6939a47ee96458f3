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

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use proptest::prelude::*;

use super::*;
use crate::fqasm::{compile, vm_distribution};
use crate::lang::{parse, pretty_print, validate};
use crate::quantum::{c64, validate_kraus, ComplexMatrix, Complex64, DensityOperator, GateLibrary, Ket};
use crate::sim::{run_distribution, Distribution, Executable};

fn m2(rows: [[Complex64; 2]; 2]) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]).unwrap()
}

fn r(x: f64) -> Complex64 {
    c64(x, 0.0)
}

fn canonical(src: &str) -> String {
    pretty_print(&parse(src).unwrap())
}

fn declared_kraus(channel: &Bb84Channel) -> Vec<ComplexMatrix> {
    let p = parse(&bb84_source(false, Basis::Rectilinear, Basis::Rectilinear, channel)).unwrap();
    p.channel_kraus("E").unwrap()
}

fn same_distribution(a: &Distribution, b: &Distribution, tol: f64) {
    assert_eq!(a.terminals.len(), b.terminals.len());
    for t in &a.terminals {
        assert!((b.weight_of(&t.state, tol) - t.weight).abs() <= tol);
    }
    assert!((a.residual - b.residual).abs() <= tol);
}

fn cross_check(src: &str) {
    let p = parse(src).unwrap();
    let exe = Executable::new(&p, &GateLibrary::standard()).unwrap();
    let d_sim = run_distribution(&exe, 1e-6, 100_000).unwrap();
    let d_vm = vm_distribution(&compile(&p).unwrap(), 1e-6, 100_000).unwrap();
    same_distribution(&d_sim, &d_vm, 1e-9);
}

// ---------------------------------------------------------------- qloop

#[test]
fn qloop_counter() {
    let rep = qloop_run(100_000, 42).unwrap();
    assert!((24_500..=25_500).contains(&rep.entries), "{}", rep.entries);
    assert_eq!(rep.histogram.values().sum::<u64>(), 100_000);
    assert_eq!(rep.ratios.len(), 3);
    for (k, ratio) in &rep.ratios {
        assert!((0.45..=0.55).contains(ratio), "k = {k}: {ratio}");
    }
}

#[test]
fn qloop_first_state() {
    // E0 ρ E0† + E1 ρ E1† for ρ = |+⟩⟨+|, written out by hand
    let s = FRAC_1_SQRT_2;
    let (e0, e1) = ([[1.0, 0.0], [0.0, s]], [[0.0, s], [0.0, 0.0]]);
    let rho = [[0.5, 0.5], [0.5, 0.5]];
    let mut want = [[0.0; 2]; 2];
    for e in [e0, e1] {
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        want[i][j] += e[i][k] * rho[k][l] * e[j][l];
                    }
                }
            }
        }
    }
    let rho1 = qloop_rho1().unwrap();
    let m = rho1.debug_matrix();
    for i in 0..2 {
        for j in 0..2 {
            assert!((m.get(i, j) - r(want[i][j])).norm() < 1e-9);
        }
    }
    assert!((m.get(0, 0).re - 0.75).abs() < 1e-9);
    assert!((m.get(1, 1).re - 0.25).abs() < 1e-9);
    assert!((m.get(0, 1).re - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-9);
}

#[test]
fn qloop_terminates_in_zero() {
    let d = qloop_distribution().unwrap();
    assert_eq!(d.terminals.len(), 1);
    let zero = Ket::basis(2, 0).unwrap().to_density();
    assert!(d.terminals[0].state.distance(&zero) < 1e-9);
    assert!(d.residual < 1e-6);
    // 3/4 halts at once; of the 1/4 that loops, half halts per round
    let mut mass = 0.75;
    let mut looping = 0.25;
    while looping >= 1e-6 {
        mass += looping / 2.0;
        looping /= 2.0;
    }
    assert!((d.terminals[0].weight - mass).abs() < 1e-9);
}

#[test]
fn coin_splits_evenly() {
    let exe = Executable::from_source(COIN_SOURCE).unwrap();
    let d = run_distribution(&exe, 1e-6, 1000).unwrap();
    assert_eq!(d.terminals.len(), 2);
    for t in &d.terminals {
        assert!((t.weight - 0.5).abs() < 1e-12);
    }
}

// ---------------------------------------------------------------- programs

#[test]
fn bundled_programs_cross_check() {
    for (name, src) in programs() {
        let p = parse(src).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(validate(&p, &GateLibrary::standard()).is_ok(), "{name}");
        cross_check(src);
    }
}

#[test]
fn generated_programs_cross_check() {
    for ch in standard_channels() {
        for k in 0..8u8 {
            let (a, b) = (
                if k & 2 != 0 { Basis::Diagonal } else { Basis::Rectilinear },
                if k & 1 != 0 { Basis::Diagonal } else { Basis::Rectilinear },
            );
            cross_check(&bb84_source(k & 4 != 0, a, b, &ch));
        }
    }
    for (n, t) in [(2, vec![2]), (3, vec![1, 6]), (4, vec![9])] {
        let spec = GroverSpec::new(n, &t).unwrap();
        let r = spec.iterations(t.len());
        cross_check(&grover_source(n, &spec.oracle(), r, true));
        cross_check(&grover_source(n, &spec.oracle(), r, false));
    }
}

#[test]
fn bundled_files_match_generators() {
    let bb84 = bb84_source(true, Basis::Diagonal, Basis::Diagonal, &Bb84Channel::Identity);
    assert_eq!(canonical(BB84_SOURCE), canonical(&bb84));
    let spec = GroverSpec::new(3, &[5]).unwrap();
    assert_eq!(spec.iterations(1), 2);
    let grover = grover_source(3, &spec.oracle(), 2, true);
    assert_eq!(canonical(grover::GROVER_SOURCE), canonical(&grover));
}

// ---------------------------------------------------------------- bb84

#[test]
fn literal_kraus_sets_validate() {
    let (s8, h, q) = (1.0 / 8f64.sqrt(), 0.5, 3f64.sqrt() / 2.0);
    let z = r(0.0);
    let listed: Vec<(Bb84Channel, Vec<ComplexMatrix>)> = vec![
        (
            Bb84Channel::Depolarizing(0.5),
            vec![
                m2([[r(5f64.sqrt() / 8f64.sqrt()), z], [z, r(5f64.sqrt() / 8f64.sqrt())]]),
                m2([[z, r(s8)], [r(s8), z]]),
                m2([[z, c64(0.0, -s8)], [c64(0.0, s8), z]]),
                m2([[r(s8), z], [z, r(-s8)]]),
            ],
        ),
        (
            Bb84Channel::AmplitudeDamping(0.5),
            vec![
                m2([[r(1.0), z], [z, r(FRAC_1_SQRT_2)]]),
                m2([[z, r(FRAC_1_SQRT_2)], [z, z]]),
            ],
        ),
        (Bb84Channel::BitFlip(0.25), vec![m2([[r(h), z], [z, r(h)]]), m2([[z, r(q)], [r(q), z]])]),
        (
            Bb84Channel::BitFlip(0.5),
            vec![
                m2([[r(FRAC_1_SQRT_2), z], [z, r(FRAC_1_SQRT_2)]]),
                m2([[z, r(FRAC_1_SQRT_2)], [r(FRAC_1_SQRT_2), z]]),
            ],
        ),
        (Bb84Channel::BitFlip(0.75), vec![m2([[r(q), z], [z, r(q)]]), m2([[z, r(h)], [r(h), z]])]),
    ];
    for (ch, kraus) in listed {
        assert!(validate_kraus(&kraus).is_ok(), "{ch}");
        let declared = declared_kraus(&ch);
        let library = ch.super_operator().unwrap();
        assert_eq!(declared.len(), kraus.len());
        for (k, want) in kraus.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    assert!((declared[k].get(i, j) - want.get(i, j)).norm() < 1e-12, "{ch} K{k}");
                    assert!((library.kraus()[k].get(i, j) - want.get(i, j)).norm() < 1e-12, "{ch} K{k}");
                }
            }
        }
    }
}

#[test]
fn channel_names_round_trip() {
    for ch in standard_channels() {
        assert_eq!(ch.to_string().parse::<Bb84Channel>().unwrap(), ch);
    }
    assert!("bit_flip(1.5)".parse::<Bb84Channel>().is_err());
    assert!("phase_flip(0.5)".parse::<Bb84Channel>().is_err());
}

fn check_transcript(t: &Bb84Transcript, n: usize) {
    for v in [&t.raw_key, &t.basis_raw, &t.measure_raw, &t.temp_result, &t.correct_broad] {
        assert_eq!(v.len(), n);
    }
    let agree = t.correct_broad.iter().filter(|c| **c == 1).count();
    assert_eq!(t.final_alice_key.len(), agree);
    assert_eq!(t.final_bob_key.len(), agree);
    assert!(t.sample_positions.iter().all(|p| *p < agree));
    for i in 0..n {
        let want = ["|0>", "|1>", "|+>", "|->"][(2 * t.basis_raw[i] + t.raw_key[i]) as usize];
        assert_eq!(t.ket_enc[i], want);
        assert_eq!(t.correct_broad[i], (t.basis_raw[i] == t.measure_raw[i]) as u8);
    }
}

#[test]
fn noiseless_session() {
    let t = bb84_run(&Bb84Session::new(1024, Bb84Channel::Identity, 7)).unwrap();
    check_transcript(&t, 1024);
    assert!((409..=614).contains(&t.sifted_len()), "{}", t.sifted_len());
    assert_eq!(t.final_alice_key, t.final_bob_key);
    assert!(t.verdict && t.keys_equal);
}

#[test]
fn noiseless_sampling_always_succeeds() {
    for f in [0.1, 0.5, 0.9] {
        let table = bb84_channel_sweep(&[Bb84Channel::Identity], &[64], &[f], 100, 3).unwrap();
        assert_eq!(table.rows[0].successes, 100);
    }
}

#[test]
fn bit_flip_strength_orders_success() {
    let run = |p: f64| -> u64 {
        (0..100)
            .map(|k| {
                let s = Bb84Session::new(16, Bb84Channel::BitFlip(p), 1000 + k).with_sampling(0.1);
                bb84_run(&s).unwrap().verdict as u64
            })
            .sum()
    };
    let (low, high) = (run(0.25), run(0.75));
    assert!(high > low, "{low} vs {high}");
}

#[test]
fn sweep_trends() {
    let channels = standard_channels();
    let (lengths, fractions) = ([16, 64, 256], [0.1, 0.25]);
    let table = bb84_channel_sweep(&channels, &lengths, &fractions, 100, 11).unwrap();
    assert_eq!(table.rows.len(), channels.len() * 6);
    for n in lengths {
        for f in fractions {
            assert_eq!(table.successes(&Bb84Channel::Identity, n, f), Some(100));
            let s: Vec<u64> = [0.25, 0.5, 0.75]
                .iter()
                .map(|p| table.successes(&Bb84Channel::BitFlip(*p), n, f).unwrap())
                .collect();
            assert!(s[0] <= s[1] && s[1] <= s[2], "n = {n}, s = {f}: {s:?}");
        }
    }
    for f in fractions {
        let s: Vec<u64> =
            lengths.iter().map(|n| table.successes(&Bb84Channel::BitFlip(0.25), *n, f).unwrap()).collect();
        assert!(s[0] >= s[1] && s[1] >= s[2], "s = {f}: {s:?}");
    }
    let csv = table.to_csv();
    assert!(csv.starts_with("channel,length,fraction,sessions,successes,success_rate\n"));
    assert_eq!(csv.lines().count(), table.rows.len() + 1);
    assert!(table.summary().contains("bit_flip(0.25)"));
}

#[test]
fn sweep_is_deterministic() {
    let ch = [Bb84Channel::Depolarizing(0.5), Bb84Channel::AmplitudeDamping(0.5)];
    let a = bb84_channel_sweep(&ch, &[32], &[0.2], 20, 5).unwrap();
    let b = bb84_channel_sweep(&ch, &[32], &[0.2], 20, 5).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
}

#[test]
fn multi_client_sessions() {
    let ts = bb84_multi_client(8, 1024, Bb84Channel::Identity, None, 99).unwrap();
    assert_eq!(ts.len(), 8);
    assert!(ts.iter().all(|t| t.verdict));
    for i in 0..8 {
        assert_eq!(ts[i].client, i as u64);
        for j in 0..i {
            assert_ne!(ts[i].final_alice_key, ts[j].final_alice_key);
        }
    }
    // each client's session stands alone
    let mut s = Bb84Session::new(1024, Bb84Channel::Identity, 99);
    s.client = 5;
    assert_eq!(bb84_run(&s).unwrap(), ts[5]);
}

#[test]
fn single_client_is_a_plain_session() {
    let one = bb84_multi_client(1, 200, Bb84Channel::BitFlip(0.5), Some(0.3), 4).unwrap();
    let plain = bb84_run(&Bb84Session::new(200, Bb84Channel::BitFlip(0.5), 4).with_sampling(0.3)).unwrap();
    assert_eq!(one, vec![plain]);
}

#[test]
fn bb84_rejects_bad_sessions() {
    assert!(bb84_run(&Bb84Session::new(0, Bb84Channel::Identity, 1)).is_err());
    assert!(bb84_run(&Bb84Session::new(8, Bb84Channel::Identity, 1).with_sampling(1.5)).is_err());
    assert!(bb84_multi_client(0, 8, Bb84Channel::Identity, None, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sifted_bits_survive_the_identity_channel(seed in any::<u64>(), n in 1usize..96) {
        let t = bb84_run(&Bb84Session::new(n, Bb84Channel::Identity, seed)).unwrap();
        check_transcript(&t, n);
        for i in 0..n {
            if t.correct_broad[i] == 1 {
                prop_assert_eq!(t.temp_result[i], t.raw_key[i]);
            }
        }
    }

    #[test]
    fn basis_agreement_is_near_half(seed in any::<u64>()) {
        let n = 1024.0;
        let t = bb84_run(&Bb84Session::new(1024, Bb84Channel::Identity, seed)).unwrap();
        let sigma = (n * 0.25f64).sqrt();
        prop_assert!((t.sifted_len() as f64 - n / 2.0).abs() <= 5.0 * sigma);
    }

    #[test]
    fn oracles_are_involutions(n in 1usize..7, raw in proptest::collection::vec(any::<usize>(), 1..4)) {
        let dim = 1usize << n;
        let mut t: Vec<usize> = raw.iter().map(|x| x % dim).collect();
        t.sort_unstable();
        t.dedup();
        prop_assume!(t.len() < dim);
        let spec = GroverSpec::new(n, &t).unwrap();
        let o = spec.oracle();
        let b = spec.blind_box(&t[..1]);
        for i in 0..dim {
            prop_assert_eq!(o[i] * o[i], 1.0);
            prop_assert_eq!(b[i] * b[i], 1.0);
            prop_assert_eq!(o[i] == -1.0, t.contains(&i));
        }
    }
}

// ---------------------------------------------------------------- grover

/// Real statevector iteration: flip the marked signs, reflect about the mean.
fn statevector(dim: usize, marked: &[usize], r: usize) -> Vec<f64> {
    let mut a = vec![1.0 / (dim as f64).sqrt(); dim];
    for _ in 0..r {
        for &m in marked {
            a[m] = -a[m];
        }
        let mean = a.iter().sum::<f64>() / dim as f64;
        for x in a.iter_mut() {
            *x = 2.0 * mean - *x;
        }
    }
    a.iter().map(|x| x * x).collect()
}

#[test]
fn iteration_counts() {
    for (n, r) in [(2, 2), (3, 2), (4, 3), (6, 6)] {
        assert_eq!(GroverSpec::new(n, &[1]).unwrap().iterations(1), r);
        assert_eq!(r, (PI / 4.0 * ((1usize << n) as f64).sqrt()).round() as usize);
    }
    let spec = GroverSpec::new(6, &[2, 14]).unwrap().with_rule(IterationRule::Marked);
    assert_eq!(spec.iterations(2), 4);
}

#[test]
fn amplitude_formula() {
    for n in [2, 3, 4, 6] {
        let dim = 1usize << n;
        for t in [vec![1], vec![1, dim - 2]] {
            let spec = GroverSpec::new(n, &t).unwrap();
            for r in [1, spec.iterations(t.len())] {
                let p = grover_probabilities(n, &spec.oracle(), r).unwrap();
                let got: f64 = t.iter().map(|&i| p[i]).sum();
                let want = formula_probability(dim, t.len(), r);
                assert!((got - want).abs() < 1e-9, "N = {dim}, T = {t:?}, r = {r}: {got} vs {want}");
                let sv: f64 = t.iter().map(|&i| statevector(dim, &t, r)[i]).sum();
                assert!((got - sv).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn single_target_64() {
    let spec = GroverSpec::new(6, &[5]).unwrap();
    let p = grover_probabilities(6, &spec.oracle(), 6).unwrap();
    assert!((p[5] - statevector(64, &[5], 6)[5]).abs() < 1e-9);
    assert!(p[5] >= 0.99, "{}", p[5]);
    let rep = grover_run(&spec, GroverMode::Single, 1).unwrap();
    assert_eq!(rep.rounds[0].oracle_calls, 6);
    assert_eq!(rep.found, vec![5]);
}

#[test]
fn four_items_one_call() {
    let spec = GroverSpec::new(2, &[2]).unwrap();
    assert_eq!(spec.iterations(1), 2);
    assert!((formula_probability(4, 1, 2) - 0.25).abs() < 1e-12);
    let spec = spec.with_iterations(1);
    let p = grover_probabilities(2, &spec.oracle(), 1).unwrap();
    assert!((p[2] - 1.0).abs() < 1e-12);
    for seed in 0..20 {
        let rep = grover_run(&spec, GroverMode::Single, seed).unwrap();
        assert_eq!(rep.rounds[0].measured, 2);
    }
}

#[test]
fn two_targets_first_round() {
    // a fixed r = 6 overshoots with two marks: the bulk lands elsewhere
    let fixed = GroverSpec::new(6, &[2, 14]).unwrap();
    let p = grover_probabilities(6, &fixed.oracle(), fixed.iterations(2)).unwrap();
    let both = p[2] + p[14];
    assert!((both - formula_probability(64, 2, 6)).abs() < 1e-9);
    assert!(both < 0.6, "{both}");

    let tuned = fixed.clone().with_rule(IterationRule::Marked);
    let p = grover_probabilities(6, &tuned.oracle(), tuned.iterations(2)).unwrap();
    assert!(p[2] + p[14] >= 0.9);
    assert!((p[2] - p[14]).abs() < 1e-12);
}

#[test]
fn wrong_index_degrades_next_round() {
    for rule in [IterationRule::Fixed, IterationRule::Marked] {
        let spec = GroverSpec::new(6, &[2, 14]).unwrap().with_rule(rule);
        let first = next_round_success(&spec, &[]).unwrap();
        let after_hit = next_round_success(&spec, &[2]).unwrap();
        let after_miss = next_round_success(&spec, &[5]).unwrap();
        assert!(after_miss < first, "{rule:?}: {after_miss} vs {first}");
        assert!(after_miss < after_hit, "{rule:?}: {after_miss} vs {after_hit}");
    }
}

#[test]
fn multi_mode_rounds() {
    let spec = GroverSpec::new(6, &[2, 14]).unwrap().with_rule(IterationRule::Marked);
    for seed in 0..10 {
        let rep = grover_run(&spec, GroverMode::Multi, seed).unwrap();
        assert!(rep.rounds.len() <= 4);
        assert_eq!(rep.oracle_calls, rep.rounds.iter().map(|r| r.oracle_calls).sum::<usize>());
        for (k, round) in rep.rounds.iter().enumerate() {
            let blind = &rep.reported[..k];
            let want: Vec<usize> = (0..64).filter(|i| spec.combined_oracle(blind)[*i] < 0.0).collect();
            assert_eq!(round.marked, want);
        }
        if rep.found.len() == 2 {
            assert!(rep.found.contains(&2) && rep.found.contains(&14));
        } else {
            assert_eq!(rep.rounds.len(), 4);
        }
    }
    let a = grover_run(&spec, GroverMode::Multi, 3).unwrap();
    let b = grover_run(&spec, GroverMode::Multi, 3).unwrap();
    assert_eq!(a.reported, b.reported);
}

#[test]
fn grover_spec_rejects_bad_targets() {
    assert!(matches!(GroverSpec::new(3, &[8]), Err(ExperimentError::InvalidTarget(_))));
    assert!(matches!(GroverSpec::new(3, &[]), Err(ExperimentError::InvalidTarget(_))));
    assert!(matches!(GroverSpec::new(1, &[0, 1]), Err(ExperimentError::InvalidTarget(_))));
    assert!(matches!(GroverSpec::new(2, &[1, 1]), Err(ExperimentError::InvalidTarget(_))));
    assert!(GroverSpec::new(0, &[0]).is_err());
}

#[test]
fn rho_density_helpers_agree() {
    let rho1 = qloop_rho1().unwrap();
    let direct = crate::quantum::SuperOperator::qloop().apply(&Ket::plus().to_density()).unwrap();
    assert!(rho1.distance(&direct) < 1e-12);
    let _: &DensityOperator = &rho1;
}
