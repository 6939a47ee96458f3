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

//! Text, JSON and CSV renderings of command results.

use std::fmt::Write;

use qwhile_core::experiments::{Bb84Session, Bb84Transcript, GroverReport, QloopReport};
use qwhile_core::quantum::DensityOperator;
use qwhile_core::sim::{Distribution, ShotStats, SiteKind};
use qwhile_core::synthesis::GateSequence;
use serde::Serialize;
use serde_json::json;

use crate::Format;

pub fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn diag(rho: &DensityOperator) -> Vec<f64> {
    // rounding keeps -0.0 and 1e-17 noise out of the printed tables
    rho.diagonal().iter().map(|p| (p * 1e12).round() / 1e12 + 0.0).collect()
}

fn fmt_diag(rho: &DensityOperator) -> String {
    let cells: Vec<String> = diag(rho).iter().map(|p| format!("{p}")).collect();
    format!("[{}]", cells.join(", "))
}

fn kind(k: SiteKind) -> &'static str {
    match k {
        SiteKind::Case => "case",
        SiteKind::Loop => "loop",
    }
}

pub fn shots(program: &str, sites: &[SiteKind], st: &ShotStats, format: Format) -> String {
    match format {
        Format::Json => json(&json!({
            "program": program,
            "mode": "sampled",
            "shots": st.shots,
            "seed": st.seed,
            "sites": sites,
            "outcome_counts": st.outcome_counts,
            "loop_histograms": st.loop_histograms,
            "loop_entries": st.loop_histograms.keys().map(|s| (*s, st.loop_entries(*s))).collect::<std::collections::BTreeMap<_, _>>(),
            "total_steps": st.total_steps,
            "final_states": st.final_states.iter().map(|f| json!({"count": f.count, "diagonal": diag(&f.state)})).collect::<Vec<_>>(),
            "final_states_truncated": st.final_states_truncated,
        })),
        Format::Csv => {
            let mut s = String::from("kind,site,key,count\n");
            for (site, outcome, count) in st.outcome_rows() {
                let _ = writeln!(s, "outcome,{site},{outcome},{count}");
            }
            for (site, h) in &st.loop_histograms {
                for (k, count) in h {
                    let _ = writeln!(s, "circles,{site},{k},{count}");
                }
            }
            s
        }
        Format::Text => {
            let mut s = format!("program: {program}\nmode: sampled\nshots: {}\nseed: {}\n", st.shots, st.seed);
            for (site, counts) in &st.outcome_counts {
                let cells: Vec<String> = counts.iter().enumerate().map(|(o, c)| format!("{o}={c}")).collect();
                let _ = writeln!(s, "site {site} ({}): {}", kind(sites[*site]), cells.join(" "));
            }
            for (site, h) in &st.loop_histograms {
                let _ = writeln!(s, "loop {site}: entered in {} shots", st.loop_entries(*site));
                for (k, count) in h {
                    let _ = writeln!(s, "  circles {k}: {count}");
                }
            }
            let _ = writeln!(s, "steps: {}", st.total_steps);
            let _ = writeln!(
                s,
                "final states: {}{}",
                st.final_states.len(),
                if st.final_states_truncated { " (truncated)" } else { "" }
            );
            for f in &st.final_states {
                let _ = writeln!(s, "  {:>8}  diag {}", f.count, fmt_diag(&f.state));
            }
            s
        }
    }
}

pub fn distribution(program: &str, d: &Distribution, format: Format) -> String {
    match format {
        Format::Json => json(&json!({
            "program": program,
            "mode": "distribution",
            "terminals": d.terminals.iter().map(|t| json!({
                "weight": t.weight,
                "diagonal": diag(&t.state),
                "matrix": t.state.debug_matrix().to_rows().iter()
                    .map(|r| r.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "residual": d.residual,
            "rounds": d.rounds,
        })),
        Format::Csv => {
            let mut s = String::from("terminal,weight,basis,probability\n");
            for (i, t) in d.terminals.iter().enumerate() {
                for (b, p) in diag(&t.state).iter().enumerate() {
                    let _ = writeln!(s, "{i},{},{b},{p}", t.weight);
                }
            }
            s
        }
        Format::Text => {
            let mut s = format!("program: {program}\nmode: distribution\nterminals: {}\n", d.terminals.len());
            for t in &d.terminals {
                let _ = writeln!(s, "  weight {:.12}  diag {}", t.weight, fmt_diag(&t.state));
            }
            let _ = writeln!(s, "residual: {:e}\nrounds: {}", d.residual, d.rounds);
            s
        }
    }
}

pub fn synthesis(seq: &GateSequence, error: f64, epsilon: f64, method: &str, format: Format) -> String {
    let counts = seq.counts();
    match format {
        Format::Json => json(&json!({
            "method": method,
            "n_qubits": seq.n_qubits,
            "requested_epsilon": epsilon,
            "epsilon_total": seq.epsilon,
            "reconstruction_error": error,
            "gate_count": seq.len(),
            "cnot_count": seq.cnot_count(),
            "counts": counts,
            "gates": seq.gates.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from("index,gate,qubits\n");
            for (i, g) in seq.gates.iter().enumerate() {
                let qs: Vec<String> = g.qubits.iter().map(|q| q.to_string()).collect();
                let _ = writeln!(s, "{i},{},{}", g.name, qs.join(" "));
            }
            s
        }
        Format::Text => {
            let mut s = seq.to_text();
            let _ = writeln!(s, "# method: {method}");
            let _ = writeln!(s, "# qubits: {}", seq.n_qubits);
            let _ = writeln!(s, "# gates: {} ({} CNOT)", seq.len(), seq.cnot_count());
            for (name, c) in &counts {
                let _ = writeln!(s, "#   {name}: {c}");
            }
            let _ = writeln!(s, "# epsilon requested: {epsilon:e}");
            let _ = writeln!(s, "# epsilon total: {:e}", seq.epsilon);
            let _ = writeln!(s, "# reconstruction error: {error:e}");
            s
        }
    }
}

pub fn qloop(r: &QloopReport, format: Format) -> String {
    match format {
        Format::Json => json(r),
        Format::Csv => {
            let mut s = String::from("circles,shots\n");
            for (k, c) in &r.histogram {
                let _ = writeln!(s, "{k},{c}");
            }
            s
        }
        Format::Text => {
            let mut s = format!("shots: {}\nseed: {}\nentries: {}\n", r.shots, r.seed, r.entries);
            for (k, c) in &r.histogram {
                let _ = writeln!(s, "  circles {k}: {c}");
            }
            for (k, ratio) in &r.ratios {
                let _ = writeln!(s, "ratio {}/{k}: {ratio:.4}", k + 1);
            }
            s
        }
    }
}

fn bits(v: &[u8]) -> String {
    v.iter().map(|b| char::from(b'0' + b)).collect()
}

pub fn bb84(s: &Bb84Session, t: &Bb84Transcript, format: Format) -> String {
    match format {
        Format::Json => json(&json!({"session": s, "transcript": t})),
        Format::Csv => {
            let mut out = String::from("index,raw_key,basis,ket,bob_basis,result,agree\n");
            for i in 0..t.raw_key.len() {
                let _ = writeln!(
                    out,
                    "{i},{},{},{},{},{},{}",
                    t.raw_key[i], t.basis_raw[i], t.ket_enc[i], t.measure_raw[i], t.temp_result[i], t.correct_broad[i]
                );
            }
            out
        }
        Format::Text => {
            let mut out = format!("channel: {}\nn: {}\nseed: {}\n", s.channel, s.n, s.seed);
            for (label, v) in [
                ("rawKeyArray", &t.raw_key),
                ("basisRawArray", &t.basis_raw),
                ("measureRawArray", &t.measure_raw),
                ("tempResult", &t.temp_result),
                ("correctBroadArray", &t.correct_broad),
                ("FinalAliceKey", &t.final_alice_key),
                ("FinalBobKey", &t.final_bob_key),
            ] {
                let _ = writeln!(out, "{label}: {}", bits(v));
            }
            let _ = writeln!(out, "KetEncArray: {}", t.ket_enc.join(""));
            let _ = writeln!(out, "sifted length: {}", t.sifted_len());
            if let Some(f) = s.sample_fraction {
                let _ = writeln!(out, "sampling fraction: {f}\nsampled positions: {:?}", t.sample_positions);
            }
            let _ = writeln!(out, "keys equal: {}", t.keys_equal);
            let _ = writeln!(out, "verdict: {}", if t.verdict { "success" } else { "failure" });
            out
        }
    }
}

pub fn bb84_multi(seed: u64, ts: &[Bb84Transcript], format: Format) -> String {
    match format {
        Format::Json => json(&json!({"seed": seed, "clients": ts})),
        _ => {
            let mut s = String::new();
            if format == Format::Text {
                let _ = writeln!(s, "seed: {seed}\nclients: {}", ts.len());
            }
            s += "client,sifted_length,keys_equal,verdict\n";
            for t in ts {
                let _ = writeln!(s, "{},{},{},{}", t.client, t.sifted_len(), t.keys_equal, t.verdict);
            }
            if format == Format::Text {
                let ok = ts.iter().filter(|t| t.verdict).count();
                let _ = writeln!(s, "successes: {ok}/{}", ts.len());
            }
            s
        }
    }
}

pub fn grover(r: &GroverReport, format: Format) -> String {
    match format {
        Format::Json => json(r),
        Format::Csv => {
            let mut s = String::from("round,oracle_calls,measured,correct,success_probability\n");
            for x in &r.rounds {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    x.round, x.oracle_calls, x.measured, x.correct, x.success_probability
                );
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "N: {}\ntargets: {:?}\nmode: {:?}\nrule: {:?}\nseed: {}\n",
                1usize << r.n,
                r.targets,
                r.mode,
                r.rule,
                r.seed
            );
            for x in &r.rounds {
                let mut top: Vec<(usize, f64)> = x.distribution.iter().copied().enumerate().collect();
                top.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                let top: Vec<String> = top.iter().take(4).map(|(i, p)| format!("|{i}>: {p:.6}")).collect();
                let _ = writeln!(
                    s,
                    "round {}: r = {}, marked {:?}, success probability {:.6}, measured {} ({})",
                    x.round,
                    x.oracle_calls,
                    x.marked,
                    x.success_probability,
                    x.measured,
                    if x.correct { "correct" } else { "wrong" }
                );
                let _ = writeln!(s, "  most likely: {}", top.join(", "));
            }
            let found: Vec<String> = r.found.iter().map(|f| f.to_string()).collect();
            let _ = writeln!(s, "found: {}\noracle calls: {}", found.join(", "), r.oracle_calls);
            s
        }
    }
}
