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

use std::path::PathBuf;
use std::process::{Command, Output};

fn qwhile(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwhile")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn program(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "programs", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
        .trim()
        .to_string()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn matrix_json(rows: &[Vec<(f64, f64)>]) -> String {
    let v: Vec<Vec<[f64; 2]>> = rows.iter().map(|r| r.iter().map(|(a, b)| [*a, *b]).collect()).collect();
    serde_json::to_string(&v).unwrap()
}

#[test]
fn run_qloop_counts_entries() {
    let o = qwhile(&["run", &program("qloop.qw"), "--shots", "100000", "--seed", "42"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let entries: u64 = field(&text, "loop 0: entered in").trim_end_matches(" shots").parse().unwrap();
    assert!((24_500..=25_500).contains(&entries), "{entries}");
    assert_eq!(field(&text, "seed:"), "42");

    let e = qwhile(&["experiment", "qloop", "--shots", "100000", "--seed", "42"]);
    assert!(e.status.success());
    assert_eq!(field(&stdout(&e), "entries:").parse::<u64>().unwrap(), entries);
}

#[test]
fn run_reports_syntax_errors_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_temp(&dir, "bad.qw", "q : qubit;\nH[q]\nskip;\n");
    let o = qwhile(&["run", &bad]);
    assert!(!o.status.success());
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("bad.qw:3:"), "{}", stderr(&o));
}

#[test]
fn run_coin_distribution() {
    let o = qwhile(&["run", &program("coin.qw"), "--mode", "distribution"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(field(&text, "terminals:"), "2");
    assert_eq!(text.matches("weight 0.500000000000").count(), 2);

    let j = qwhile(&["run", &program("coin.qw"), "--mode", "distribution", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    for t in v["terminals"].as_array().unwrap() {
        assert!((t["weight"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn run_csv_and_determinism() {
    let args = ["run", &program("coin.qw"), "--shots", "500", "--seed", "9", "--format", "csv"];
    let (a, b) = (qwhile(&args), qwhile(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("kind,site,key,count\n"));
    let total: u64 = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 500);
}

#[test]
fn compile_is_deterministic_and_checked() {
    for name in ["qloop.qw", "coin.qw", "bb84.qw", "grover.qw"] {
        let a = qwhile(&["compile", &program(name), "--check"]);
        assert!(a.status.success(), "{name}: {}", stderr(&a));
        assert!(stderr(&a).contains("check: pass"), "{name}");
        let b = qwhile(&["compile", &program(name)]);
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
}

#[test]
fn compile_case_listing_shape() {
    let dir = tempfile::tempdir().unwrap();
    let src = write_temp(
        &dir,
        "case.qw",
        "q : qubit;\nmeas M = computational;\nq := |0>;\nH[q];\nif M[q] = 0 -> X[q]; [] 1 -> H[q]; fi\n",
    );
    let out = dir.path().join("case.fqasm");
    let o = qwhile(&["compile", &src, "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(out).unwrap();
    let ops: Vec<&str> = text
        .lines()
        .filter(|l| !l.is_empty() && !l.contains(" : ") && !l.starts_with("meas"))
        .map(|l| l.split(['(', ' ', ':']).next().unwrap())
        .collect();
    assert_eq!(ops.first(), Some(&"INIT"));
    assert!(ops.contains(&"MOV") && ops.contains(&"CMP") && ops.contains(&"JE") && ops.contains(&"JMP"));
}

#[test]
fn synthesize_hadamard() {
    let dir = tempfile::tempdir().unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = write_temp(&dir, "h.json", &matrix_json(&[vec![(s, 0.0), (s, 0.0)], vec![(s, 0.0), (-s, 0.0)]]));
    let o = qwhile(&["synthesize", &h, "--gates", "H,T", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["gate_count"], 1);
    assert_eq!(v["gates"][0], "H q0");
    assert_eq!(v["reconstruction_error"].as_f64().unwrap(), 0.0);
}

type C = (f64, f64);

fn mul(a: &[Vec<C>], b: &[Vec<C>]) -> Vec<Vec<C>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold((0.0, 0.0), |(re, im), k| {
                        let (x, y) = (a[i][k], b[k][j]);
                        (re + x.0 * y.0 - x.1 * y.1, im + x.0 * y.1 + x.1 * y.0)
                    })
                })
                .collect()
        })
        .collect()
}

fn kron(a: &[Vec<C>], b: &[Vec<C>]) -> Vec<Vec<C>> {
    let (n, m) = (a.len(), b.len());
    (0..n * m)
        .map(|i| {
            (0..n * m)
                .map(|j| {
                    let (x, y) = (a[i / m][j / m], b[i % m][j % m]);
                    (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0)
                })
                .collect()
        })
        .collect()
}

/// `(Ry(1.1) ⊗ Rz(0.7)) · CNOT · (Rz(0.3) ⊗ Ry(−2.0))`.
fn two_qubit_unitary() -> Vec<Vec<C>> {
    let ry = |t: f64| {
        let (s, c) = (t / 2.0).sin_cos();
        vec![vec![(c, 0.0), (-s, 0.0)], vec![(s, 0.0), (c, 0.0)]]
    };
    let rz = |t: f64| {
        let (s, c) = (t / 2.0).sin_cos();
        vec![vec![(c, -s), (0.0, 0.0)], vec![(0.0, 0.0), (c, s)]]
    };
    let (o, z) = ((1.0, 0.0), (0.0, 0.0));
    let cnot = vec![vec![o, z, z, z], vec![z, o, z, z], vec![z, z, z, o], vec![z, z, o, z]];
    mul(&mul(&kron(&ry(1.1), &rz(0.7)), &cnot), &kron(&rz(0.3), &ry(-2.0)))
}

#[test]
fn synthesize_two_qubit_within_budget() {
    let dir = tempfile::tempdir().unwrap();
    let rows = two_qubit_unitary();
    let path = write_temp(&dir, "u.json", &matrix_json(&rows));
    let o = qwhile(&["synthesize", &path, "--method", "qsd", "--epsilon", "1e-3", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let err = v["reconstruction_error"].as_f64().unwrap();
    let eps = v["epsilon_total"].as_f64().unwrap();
    assert!(err <= eps + 1e-10, "{err} > {eps}");
    assert!(v["cnot_count"].as_u64().unwrap() <= 3);
}

#[test]
fn synthesize_rejects_non_unitary() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(&dir, "m.json", &matrix_json(&[vec![(1.0, 0.0), (0.0, 0.0)], vec![(0.0, 0.0), (2.0, 0.0)]]));
    let o = qwhile(&["synthesize", &p]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("residual"), "{}", stderr(&o));
}

#[test]
fn sweep_identity_column() {
    let o = qwhile(&["experiment", "bb84-sweep", "--sessions", "100", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let identity: Vec<&str> = text.lines().filter(|l| l.starts_with("\"identity\"")).collect();
    assert_eq!(identity.len(), 9);
    assert!(identity.iter().all(|l| l.split(',').nth(4) == Some("100")));
}

#[test]
fn grover_reports_calls_and_answer() {
    let o = qwhile(&["experiment", "grover", "--n", "6", "--targets", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("r = 6"), "{text}");
    assert_eq!(field(&text, "found:"), "5");
}

#[test]
fn bb84_commands() {
    let o = qwhile(&["experiment", "bb84", "--n", "256", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["transcript"]["verdict"], true);
    let m = qwhile(&["experiment", "bb84-multi", "--clients", "4", "--n", "128"]);
    assert!(m.status.success());
    assert_eq!(field(&stdout(&m), "successes:"), "4/4");
    let bad = qwhile(&["experiment", "bb84", "--channel", "phase_flip(0.3)"]);
    assert!(!bad.status.success());
}

#[test]
fn unknown_experiment_fails() {
    let o = qwhile(&["experiment", "teleport"]);
    assert!(!o.status.success());
}
