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

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::generate::{random_program, GenConfig};
use super::*;
use crate::quantum::{c64, GateLibrary};

const QLOOP: &str = "
q : qubit;
meas M = computational;
channel E = {[[1, 0], [0, 1/sqrt(2)]], [[0, 1/sqrt(2)], [0, 0]]};

q := |0>;
H[q];
E[q];
while M[q] = 1 do
    H[q];
od;
";

fn q() -> QubitRef {
    QubitRef::whole("q")
}

#[test]
fn init_only() {
    let p = parse("q : qubit; q := |0>;").unwrap();
    assert_eq!(p.body, Stmt::Seq(vec![Stmt::Init(q())]));
    assert_eq!(p.registers(), vec![("q", 1)]);
}

#[test]
fn loop_program_shape() {
    let p = parse(QLOOP).unwrap();
    let Stmt::Seq(body) = &p.body else { panic!() };
    assert_eq!(body.len(), 4);
    assert_eq!(
        body[3],
        Stmt::While {
            meas: "M".into(),
            qubits: vec![q()],
            body: Box::new(Stmt::Seq(vec![Stmt::Unitary {
                gate: "H".into(),
                qubits: vec![q()]
            }])),
        }
    );
    assert_eq!(body[2], Stmt::Channel { channel: "E".into(), qubits: vec![q()] });
    assert!(validate(&p, &GateLibrary::standard()).is_ok());
}

#[test]
fn guard_needs_two_outcomes() {
    let src = "q : qubit[2]; meas M = {[[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]], \
               [[0,0,0,0],[0,1,0,0],[0,0,0,0],[0,0,0,0]], \
               [[0,0,0,0],[0,0,0,0],[0,0,1,0],[0,0,0,1]]}; \
               while M[q] = 1 do skip; od";
    assert!(matches!(parse(src), Err(LangError::Dimension { .. })));
}

#[test]
fn guard_zero_is_a_syntax_error() {
    let src = "q : qubit; meas M = computational; while M[q] = 0 do skip; od";
    assert!(matches!(parse(src), Err(LangError::Syntax { .. })));
}

#[test]
fn errors_carry_positions() {
    let err = parse("q : qubit;\nq := |0>;\nH[q] skip;").unwrap_err();
    assert_eq!(err.line(), Some(3));
    let err = parse("q : qubit;\n\n  Foo[q];").unwrap_err();
    assert_eq!(
        err,
        LangError::UndeclaredName { line: 3, col: 3, name: "Foo".into() }
    );
    let err = parse("q : qubit;\nCNOT[q];").unwrap_err();
    assert!(matches!(err, LangError::Dimension { line: 2, .. }));
    let err = parse("q : qubit;\nmeas M = computational;\nif M[q] = 0 -> skip; [] 0 -> skip; fi").unwrap_err();
    assert!(matches!(err, LangError::Syntax { line: 3, .. }));
    let err = parse("q : qubit;\nmeas M = computational;\nif M[q] = 2 -> skip; fi").unwrap_err();
    assert!(matches!(err, LangError::Dimension { line: 3, .. }));
    assert!(matches!(parse("a : qubit; b : qubit; CNOT[a, a];"), Err(LangError::Dimension { .. })));
    assert!(matches!(parse("r : qubit[2]; H[r[2]];"), Err(LangError::Dimension { .. })));
}

#[test]
fn numeric_expressions() {
    let p = parse("gate G = [[exp(i*pi/4), 0], [0, 0.5-2.5e-1i + 3i*0]];").unwrap();
    let Decl::Gate { def: GateDef::Matrix(m), .. } = &p.decls[0] else { panic!() };
    let w = c64(std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2);
    assert!((m.get(0, 0) - w).norm() < 1e-15);
    assert_eq!(m.get(1, 1), c64(0.5, -0.25));
}

#[test]
fn indexed_registers() {
    let p = parse("a : qubit; r : qubit[2]; r[1] := |0>; CNOT[r[1], a]; X[r];").unwrap_err();
    // X is 2x2 but r spans two qubits
    assert!(matches!(p, LangError::Dimension { .. }));
    let p = parse("a : qubit; r : qubit[2]; r[1] := |0>; CNOT[r[1], a];").unwrap();
    assert_eq!(p.targets(&[QubitRef::at("r", 1), QubitRef::whole("a")]), Some(vec![2, 0]));
    assert_eq!(p.n_qubits(), 3);
}

#[test]
fn validate_examples() {
    let lib = GateLibrary::standard();
    // BB84 encoding step: |1> in the diagonal basis is H X |0>.
    let encode = parse(
        "q : qubit; meas B = plusminus; q := |0>; X[q]; H[q]; if B[q] = 0 -> skip; [] 1 -> skip; fi",
    )
    .unwrap();
    assert!(validate(&encode, &lib).is_ok());

    let wide = SourceProgram {
        decls: vec![Decl::Register { name: "q".into(), width: 1 }],
        body: Stmt::Seq(vec![Stmt::Unitary { gate: "CNOT".into(), qubits: vec![q()] }]),
    };
    assert!(validate(&wide, &lib).has(LangIssueKind::DimensionError));

    let bad = parse("q : qubit; gate G = [[1, 0], [0, 2]]; G[q];").unwrap();
    let report = validate(&bad, &lib);
    assert!(report.has(LangIssueKind::NotUnitary));
    assert!(report.issues[0].residual.unwrap() > 1.0);

    let incomplete = parse("q : qubit; meas M = {[[1, 0], [0, 0]]};").unwrap();
    assert!(validate(&incomplete, &lib).has(LangIssueKind::IncompleteMeasurement));

    let loose = parse("q : qubit; channel E = {[[1, 0], [0, 1]], [[0, 1], [0, 0]]};").unwrap();
    assert!(validate(&loose, &lib).has(LangIssueKind::NotTraceNonIncreasing));
}

#[test]
fn printer_examples() {
    assert_eq!(stmt_to_string(&Stmt::Seq(vec![Stmt::Skip, Stmt::Skip])), "skip; skip;");
    let case = Stmt::Case {
        meas: "M".into(),
        qubits: vec![q()],
        branches: vec![
            Branch { outcome: 0, body: Stmt::Seq(vec![Stmt::Unitary { gate: "X".into(), qubits: vec![q()] }]) },
            Branch { outcome: 1, body: Stmt::Seq(vec![Stmt::Unitary { gate: "H".into(), qubits: vec![q()] }]) },
        ],
    };
    assert_eq!(stmt_to_string(&case), "if M[q] = 0 -> X[q]; [] 1 -> H[q]; fi;");
    let p = parse(QLOOP).unwrap();
    let text = pretty_print(&p);
    assert!(text.contains("while M[q] = 1 do\n    H[q];\nod;\n"));
    assert_eq!(parse(&text).unwrap(), p);
}

#[test]
fn missing_branches_and_empty_blocks_roundtrip() {
    let src = "q : qubit; meas M = computational; if M[q] = 1 -> fi; while M[q] = 1 do od;";
    let p = parse(src).unwrap();
    assert_eq!(parse(&pretty_print(&p)).unwrap(), p);
}

proptest! {
    #[test]
    fn roundtrip_generated_programs(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_program(&mut rng, &GenConfig::default());
        prop_assert!(validate(&p, &GateLibrary::standard()).is_ok());
        prop_assert!(p.body.depth() <= 4);
        let text = pretty_print(&p);
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(pretty_print(&back), text);
    }
}
