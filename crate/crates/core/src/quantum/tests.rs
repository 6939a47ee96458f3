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

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::random::{random_channel, random_density, random_ket, random_unitary};
use super::*;

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

fn lib(name: &str) -> ComplexMatrix {
    GateLibrary::standard().get(name).unwrap().clone()
}

fn ket(amps: &[(f64, f64)]) -> Ket {
    Ket::new(amps.iter().map(|&(r, i)| c64(r, i)).collect()).unwrap()
}

#[test]
fn normalize_examples() {
    let k = normalize(&[c64(1.0, 0.0), c64(1.0, 0.0)]).unwrap();
    assert!(close(k.debug_amplitudes()[0], c64(FRAC_1_SQRT_2, 0.0), 1e-12));
    assert!(close(k.debug_amplitudes()[1], c64(FRAC_1_SQRT_2, 0.0), 1e-12));

    let k = normalize(&[c64(1.0, 0.0), c64(0.0, 0.0)]).unwrap();
    assert_eq!(k.debug_amplitudes(), &[c64(1.0, 0.0), c64(0.0, 0.0)]);

    // ‖(3, 4i)‖ = sqrt(9 + 16) = 5
    let norm = (3.0f64 * 3.0 + 4.0 * 4.0).sqrt();
    let k = normalize(&[c64(3.0, 0.0), c64(0.0, 4.0)]).unwrap();
    assert!(close(k.debug_amplitudes()[0], c64(3.0 / norm, 0.0), 1e-12));
    assert!(close(k.debug_amplitudes()[1], c64(0.0, 4.0 / norm), 1e-12));
    assert!(close(k.debug_amplitudes()[1], c64(0.0, 0.8), 1e-12));

    assert_eq!(
        normalize(&[c64(0.0, 0.0), c64(1e-13, 0.0)]),
        Err(QuantumError::ZeroVector)
    );
}

#[test]
fn inner_product_examples() {
    let zero = Ket::basis(2, 0).unwrap();
    let one = Ket::basis(2, 1).unwrap();
    assert!(close(inner_product(&zero, &zero).unwrap(), c64(1.0, 0.0), 1e-12));
    assert!(close(inner_product(&zero, &one).unwrap(), c64(0.0, 0.0), 1e-12));
    // |+> = (|0> + |1>)/√2, so <+|0> = 1/√2.
    assert!(close(
        inner_product(&Ket::plus(), &zero).unwrap(),
        c64(1.0 / SQRT_2, 0.0),
        1e-12
    ));
    // conjugate-linear in the first argument
    let i_ket = ket(&[(0.0, 1.0)]);
    let one_d = ket(&[(1.0, 0.0)]);
    assert!(close(inner_product(&i_ket, &one_d).unwrap(), c64(0.0, -1.0), 1e-12));
    assert!(matches!(
        inner_product(&zero, &Ket::zero(2)),
        Err(QuantumError::DimMismatch { .. })
    ));
}

#[test]
fn tensor_examples() {
    let k = Ket::basis(2, 0).unwrap().tensor(&Ket::basis(2, 1).unwrap());
    assert_eq!(k, Ket::basis(4, 1).unwrap());
    assert_eq!(
        ComplexMatrix::identity(2).tensor(&ComplexMatrix::identity(2)),
        ComplexMatrix::identity(4)
    );
    // (H⊗I)|00> by hand: H|0> = (|0>+|1>)/√2 on the left factor, so
    // amplitudes 1/√2 at |00> (index 0) and |10> (index 2).
    let hi = lib("H").tensor(&lib("I"));
    let out = Ket::zero(2).apply_unitary(&hi).unwrap();
    let expect = [FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0];
    for (a, e) in out.debug_amplitudes().iter().zip(expect) {
        assert!(close(*a, c64(e, 0.0), 1e-12));
    }
    // the embedding kernel agrees with the Kronecker product
    let via_targets = Ket::zero(2).apply_unitary_on(&lib("H"), &[0]).unwrap();
    assert_eq!(via_targets.debug_amplitudes().len(), 4);
    for (a, b) in via_targets
        .debug_amplitudes()
        .iter()
        .zip(out.debug_amplitudes())
    {
        assert!(close(*a, *b, 1e-12));
    }
}

#[test]
fn apply_unitary_examples() {
    let plus = Ket::basis(2, 0).unwrap().apply_unitary(&lib("H")).unwrap();
    assert!(close(inner_product(&Ket::plus(), &plus).unwrap(), c64(1.0, 0.0), 1e-12));

    let rho = Ket::basis(2, 0).unwrap().to_density();
    let flipped = rho.apply_unitary(&lib("X")).unwrap();
    assert!(flipped.distance(&Ket::basis(2, 1).unwrap().to_density()) < 1e-12);

    // Z·H = [[1,1],[-1,1]]/√2 by hand, so Z·H|0> = (|0> - |1>)/√2 = |->.
    let zh = &lib("Z") * &lib("H");
    let hand = ComplexMatrix::from_real(2, 2, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, FRAC_1_SQRT_2])
        .unwrap();
    assert!((&zh - &hand).max_abs() < 1e-12);
    let minus = Ket::basis(2, 0).unwrap().apply_unitary(&zh).unwrap();
    assert!(close(inner_product(&Ket::minus(), &minus).unwrap(), c64(1.0, 0.0), 1e-12));

    let bad = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]).unwrap();
    assert!(matches!(
        Ket::plus().apply_unitary(&bad),
        Err(QuantumError::NotUnitary { .. })
    ));
    assert!(matches!(
        Ket::plus().apply_unitary(&lib("CNOT")),
        Err(QuantumError::DimMismatch { .. })
    ));
}

#[test]
fn superoperator_examples() {
    // Loop-example channel on |+><+|.
    let rho1 = SuperOperator::qloop().apply(&Ket::plus().to_density()).unwrap();
    let m = rho1.debug_matrix();
    let off = 1.0 / (2.0 * SQRT_2);
    assert!(close(m.get(0, 0), c64(0.75, 0.0), 1e-12));
    assert!(close(m.get(1, 1), c64(0.25, 0.0), 1e-12));
    assert!(close(m.get(0, 1), c64(off, 0.0), 1e-12));
    assert!(close(m.get(1, 0), c64(off, 0.0), 1e-12));

    let rho = random_density(4, &mut ChaCha8Rng::seed_from_u64(3));
    let same = SuperOperator::identity(4).apply(&rho).unwrap();
    assert!(same.distance(&rho) < 1e-14);

    // bit flip p=1/2: (1/2)|0><0| + (1/2) X|0><0|X = diag(1/2, 1/2)
    let out = SuperOperator::bit_flip(0.5)
        .unwrap()
        .apply(&Ket::basis(2, 0).unwrap().to_density())
        .unwrap();
    let hand = ComplexMatrix::from_real(2, 2, &[0.5, 0.0, 0.0, 0.5]).unwrap();
    assert!((out.debug_matrix() - &hand).max_abs() < 1e-12);
}

#[test]
fn measurement_examples() {
    let comp = MeasurementSet::computational(2);
    let p = Ket::plus().measurement_probabilities(&comp).unwrap();
    assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
    let p = Ket::basis(2, 0).unwrap().measurement_probabilities(&comp).unwrap();
    assert_eq!(p, vec![1.0, 0.0]);

    let rho1 = SuperOperator::qloop().apply(&Ket::plus().to_density()).unwrap();
    let p = rho1.measurement_probabilities(&comp).unwrap();
    assert!((p[0] - 0.75).abs() < 1e-12 && (p[1] - 0.25).abs() < 1e-12);

    let post = Ket::plus().post_measurement_state(&comp, 0).unwrap();
    assert!(close(post.debug_amplitudes()[0], c64(1.0, 0.0), 1e-12));
    let post = rho1.post_measurement_state(&comp, 1).unwrap();
    assert!(post.distance(&Ket::basis(2, 1).unwrap().to_density()) < 1e-12);

    // {|+><+|, |-><-|} on |1>: M_1|1> = |->(<-|1>) = -|->/√2, renormalized to -|->.
    let post = Ket::basis(2, 1)
        .unwrap()
        .post_measurement_state(&MeasurementSet::plus_minus(), 1)
        .unwrap();
    let overlap = inner_product(&Ket::minus(), &post).unwrap();
    assert!((overlap.norm() - 1.0).abs() < 1e-12);
    assert!(close(overlap, c64(-1.0, 0.0), 1e-12));

    assert_eq!(
        Ket::basis(2, 0).unwrap().post_measurement_state(&comp, 1),
        Err(QuantumError::ZeroProbabilityOutcome(1))
    );
}

#[test]
fn validate_examples() {
    let comp = MeasurementSet::computational(2);
    assert!(validate_measurement(comp.operators()).is_ok());

    let only_zero = vec![comp.operators()[0].clone()];
    let report = validate_measurement(&only_zero);
    assert_eq!(report.violations.len(), 1);
    assert_eq!(report.violations[0].kind, ViolationKind::IncompleteMeasurement);
    // ‖I − |0><0|‖_F = ‖diag(0, 1)‖_F = 1
    assert!((report.violations[0].residual - 1.0).abs() < 1e-12);
    assert!(MeasurementSet::new(only_zero).is_err());

    // Depolarizing p = 1/2 exactly as tabulated: √5/√8 I, X/√8, Y/√8, Z/√8.
    let a = 5f64.sqrt() / 8f64.sqrt();
    let b = 1.0 / 8f64.sqrt();
    let kraus = vec![
        ComplexMatrix::from_real(2, 2, &[a, 0.0, 0.0, a]).unwrap(),
        ComplexMatrix::from_real(2, 2, &[0.0, b, b, 0.0]).unwrap(),
        ComplexMatrix::new(2, 2, vec![c64(0.0, 0.0), c64(0.0, -b), c64(0.0, b), c64(0.0, 0.0)])
            .unwrap(),
        ComplexMatrix::from_real(2, 2, &[b, 0.0, 0.0, -b]).unwrap(),
    ];
    assert!(validate_kraus(&kraus).is_ok());
    let chan = SuperOperator::new(kraus).unwrap();
    assert!(chan.is_trace_preserving());
    for (a, b) in chan.kraus().iter().zip(SuperOperator::depolarizing(0.5).unwrap().kraus()) {
        assert!((a - b).max_abs() < 1e-12);
    }

    let too_big = vec![ComplexMatrix::identity(2).scale(c64(1.1, 0.0))];
    let report = validate_kraus(&too_big);
    assert_eq!(report.violations[0].kind, ViolationKind::NotTraceNonIncreasing);
    assert!((report.violations[0].residual - 0.21).abs() < 1e-12);

    let nonunitary = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]).unwrap();
    assert_eq!(validate_unitary(&nonunitary).violations[0].kind, ViolationKind::NotUnitary);
    for name in GateLibrary::standard().names() {
        assert!(validate_unitary(&lib(name)).is_ok(), "{name}");
    }

    let not_positive = ComplexMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
    let report = validate_density(&not_positive);
    assert_eq!(report.violations[0].kind, ViolationKind::NotPositive);
    assert!((report.violations[0].residual - 0.5).abs() < 1e-12);
}

#[test]
fn ensemble_materializes() {
    let ens = Ensemble::from_kets(vec![
        (0.25, Ket::basis(2, 0).unwrap()),
        (0.75, Ket::basis(2, 1).unwrap()),
    ])
    .unwrap();
    let rho = DensityOperator::from_ensemble(&ens).unwrap();
    assert_eq!(rho.diagonal(), vec![0.25, 0.75]);
    assert!(Ensemble::from_kets(vec![(0.5, Ket::plus())]).is_err());
}

#[test]
fn capacity_is_enforced() {
    assert!(DensityOperator::zero_state(MAX_QUBITS + 1).is_err());
}

#[test]
fn phase_invariant_distance_ignores_global_phase() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u = random_unitary(4, &mut rng);
    let v = u.scale(Complex64::from_polar(1.0, 1.234));
    assert!(u.phase_invariant_distance(&v) < 1e-7);
    assert!(u.frobenius_distance_up_to_phase(&v) < 1e-7);
    // diag(1, e^{iθ}) vs I: eigenphases {0, θ}, arc θ, distance 2 sin(θ/4)
    let theta = 0.3f64;
    let d = ComplexMatrix::diagonal(&[c64(1.0, 0.0), Complex64::from_polar(1.0, theta)]);
    let expect = 2.0 * (theta / 4.0).sin();
    assert!((d.phase_invariant_distance(&ComplexMatrix::identity(2)) - expect).abs() < 1e-12);
    // the same value by brute-force minimisation over the phase; the grid
    // step is 3e-4 and the objective is Lipschitz with constant 1
    let brute = (0..20000)
        .map(|k| {
            let phi = k as f64 / 20000.0 * std::f64::consts::TAU;
            (&d - &ComplexMatrix::identity(2).scale(Complex64::from_polar(1.0, phi))).operator_norm()
        })
        .fold(f64::INFINITY, f64::min);
    assert!(brute >= expect - 1e-12 && brute - expect < 4e-4);
}

fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #[test]
    fn unitaries_preserve_norm(seed in any::<u64>(), dim_exp in 1usize..4) {
        let mut rng = rng_from(seed);
        let v = random_ket(1 << dim_exp, &mut rng);
        let library = GateLibrary::standard();
        for name in library.names() {
            let g = library.get(name).unwrap();
            let n = dim_exp;
            let k = super::qubit_count(g.rows()).unwrap();
            if k > n { continue; }
            let targets: Vec<usize> = (0..k).collect();
            let out = v.apply_unitary_on(g, &targets).unwrap();
            let norm: f64 = out.debug_amplitudes().iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((norm - 1.0).abs() < 1e-9);
        }
        let u = random_unitary(1 << dim_exp, &mut rng);
        let out = v.apply_unitary(&u).unwrap();
        let norm: f64 = out.debug_amplitudes().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn channels_preserve_trace_and_positivity(seed in any::<u64>(), dim in 1usize..5, count in 1usize..4) {
        let mut rng = rng_from(seed);
        let rho = random_density(dim, &mut rng);
        let chan = random_channel(dim, count, &mut rng);
        prop_assert!(chan.is_trace_preserving());
        let out = chan.apply(&rho).unwrap();
        prop_assert!((out.trace() - 1.0).abs() < 1e-9);
        prop_assert!(validate_density(out.debug_matrix()).is_ok());
    }

    #[test]
    fn probabilities_sum_to_one(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = rng_from(seed);
        let dim = 1 << n;
        let v = random_ket(dim, &mut rng);
        for m in [MeasurementSet::computational(dim)] {
            let p = v.measurement_probabilities(&m).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(p.iter().all(|&x| x >= 0.0));
        }
        // a random complete measurement: rotate the computational basis
        let u = random_unitary(dim, &mut rng);
        let ops: Vec<ComplexMatrix> = MeasurementSet::computational(dim)
            .operators()
            .iter()
            .map(|p| &(&u * p) * &u.adjoint())
            .collect();
        let m = MeasurementSet::new(ops).unwrap();
        let p = v.measurement_probabilities(&m).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ket_and_density_measurements_agree(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = rng_from(seed);
        let dim = 1 << n;
        let v = random_ket(dim, &mut rng);
        let m = if n == 1 && seed % 2 == 0 { MeasurementSet::plus_minus() } else { MeasurementSet::computational(dim) };
        let pk = v.measurement_probabilities(&m).unwrap();
        let pd = v.to_density().measurement_probabilities(&m).unwrap();
        for (a, b) in pk.iter().zip(&pd) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn tensor_is_associative(seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let a = random_unitary(2, &mut rng);
        let b = random_unitary(2, &mut rng);
        let c = random_unitary(4, &mut rng);
        let left = a.tensor(&b.tensor(&c));
        let right = a.tensor(&b).tensor(&c);
        prop_assert_eq!(left.rows(), right.rows());
        prop_assert!((&left - &right).max_abs() < 1e-12);
        let ka = random_ket(2, &mut rng);
        let kb = random_ket(4, &mut rng);
        let kc = random_ket(2, &mut rng);
        let l = ka.tensor(&kb.tensor(&kc));
        let r = ka.tensor(&kb).tensor(&kc);
        for (x, y) in l.debug_amplitudes().iter().zip(r.debug_amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }
}
