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

//! Small-matrix helpers shared by the decompositions: rotations, the ZYZ
//! Euler form and (multi-)controlled gates built from CNOTs.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use super::Gate;
use crate::quantum::{c64, ComplexMatrix};

pub(crate) type M2 = Matrix2<Complex64>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub(crate) fn rz(theta: f64) -> M2 {
    M2::new(
        Complex64::from_polar(1.0, -theta / 2.0),
        c64(0.0, 0.0),
        c64(0.0, 0.0),
        Complex64::from_polar(1.0, theta / 2.0),
    )
}

pub(crate) fn ry(theta: f64) -> M2 {
    let (s, c) = (theta / 2.0).sin_cos();
    M2::new(c64(c, 0.0), c64(-s, 0.0), c64(s, 0.0), c64(c, 0.0))
}

pub(crate) fn pauli_x() -> M2 {
    M2::new(c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0))
}

pub(crate) fn to_m2(m: &ComplexMatrix) -> M2 {
    M2::new(m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1))
}

pub(crate) fn from_m2(m: &M2) -> ComplexMatrix {
    ComplexMatrix::from_nalgebra(DMatrix::from_fn(2, 2, |r, c| m[(r, c)]))
}

pub(crate) fn max_dev_from_identity(m: &M2) -> f64 {
    (m - M2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `u = e^{iα} Rz(β) Ry(γ) Rz(δ)`, returned as `(α, β, γ, δ)`.
pub(crate) fn zyz(u: &M2) -> (f64, f64, f64, f64) {
    let alpha = u.determinant().arg() / 2.0;
    let v = u * Complex64::from_polar(1.0, -alpha);
    // v = [[e^{-i(β+δ)/2} cos(γ/2), ·], [e^{i(β-δ)/2} sin(γ/2), ·]]
    let (a, b) = (v[(0, 0)], v[(1, 0)]);
    let gamma = 2.0 * b.norm().atan2(a.norm());
    let sum = if a.norm() > 1e-14 { -2.0 * a.arg() } else { 0.0 };
    let diff = if b.norm() > 1e-14 { 2.0 * b.arg() } else { 0.0 };
    (alpha, (sum + diff) / 2.0, gamma, (sum - diff) / 2.0)
}

/// Principal square root of a 2×2 unitary.
pub(crate) fn sqrt_unitary(u: &M2) -> M2 {
    let (q, t) = from_m2(u).schur();
    let (q, t) = (to_m2(&q), to_m2(&t));
    let d = M2::new(t[(0, 0)].sqrt(), c64(0.0, 0.0), c64(0.0, 0.0), t[(1, 1)].sqrt());
    q * d * q.adjoint()
}

pub(crate) fn one(name: &str, u: M2, q: usize) -> Gate {
    Gate {
        name: name.to_string(),
        qubits: vec![q],
        matrix: from_m2(&u),
    }
}

pub(crate) fn cnot(control: usize, target: usize) -> Gate {
    Gate::cnot(control, target)
}

/// Pushes `u` on `q` unless it is exactly the identity.
pub(crate) fn push_one(out: &mut Vec<Gate>, u: M2, q: usize) {
    if max_dev_from_identity(&u) > 1e-12 {
        out.push(one("U", u, q));
    }
}

/// Controlled-`u`: `C`, CNOT, `B`, CNOT, `A` on the target with `ABC = I`
/// and `u = e^{iα} A X B X C`, then a phase `diag(1, e^{iα})` on the control.
pub(crate) fn controlled(u: &M2, control: usize, target: usize, out: &mut Vec<Gate>) {
    let (alpha, beta, gamma, delta) = zyz(u);
    let a = rz(beta) * ry(gamma / 2.0);
    let b = ry(-gamma / 2.0) * rz(-(delta + beta) / 2.0);
    let c = rz((delta - beta) / 2.0);
    push_one(out, c, target);
    out.push(cnot(control, target));
    push_one(out, b, target);
    out.push(cnot(control, target));
    push_one(out, a, target);
    let phase = M2::new(c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), (I * alpha).exp());
    push_one(out, phase, control);
}

/// `u` on `target` when every control reads 1, without ancillas. For
/// `k ≥ 2` controls, with `v² = u`: C(v) from the last control, C^{k-1}X
/// onto it, C(v†), C^{k-1}X again, then C^{k-1}(v) from the others.
pub(crate) fn multi_controlled(u: &M2, controls: &[usize], target: usize, out: &mut Vec<Gate>) {
    match controls {
        [] => push_one(out, *u, target),
        [c] if (u - pauli_x()).iter().all(|z| z.norm() < 1e-14) => out.push(cnot(*c, target)),
        [c] => controlled(u, *c, target, out),
        [rest @ .., last] => {
            let v = sqrt_unitary(u);
            controlled(&v, *last, target, out);
            multi_controlled(&pauli_x(), rest, *last, out);
            controlled(&v.adjoint(), *last, target, out);
            multi_controlled(&pauli_x(), rest, *last, out);
            multi_controlled(&v, rest, target, out);
        }
    }
}

/// Like [`multi_controlled`] but each control fires on the given bit value.
pub(crate) fn multi_controlled_on(u: &M2, controls: &[(usize, bool)], target: usize, out: &mut Vec<Gate>) {
    let zeros: Vec<usize> = controls.iter().filter(|(_, v)| !v).map(|(q, _)| *q).collect();
    for &q in &zeros {
        out.push(one("X", pauli_x(), q));
    }
    let qs: Vec<usize> = controls.iter().map(|(q, _)| *q).collect();
    multi_controlled(u, &qs, target, out);
    for &q in &zeros {
        out.push(one("X", pauli_x(), q));
    }
}

/// Uniformly controlled rotation: target `t` gets `rot(angles[k])` when the
/// controls (first most significant) spell `k`. Gray-code ladder with
/// `2^m` rotations and `2^m` CNOTs.
pub(crate) fn multiplexed_rotation(
    name: &str,
    rot: fn(f64) -> M2,
    angles: &[f64],
    controls: &[usize],
    target: usize,
    out: &mut Vec<Gate>,
) {
    let m = controls.len();
    debug_assert_eq!(angles.len(), 1 << m);
    if m == 0 {
        if angles[0].abs() > 1e-14 {
            out.push(one(name, rot(angles[0]), target));
        }
        return;
    }
    let n = 1usize << m;
    for j in 0..n {
        let g = j ^ (j >> 1);
        let phi: f64 = angles
            .iter()
            .enumerate()
            .map(|(k, a)| if (k & g).count_ones() % 2 == 0 { *a } else { -*a })
            .sum::<f64>()
            / n as f64;
        if phi.abs() > 1e-14 {
            out.push(one(name, rot(phi), target));
        }
        let bit = if j + 1 < n { (j + 1).trailing_zeros() as usize } else { m - 1 };
        out.push(cnot(controls[m - 1 - bit], target));
    }
}
