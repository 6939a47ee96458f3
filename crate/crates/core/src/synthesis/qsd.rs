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

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::gates::{multiplexed_rotation, push_one, ry, rz, to_m2, M2};
use super::{check_unitary, kron_factor, Gate, GateSequence, Result};
use crate::quantum::{c64, ComplexMatrix};

type CMat = DMatrix<Complex64>;

/// Quantum Shannon decomposition: a cosine-sine split into two block
/// diagonals around a multiplexed Ry, each block diagonal demultiplexed
/// into two half-size unitaries around a multiplexed Rz, recursing down to
/// two-qubit blocks, which take three CNOTs each. Exact up to global phase.
pub fn qsd_decompose(u: &ComplexMatrix) -> Result<GateSequence> {
    let n = check_unitary(u)?;
    let qubits: Vec<usize> = (0..n).collect();
    let mut seq = GateSequence::new(n);
    decompose(u.as_nalgebra(), &qubits, &mut seq.gates);
    Ok(seq)
}

fn decompose(u: &CMat, qubits: &[usize], out: &mut Vec<Gate>) {
    match qubits {
        [q] => push_one(out, M2::new(u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]), *q),
        [a, b] => two_qubit(u, *a, *b, out),
        [q0, lower @ ..] => {
            let (l0, l1, theta, r0, r1) = cosine_sine(u);
            let (vr, dr, wr) = demultiplex(&r0, &r1);
            let (vl, dl, wl) = demultiplex(&l0, &l1);
            decompose(&wr, lower, out);
            multiplexed_rotation("Rz", rz, &dr, lower, *q0, out);
            decompose(&vr, lower, out);
            let ry_angles: Vec<f64> = theta.iter().map(|t| 2.0 * t).collect();
            multiplexed_rotation("Ry", ry, &ry_angles, lower, *q0, out);
            decompose(&wl, lower, out);
            multiplexed_rotation("Rz", rz, &dl, lower, *q0, out);
            decompose(&vl, lower, out);
        }
        [] => {}
    }
}

/// `u = (L0 ⊕ L1) [[C, −S], [S, C]] (R0 ⊕ R1)` with `C = cos θ`, `S = sin θ`.
pub(super) fn cosine_sine(u: &CMat) -> (CMat, CMat, Vec<f64>, CMat, CMat) {
    let d = u.nrows() / 2;
    let u00 = u.view((0, 0), (d, d)).into_owned();
    let u01 = u.view((0, d), (d, d)).into_owned();
    let u10 = u.view((d, 0), (d, d)).into_owned();
    let u11 = u.view((d, d), (d, d)).into_owned();
    let svd = u00.svd(true, true);
    let (l0, r0) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
    let c = svd.singular_values.map(|x| x.min(1.0));
    // u10 r0† = L1 S has orthogonal columns; QR recovers L1 and S
    let qr = (&u10 * r0.adjoint()).qr();
    let (mut l1, r) = (qr.q(), qr.r());
    let mut s = DVector::<f64>::zeros(d);
    for k in 0..d {
        let z = r[(k, k)];
        s[k] = z.norm();
        let ph = if z.norm() > 1e-300 { z / z.norm() } else { c64(1.0, 0.0) };
        for i in 0..d {
            l1[(i, k)] *= ph;
        }
    }
    let cm = CMat::from_diagonal(&c.map(|x| c64(x, 0.0)));
    let sm = CMat::from_diagonal(&s.map(|x| c64(x, 0.0)));
    let r1 = &cm * l1.adjoint() * &u11 - &sm * l0.adjoint() * &u01;
    let theta = (0..d).map(|k| s[k].atan2(c[k])).collect();
    (l0, l1, theta, r0, r1)
}

/// `a ⊕ b = (V ⊕ V)(D ⊕ D†)(W ⊕ W)`; returns `V`, the Rz angles of the
/// middle factor and `W`.
pub(super) fn demultiplex(a: &CMat, b: &CMat) -> (CMat, Vec<f64>, CMat) {
    let ab = ComplexMatrix::from_nalgebra(a * b.adjoint());
    let (v, t) = ab.schur();
    let v = v.as_nalgebra().clone();
    let d = t.rows();
    let half: Vec<f64> = (0..d).map(|k| t.get(k, k).arg() / 2.0).collect();
    let dm = CMat::from_diagonal(&DVector::from_iterator(d, half.iter().map(|h| Complex64::from_polar(1.0, *h))));
    let w = dm * v.adjoint() * b;
    // D = diag(e^{iφ}) on the |0⟩ branch is Rz(−2φ)
    (v, half.iter().map(|h| -2.0 * h).collect(), w)
}

fn magic() -> CMat {
    let (o, z, i) = (c64(FRAC_1_SQRT_2, 0.0), c64(0.0, 0.0), c64(0.0, FRAC_1_SQRT_2));
    CMat::from_row_slice(4, 4, &[o, z, z, i, z, i, o, z, z, i, -o, z, o, z, z, -i])
}

/// Entries of `XX`, `YY`, `ZZ` in the magic basis (all diagonal there).
const DIAG_XX: [f64; 4] = [1.0, 1.0, -1.0, -1.0];
const DIAG_YY: [f64; 4] = [-1.0, 1.0, -1.0, 1.0];
const DIAG_ZZ: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

/// Coefficient pairs tried in turn when diagonalizing `Re M`, `Im M`
/// simultaneously; a fixed list keeps the result deterministic.
const MIXES: [(f64, f64); 6] = [
    (1.0, 0.0),
    (0.618_033_988_7, 1.324_717_957_2),
    (1.414_213_562_4, -0.754_877_666_2),
    (0.3, 1.7),
    (-1.1, 0.45),
    (2.2, 0.9),
];

/// Two-qubit block: `u ∝ (A1 ⊗ B1) exp(i(αXX + βYY + γZZ)) (A2 ⊗ B2)`,
/// the middle factor realised with three CNOTs.
fn two_qubit(u: &CMat, a: usize, b: usize, out: &mut Vec<Gate>) {
    let det = u.determinant();
    let us = u * Complex64::from_polar(1.0, -det.arg() / 4.0);
    let bm = magic();
    let ub = bm.adjoint() * &us * &bm;
    let m = ub.transpose() * &ub;
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    let mut best: Option<(f64, DMatrix<f64>)> = None;
    for (x, y) in MIXES {
        let p = (&re * x + &im * y).symmetric_eigen().eigenvectors;
        let pc = p.map(|v| c64(v, 0.0));
        let dm = pc.transpose() * &m * &pc;
        let off = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| dm[(i, j)].norm())
            .fold(0.0, f64::max);
        if best.as_ref().is_none_or(|(o, _)| off < *o) {
            best = Some((off, p));
        }
        if off < 1e-12 {
            break;
        }
    }
    let mut p = best.expect("at least one mix").1;
    if p.determinant() < 0.0 {
        p.column_mut(0).neg_mut();
    }
    let pc = p.map(|v| c64(v, 0.0));
    let dm = pc.transpose() * &m * &pc;
    let mut delta: Vec<Complex64> = (0..4).map(|k| Complex64::from_polar(1.0, dm[(k, k)].arg() / 2.0)).collect();
    if delta.iter().product::<Complex64>().re < 0.0 {
        delta[0] = -delta[0];
    }
    let dinv = CMat::from_diagonal(&DVector::from_iterator(4, delta.iter().map(|z| z.conj())));
    let o1 = (&ub * &pc * dinv).map(|z| c64(z.re, 0.0));
    let k1 = ComplexMatrix::from_nalgebra(&bm * o1 * bm.adjoint());
    let k2 = ComplexMatrix::from_nalgebra(&bm * pc.transpose() * bm.adjoint());
    let (a1, b1) = kron_factor(&k1).expect("4x4");
    let (a2, b2) = kron_factor(&k2).expect("4x4");
    let h: Vec<f64> = delta.iter().map(|z| z.arg()).collect();
    let coef = |diag: &[f64; 4]| (0..4).map(|k| diag[k] * h[k]).sum::<f64>() / 4.0;
    let (al, be, ga) = (coef(&DIAG_XX), coef(&DIAG_YY), coef(&DIAG_ZZ));

    push_one(out, to_m2(&a2), a);
    push_one(out, rz(FRAC_PI_2) * to_m2(&b2), b);
    out.push(Gate::cnot(b, a));
    push_one(out, rz(FRAC_PI_2 - 2.0 * ga), a);
    push_one(out, ry(FRAC_PI_2 - 2.0 * al), b);
    out.push(Gate::cnot(a, b));
    push_one(out, ry(2.0 * be - FRAC_PI_2), b);
    out.push(Gate::cnot(b, a));
    push_one(out, to_m2(&a1) * rz(-FRAC_PI_2), a);
    push_one(out, to_m2(&b1), b);
}
