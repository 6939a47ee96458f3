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

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::gates::{multi_controlled_on, pauli_x, to_m2, M2};
use super::{check_unitary, GateSequence, Result};
use crate::quantum::{c64, ComplexMatrix, ALGEBRA_TOL};

/// A unitary that is the identity outside `span{|i⟩, |j⟩}` (`i < j`) and
/// `block` on it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoLevelFactor {
    pub dim: usize,
    pub i: usize,
    pub j: usize,
    pub block: ComplexMatrix,
}

impl TwoLevelFactor {
    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::identity(self.dim);
        let (i, j) = (self.i, self.j);
        m.set(i, i, self.block.get(0, 0));
        m.set(i, j, self.block.get(0, 1));
        m.set(j, i, self.block.get(1, 0));
        m.set(j, j, self.block.get(1, 1));
        m
    }
}

/// `U = F_1 F_2 ⋯ F_m` with at most `d(d−1)/2` two-level factors. Column by
/// column, each subdiagonal entry is cleared by a rotation on rows `(c, r)`;
/// the factors are the adjoints of those rotations.
pub fn two_level_decompose(u: &ComplexMatrix) -> Result<Vec<TwoLevelFactor>> {
    check_unitary(u)?;
    let d = u.rows();
    let mut a: DMatrix<Complex64> = u.as_nalgebra().clone();
    let mut out = Vec::new();
    let mut push = |a: &mut DMatrix<Complex64>, i: usize, j: usize, v: M2| {
        // a ← V a on rows i, j
        for col in 0..d {
            let (x, y) = (a[(i, col)], a[(j, col)]);
            a[(i, col)] = v[(0, 0)] * x + v[(0, 1)] * y;
            a[(j, col)] = v[(1, 0)] * x + v[(1, 1)] * y;
        }
        let f = v.adjoint();
        let dev = (f - M2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > ALGEBRA_TOL {
            let block = super::gates::from_m2(&f);
            out.push(TwoLevelFactor { dim: d, i, j, block });
        }
    };
    for c in 0..d.saturating_sub(2) {
        for r in c + 1..d {
            let (x, y) = (a[(c, c)], a[(r, c)]);
            if y.norm() <= f64::EPSILON {
                continue;
            }
            let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let v = M2::new(x.conj() / n, y.conj() / n, -y / n, x / n);
            push(&mut a, c, r, v);
        }
        let x = a[(c, c)];
        let phase = x / x.norm();
        let v = M2::new(phase.conj(), c64(0.0, 0.0), c64(0.0, 0.0), phase);
        push(&mut a, c, c + 1, v);
    }
    let k = d - 2;
    let last = M2::new(a[(k, k)], a[(k, k + 1)], a[(k + 1, k)], a[(k + 1, k + 1)]);
    push(&mut a, k, k + 1, last.adjoint());
    Ok(out)
}

fn bit(x: usize, q: usize, n: usize) -> bool {
    (x >> (n - 1 - q)) & 1 == 1
}

/// Exact circuit for one factor: a Gray-code walk from `|i⟩` towards `|j⟩`
/// by multi-controlled X gates, a multi-controlled `block` on the last
/// differing qubit, then the walk undone.
pub fn two_level_to_circuit(f: &TwoLevelFactor) -> GateSequence {
    let n = f.dim.trailing_zeros() as usize;
    let diff: Vec<usize> = (0..n).filter(|&q| bit(f.i, q, n) != bit(f.j, q, n)).collect();
    let controls = |g: usize, t: usize| -> Vec<(usize, bool)> {
        (0..n).filter(|&q| q != t).map(|q| (q, bit(g, q, n))).collect()
    };
    let mut walk = Vec::new();
    let mut g = f.i;
    for &t in &diff[..diff.len() - 1] {
        let mut unit = Vec::new();
        multi_controlled_on(&pauli_x(), &controls(g, t), t, &mut unit);
        walk.push(unit);
        g ^= 1 << (n - 1 - t);
    }
    let t = *diff.last().expect("i != j");
    let block = to_m2(&f.block);
    let block = if bit(g, t, n) { pauli_x() * block * pauli_x() } else { block };
    let mut seq = GateSequence::new(n);
    // each step is an involution, so the walk is undone in reverse order
    seq.gates.extend(walk.iter().flatten().cloned());
    multi_controlled_on(&block, &controls(g, t), t, &mut seq.gates);
    seq.gates.extend(walk.into_iter().rev().flatten());
    seq
}
