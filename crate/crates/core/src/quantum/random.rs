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

//! Random states and operators for sampling-based checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::c64;
use super::{ComplexMatrix, DensityOperator, Ket, SuperOperator};

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` folded back into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_nalgebra(q)
}

/// Random unitary scaled to determinant one.
pub fn random_special_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let u = random_unitary(dim, rng);
    let det = u.determinant();
    let phase = Complex64::from_polar(1.0, -det.arg() / dim as f64);
    u.scale(phase)
}

pub fn random_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Ket {
    let amps: Vec<Complex64> = ginibre(dim, 1, rng).iter().cloned().collect();
    Ket::new(amps).expect("a Gaussian sample is nonzero")
}

/// Random full-rank mixed state `A A† / tr(A A†)`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityOperator {
    let a = ginibre(dim, dim, rng);
    let m = &a * a.adjoint();
    let tr = m.trace().re;
    DensityOperator::from_nalgebra_unchecked(m / c64(tr, 0.0))
}

/// Random trace-preserving channel with `count` Kraus operators, cut from
/// the first `dim` columns of a random unitary of size `dim·count`.
pub fn random_channel<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> SuperOperator {
    let u = random_unitary(dim * count, rng);
    let kraus = (0..count).map(|k| u.block(k * dim, 0, dim, dim)).collect();
    SuperOperator::new(kraus).expect("isometry blocks form a channel")
}
