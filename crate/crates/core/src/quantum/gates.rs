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

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use super::matrix::c64;
use super::ComplexMatrix;

/// The named standard gates: `I`, `H`, `X`, `Y`, `Z`, `S`, `Sdg`, `T`, `Tdg`
/// and `CNOT` (control = first qubit).
#[derive(Clone, Debug)]
pub struct GateLibrary {
    gates: BTreeMap<&'static str, ComplexMatrix>,
}

impl Default for GateLibrary {
    fn default() -> Self {
        Self::standard()
    }
}

impl GateLibrary {
    pub fn standard() -> Self {
        let z = c64(0.0, 0.0);
        let o = c64(1.0, 0.0);
        let h = c64(FRAC_1_SQRT_2, 0.0);
        let t = c64(FRAC_PI_4.cos(), FRAC_PI_4.sin());
        let m = |v: Vec<_>| ComplexMatrix::new(2, 2, v).expect("2x2");
        let mut gates = BTreeMap::new();
        gates.insert("I", ComplexMatrix::identity(2));
        gates.insert("H", m(vec![h, h, h, -h]));
        gates.insert("X", m(vec![z, o, o, z]));
        gates.insert("Y", m(vec![z, c64(0.0, -1.0), c64(0.0, 1.0), z]));
        gates.insert("Z", m(vec![o, z, z, -o]));
        gates.insert("S", m(vec![o, z, z, c64(0.0, 1.0)]));
        gates.insert("Sdg", m(vec![o, z, z, c64(0.0, -1.0)]));
        gates.insert("T", m(vec![o, z, z, t]));
        gates.insert("Tdg", m(vec![o, z, z, t.conj()]));
        gates.insert(
            "CNOT",
            ComplexMatrix::from_real(
                4,
                4,
                &[
                    1.0, 0.0, 0.0, 0.0, //
                    0.0, 1.0, 0.0, 0.0, //
                    0.0, 0.0, 0.0, 1.0, //
                    0.0, 0.0, 1.0, 0.0,
                ],
            )
            .expect("4x4"),
        );
        Self { gates }
    }

    pub fn get(&self, name: &str) -> Option<&ComplexMatrix> {
        self.gates.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.gates.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.gates.keys().copied()
    }

    /// Name of the library gate equal to `m` entrywise within `tol`, if any.
    pub fn lookup(&self, m: &ComplexMatrix, tol: f64) -> Option<&'static str> {
        self.gates
            .iter()
            .find(|(_, g)| g.rows() == m.rows() && (*g - m).max_abs() <= tol)
            .map(|(n, _)| *n)
    }
}
