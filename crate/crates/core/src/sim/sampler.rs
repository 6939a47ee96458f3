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

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Result, SimError};
use crate::quantum::{PHYSICAL_TOL, ZERO_PROBABILITY};

/// Seeded source of uniform draws on `(0, 1)`.
#[derive(Clone, Debug)]
pub struct SamplerState {
    seed: u64,
    rng: ChaCha8Rng,
    draws: u64,
}

impl SamplerState {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            draws: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of uniform draws consumed so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn uniform(&mut self) -> f64 {
        self.draws += 1;
        self.rng.sample(Open01)
    }
}

/// Seed of shot `k` in a batch seeded with `seed`: the `k`-th output of a
/// SplitMix64 generator started at `seed`.
pub fn shot_seed(seed: u64, k: u64) -> u64 {
    let mut z = seed.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Picks an outcome index from `p`.
///
/// A certain outcome (`p_i ≥ 1 − 1e-12`) is returned without a draw;
/// outcomes below `1e-12` are discarded. Otherwise one uniform `x` on
/// `(0, 1)` is drawn and the first kept index whose cumulative probability
/// reaches `x` is returned, or the last kept index if none does.
pub fn sample_outcome(p: &[f64], rng: &mut SamplerState) -> Result<usize> {
    if p.is_empty() {
        return Err(SimError::MalformedDistribution("no outcomes".into()));
    }
    if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < -PHYSICAL_TOL) {
        return Err(SimError::MalformedDistribution(format!("entry {bad}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PHYSICAL_TOL {
        return Err(SimError::MalformedDistribution(format!("sum {total}")));
    }
    if let Some(i) = p.iter().position(|&x| x >= 1.0 - ZERO_PROBABILITY) {
        return Ok(i);
    }
    let kept: Vec<usize> = (0..p.len()).filter(|&i| p[i] >= ZERO_PROBABILITY).collect();
    if kept.len() == 1 {
        return Ok(kept[0]);
    }
    let x = rng.uniform();
    let mut cumulative = 0.0;
    for &i in &kept {
        cumulative += p[i];
        if x <= cumulative {
            return Ok(i);
        }
    }
    Ok(*kept.last().expect("nonempty"))
}
