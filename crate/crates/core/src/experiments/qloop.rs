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

use serde::Serialize;

use super::Result;
use crate::quantum::DensityOperator;
use crate::sim::{run_distribution, run_shots, Distribution, Executable, DEFAULT_MASS_THRESHOLD, DEFAULT_STEP_LIMIT};

pub const QLOOP_SOURCE: &str = include_str!("../../programs/qloop.qw");
pub const COIN_SOURCE: &str = include_str!("../../programs/coin.qw");

#[derive(Debug, Clone, Serialize)]
pub struct QloopReport {
    pub shots: u64,
    pub seed: u64,
    /// Shots that entered the loop body at least once.
    pub entries: u64,
    /// Circles per shot → number of shots.
    pub histogram: BTreeMap<u64, u64>,
    /// `(k, count(k+1)/count(k))` for `k = 1..=3`, where both counts exist.
    pub ratios: Vec<(u64, f64)>,
}

pub fn qloop_run(shots: u64, seed: u64) -> Result<QloopReport> {
    let exe = Executable::from_source(QLOOP_SOURCE)?;
    let stats = run_shots(&exe, shots, seed)?;
    // the while loop is the only measurement site
    let histogram = stats.loop_histograms.get(&0).cloned().unwrap_or_default();
    let ratios = (1..=3)
        .filter_map(|k| {
            let (a, b) = (histogram.get(&k)?, histogram.get(&(k + 1))?);
            Some((k, *b as f64 / *a as f64))
        })
        .collect();
    Ok(QloopReport {
        shots,
        seed,
        entries: stats.loop_entries(0),
        histogram,
        ratios,
    })
}

/// `E(|+⟩⟨+|)`, the state reaching the first guard measurement: the
/// program up to its loop, run in distribution mode.
pub fn qloop_rho1() -> Result<DensityOperator> {
    let head = QLOOP_SOURCE.split("\nwhile").next().unwrap_or_default();
    let exe = Executable::from_source(head)?;
    let mut d = run_distribution(&exe, DEFAULT_MASS_THRESHOLD, DEFAULT_STEP_LIMIT)?;
    Ok(d.terminals.remove(0).state)
}

pub fn qloop_distribution() -> Result<Distribution> {
    let exe = Executable::from_source(QLOOP_SOURCE)?;
    Ok(run_distribution(&exe, DEFAULT_MASS_THRESHOLD, DEFAULT_STEP_LIMIT)?)
}
