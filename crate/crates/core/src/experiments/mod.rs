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

//! Runnable experiments: the Qloop counter, BB84 key distribution (simple,
//! multi-client and noisy) and Grover search (single and multi-object).
//!
//! Every experiment is a `.qw` program executed by [`crate::sim`]; the
//! harnesses here generate the program variants, drive them and tabulate
//! the results.

mod bb84;
mod grover;
mod qloop;

#[cfg(test)]
mod tests;

use thiserror::Error;

use crate::fqasm::FqasmError;
use crate::quantum::QuantumError;
use crate::sim::SimError;

pub use bb84::{
    bb84_channel_sweep, bb84_multi_client, bb84_run, bb84_source, standard_channels, Basis, Bb84Channel, Bb84Session,
    Bb84Transcript, SweepRow, SweepTable, BB84_SOURCE,
};
pub use grover::{
    formula_probability, grover_probabilities, grover_run, grover_source, next_round_success, GroverMode,
    GroverReport, GroverRound, GroverSpec, IterationRule,
};
pub use qloop::{qloop_distribution, qloop_rho1, qloop_run, QloopReport, COIN_SOURCE, QLOOP_SOURCE};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Fqasm(#[from] FqasmError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

/// Every bundled program, by file name.
pub fn programs() -> Vec<(&'static str, &'static str)> {
    vec![
        ("bb84.qw", BB84_SOURCE),
        ("coin.qw", COIN_SOURCE),
        ("grover.qw", grover::GROVER_SOURCE),
        ("qloop.qw", QLOOP_SOURCE),
    ]
}
