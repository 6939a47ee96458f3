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

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{ExperimentError, Result};
use crate::quantum::SuperOperator;
use crate::sim::{run_shot_with, shot_seed, Executable, SamplerState, DEFAULT_STEP_LIMIT};

pub const BB84_SOURCE: &str = include_str!("../../programs/bb84.qw");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Basis {
    /// `{|0⟩, |1⟩}`, classical bit 0.
    Rectilinear,
    /// `{|+⟩, |−⟩}`, classical bit 1.
    Diagonal,
}

impl Basis {
    fn from_bit(b: bool) -> Self {
        if b {
            Basis::Diagonal
        } else {
            Basis::Rectilinear
        }
    }

    fn bit(self) -> u8 {
        self as u8
    }
}

/// Channels between Alice and Bob. `BitFlip(p)` keeps the bit with
/// probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Bb84Channel {
    Identity,
    BitFlip(f64),
    Depolarizing(f64),
    AmplitudeDamping(f64),
}

/// The channel list of the noisy experiment: identity, depolarizing 0.5,
/// amplitude damping 0.5 and bit flip 0.25, 0.5, 0.75.
pub fn standard_channels() -> Vec<Bb84Channel> {
    vec![
        Bb84Channel::Identity,
        Bb84Channel::Depolarizing(0.5),
        Bb84Channel::AmplitudeDamping(0.5),
        Bb84Channel::BitFlip(0.25),
        Bb84Channel::BitFlip(0.5),
        Bb84Channel::BitFlip(0.75),
    ]
}

impl Bb84Channel {
    /// Right-hand side of a `channel` declaration with explicit Kraus
    /// matrices.
    pub fn declaration(&self) -> String {
        let r = |x: f64| format!("sqrt({x:?})");
        match *self {
            Bb84Channel::Identity => "identity".into(),
            Bb84Channel::BitFlip(p) => {
                let (k, f) = (r(p), r(1.0 - p));
                format!("{{[[{k}, 0], [0, {k}]], [[0, {f}], [{f}, 0]]}}")
            }
            Bb84Channel::Depolarizing(p) => {
                let (a, b) = (r(1.0 - 0.75 * p), r(p / 4.0));
                format!(
                    "{{[[{a}, 0], [0, {a}]], [[0, {b}], [{b}, 0]], [[0, -i*{b}], [i*{b}, 0]], [[{b}, 0], [0, -{b}]]}}"
                )
            }
            Bb84Channel::AmplitudeDamping(g) => {
                let (a, b) = (r(1.0 - g), r(g));
                format!("{{[[1, 0], [0, {a}]], [[0, {b}], [0, 0]]}}")
            }
        }
    }

    pub fn super_operator(&self) -> Result<SuperOperator> {
        Ok(match *self {
            Bb84Channel::Identity => SuperOperator::identity(2),
            Bb84Channel::BitFlip(p) => SuperOperator::bit_flip(p)?,
            Bb84Channel::Depolarizing(p) => SuperOperator::depolarizing(p)?,
            Bb84Channel::AmplitudeDamping(g) => SuperOperator::amplitude_damping(g)?,
        })
    }

    fn parameter(&self) -> Option<f64> {
        match *self {
            Bb84Channel::Identity => None,
            Bb84Channel::BitFlip(p) | Bb84Channel::Depolarizing(p) | Bb84Channel::AmplitudeDamping(p) => Some(p),
        }
    }
}

impl fmt::Display for Bb84Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Bb84Channel::Identity => write!(f, "identity"),
            Bb84Channel::BitFlip(p) => write!(f, "bit_flip({p})"),
            Bb84Channel::Depolarizing(p) => write!(f, "depolarizing({p})"),
            Bb84Channel::AmplitudeDamping(g) => write!(f, "amplitude_damping({g})"),
        }
    }
}

impl FromStr for Bb84Channel {
    type Err = ExperimentError;

    /// `identity`, `bit_flip(p)`, `depolarizing(p)` or `amplitude_damping(g)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "identity" {
            return Ok(Bb84Channel::Identity);
        }
        let bad = || ExperimentError::InvalidParameter(format!("unknown channel `{s}`"));
        let (name, rest) = s.split_once('(').ok_or_else(bad)?;
        let p: f64 = rest.strip_suffix(')').ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        if !(0.0..=1.0).contains(&p) {
            return Err(ExperimentError::InvalidParameter(format!("channel parameter {p} outside [0, 1]")));
        }
        match name.trim() {
            "bit_flip" => Ok(Bb84Channel::BitFlip(p)),
            "depolarizing" => Ok(Bb84Channel::Depolarizing(p)),
            "amplitude_damping" => Ok(Bb84Channel::AmplitudeDamping(p)),
            _ => Err(bad()),
        }
    }
}

/// Program for one transmitted qubit: Alice prepares `bit` in her basis,
/// the qubit crosses `channel`, Bob measures in his basis.
pub fn bb84_source(bit: bool, alice: Basis, bob: Basis, channel: &Bb84Channel) -> String {
    let meas = match bob {
        Basis::Rectilinear => "meas P = computational;",
        Basis::Diagonal => "meas P = plusminus;",
    };
    let mut s = format!("q : qubit;\nchannel E = {};\n{meas}\n\nq := |0>;\n", channel.declaration());
    if bit {
        s += "X[q];\n";
    }
    if alice == Basis::Diagonal {
        s += "H[q];\n";
    }
    s += "E[q];\nif P[q] = fi\n";
    s
}

/// Eight executables, one per (bit, Alice basis, Bob basis).
struct Transmitter {
    exes: Vec<Executable>,
}

impl Transmitter {
    fn new(channel: &Bb84Channel) -> Result<Self> {
        if let Some(p) = channel.parameter() {
            if !(0.0..=1.0).contains(&p) {
                return Err(ExperimentError::InvalidParameter(format!("channel parameter {p} outside [0, 1]")));
            }
        }
        let mut exes = Vec::with_capacity(8);
        for k in 0..8u8 {
            let (bit, a, b) = (k & 4 != 0, Basis::from_bit(k & 2 != 0), Basis::from_bit(k & 1 != 0));
            exes.push(Executable::from_source(&bb84_source(bit, a, b, channel))?);
        }
        Ok(Self { exes })
    }

    fn send(&self, bit: bool, alice: Basis, bob: Basis, seed: u64) -> Result<bool> {
        let exe = &self.exes[(bit as usize) << 2 | (alice.bit() as usize) << 1 | bob.bit() as usize];
        let rec = run_shot_with(exe, &mut SamplerState::new(seed), DEFAULT_STEP_LIMIT)?;
        Ok(rec.outcomes[0].1 == 1)
    }
}

/// One Alice–Bob run. Alice, Bob and the channel draw from separate
/// streams derived from `(seed, client)`.
#[derive(Debug, Clone, Serialize)]
pub struct Bb84Session {
    pub n: usize,
    pub channel: Bb84Channel,
    /// Fraction of the sifted key revealed in the sampling check; `None`
    /// runs the noiseless protocol, judged by the global comparison.
    pub sample_fraction: Option<f64>,
    pub seed: u64,
    pub client: u64,
}

impl Bb84Session {
    pub fn new(n: usize, channel: Bb84Channel, seed: u64) -> Self {
        Self {
            n,
            channel,
            sample_fraction: None,
            seed,
            client: 0,
        }
    }

    pub fn with_sampling(mut self, s: f64) -> Self {
        self.sample_fraction = Some(s);
        self
    }

    fn streams(&self) -> (u64, u64, u64) {
        let base = 3 * self.client;
        (shot_seed(self.seed, base), shot_seed(self.seed, base + 1), shot_seed(self.seed, base + 2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bb84Transcript {
    pub client: u64,
    pub raw_key: Vec<u8>,
    pub basis_raw: Vec<u8>,
    pub ket_enc: Vec<&'static str>,
    pub measure_raw: Vec<u8>,
    pub temp_result: Vec<u8>,
    pub correct_broad: Vec<u8>,
    pub final_alice_key: Vec<u8>,
    pub final_bob_key: Vec<u8>,
    /// Indices into the final keys revealed by the sampling check.
    pub sample_positions: Vec<usize>,
    /// Global view: the two final keys agree everywhere.
    pub keys_equal: bool,
    pub verdict: bool,
}

impl Bb84Transcript {
    pub fn sifted_len(&self) -> usize {
        self.final_alice_key.len()
    }
}

fn validate(s: &Bb84Session) -> Result<()> {
    if s.n == 0 {
        return Err(ExperimentError::InvalidParameter("raw key length must be at least 1".into()));
    }
    if let Some(f) = s.sample_fraction {
        if !(f > 0.0 && f < 1.0) {
            return Err(ExperimentError::InvalidParameter(format!("sampling fraction {f} outside (0, 1)")));
        }
    }
    Ok(())
}

pub fn bb84_run(session: &Bb84Session) -> Result<Bb84Transcript> {
    validate(session)?;
    run_with(session, &Transmitter::new(&session.channel)?)
}

fn run_with(s: &Bb84Session, tx: &Transmitter) -> Result<Bb84Transcript> {
    let (alice_seed, bob_seed, channel_seed) = s.streams();
    let mut alice = ChaCha8Rng::seed_from_u64(alice_seed);
    let mut bob = ChaCha8Rng::seed_from_u64(bob_seed);

    let raw_key: Vec<u8> = (0..s.n).map(|_| alice.random::<bool>() as u8).collect();
    let basis_raw: Vec<u8> = (0..s.n).map(|_| alice.random::<bool>() as u8).collect();
    let ket_enc = raw_key
        .iter()
        .zip(&basis_raw)
        .map(|(k, b)| match (b, k) {
            (0, 0) => "|0>",
            (0, _) => "|1>",
            (_, 0) => "|+>",
            _ => "|->",
        })
        .collect();
    let measure_raw: Vec<u8> = (0..s.n).map(|_| bob.random::<bool>() as u8).collect();
    let temp_result = (0..s.n)
        .map(|i| {
            let (a, b) = (Basis::from_bit(basis_raw[i] == 1), Basis::from_bit(measure_raw[i] == 1));
            tx.send(raw_key[i] == 1, a, b, shot_seed(channel_seed, i as u64)).map(|o| o as u8)
        })
        .collect::<Result<Vec<u8>>>()?;
    let correct_broad: Vec<u8> = basis_raw.iter().zip(&measure_raw).map(|(a, b)| (a == b) as u8).collect();
    let keep = |v: &[u8]| -> Vec<u8> { v.iter().zip(&correct_broad).filter(|(_, c)| **c == 1).map(|(x, _)| *x).collect() };
    let final_alice_key = keep(&raw_key);
    let final_bob_key = keep(&temp_result);
    let keys_equal = final_alice_key == final_bob_key;

    let (sample_positions, verdict) = match s.sample_fraction {
        None => (Vec::new(), keys_equal),
        Some(f) => {
            let len = final_alice_key.len();
            let k = ((f * len as f64).ceil() as usize).min(len);
            let mut pos = index::sample(&mut alice, len, k).into_vec();
            pos.sort_unstable();
            let ok = pos.iter().all(|&i| final_alice_key[i] == final_bob_key[i]);
            (pos, ok)
        }
    };
    Ok(Bb84Transcript {
        client: s.client,
        raw_key,
        basis_raw,
        ket_enc,
        measure_raw,
        temp_result,
        correct_broad,
        final_alice_key,
        final_bob_key,
        sample_positions,
        keys_equal,
        verdict,
    })
}

/// One Alice (`seed`) serving `clients` Bobs; client `c` runs the session
/// `(seed, c)`. Sessions share no state and run in parallel.
pub fn bb84_multi_client(
    clients: u64,
    n: usize,
    channel: Bb84Channel,
    sample_fraction: Option<f64>,
    seed: u64,
) -> Result<Vec<Bb84Transcript>> {
    if clients == 0 {
        return Err(ExperimentError::InvalidParameter("at least one client is required".into()));
    }
    let tx = Transmitter::new(&channel)?;
    (0..clients)
        .into_par_iter()
        .map(|client| {
            let s = Bb84Session {
                n,
                channel,
                sample_fraction,
                seed,
                client,
            };
            validate(&s)?;
            run_with(&s, &tx)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub channel: String,
    pub length: usize,
    pub fraction: f64,
    pub sessions: u64,
    pub successes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub seed: u64,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Columns: `channel,length,fraction,sessions,successes,success_rate`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("channel,length,fraction,sessions,successes,success_rate\n");
        for r in &self.rows {
            s += &format!(
                "\"{}\",{},{},{},{},{:.4}\n",
                r.channel,
                r.length,
                r.fraction,
                r.sessions,
                r.successes,
                r.successes as f64 / r.sessions as f64
            );
        }
        s
    }

    pub fn successes(&self, channel: &Bb84Channel, length: usize, fraction: f64) -> Option<u64> {
        let name = channel.to_string();
        self.rows
            .iter()
            .find(|r| r.channel == name && r.length == length && r.fraction == fraction)
            .map(|r| r.successes)
    }

    /// One line per channel and fraction: success counts across lengths.
    pub fn summary(&self) -> String {
        let mut lengths: Vec<usize> = self.rows.iter().map(|r| r.length).collect();
        lengths.sort_unstable();
        lengths.dedup();
        let mut out = format!(
            "{:<24} {:>8} {}\n",
            "channel",
            "fraction",
            lengths.iter().map(|l| format!("{:>7}", format!("n={l}"))).collect::<String>()
        );
        let mut keys: Vec<(String, f64)> = Vec::new();
        for r in &self.rows {
            if !keys.iter().any(|(c, f)| *c == r.channel && *f == r.fraction) {
                keys.push((r.channel.clone(), r.fraction));
            }
        }
        for (c, f) in keys {
            let cells: String = lengths
                .iter()
                .map(|l| {
                    let hit = self.rows.iter().find(|r| r.channel == c && r.fraction == f && r.length == *l);
                    format!("{:>7}", hit.map(|r| r.successes.to_string()).unwrap_or_default())
                })
                .collect();
            out += &format!("{c:<24} {f:>8} {cells}\n");
        }
        out
    }
}

/// Success counts per (channel, length, fraction). Session `k` of a
/// (length, fraction) cell uses the same seed under every channel, so the
/// channels are compared on identical keys and bases.
pub fn bb84_channel_sweep(
    channels: &[Bb84Channel],
    lengths: &[usize],
    fractions: &[f64],
    sessions: u64,
    seed: u64,
) -> Result<SweepTable> {
    let mut cells = Vec::new();
    for (ci, ch) in channels.iter().enumerate() {
        for (li, &n) in lengths.iter().enumerate() {
            for (fi, &f) in fractions.iter().enumerate() {
                cells.push((ci, *ch, n, f, shot_seed(seed, (li * fractions.len() + fi) as u64)));
            }
        }
    }
    let txs = channels.iter().map(Transmitter::new).collect::<Result<Vec<_>>>()?;
    let rows = cells
        .par_iter()
        .map(|&(ci, channel, n, f, cell_seed)| {
            let mut successes = 0;
            for k in 0..sessions {
                let s = Bb84Session {
                    n,
                    channel,
                    sample_fraction: Some(f),
                    seed: shot_seed(cell_seed, k),
                    client: 0,
                };
                validate(&s)?;
                successes += run_with(&s, &txs[ci])?.verdict as u64;
            }
            Ok(SweepRow {
                channel: channel.to_string(),
                length: n,
                fraction: f,
                sessions,
                successes,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { seed, rows })
}
