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

//! Small-step execution of while-programs over a global density operator,
//! either one sampled shot at a time or exhaustively over every measurement
//! branch.

mod sampler;

#[cfg(test)]
mod tests;

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;
use std::sync::Arc;

use crate::lang::{self, LangError, SourceProgram, Stmt};
use crate::quantum::{
    ComplexMatrix, DensityOperator, GateLibrary, MeasurementSet, QuantumError, SuperOperator,
    ZERO_PROBABILITY,
};

pub use sampler::{sample_outcome, shot_seed, SamplerState};

pub const DEFAULT_STEP_LIMIT: u64 = 1_000_000;
pub const DEFAULT_MASS_THRESHOLD: f64 = 1e-6;
/// Terminal states closer than this (Frobenius) are merged.
pub const STATE_MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("step limit of {limit} exceeded; the program may not terminate")]
    StepLimitExceeded { limit: u64 },
    #[error("malformed probability distribution: {0}")]
    MalformedDistribution(String),
    #[error("configuration is already terminal")]
    Terminal,
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Lang(#[from] LangError),
}

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SiteKind {
    Case,
    Loop,
}

#[derive(Debug)]
enum Op {
    Skip,
    Init(Vec<usize>),
    Unitary(Arc<ComplexMatrix>, Vec<usize>),
    Channel(Arc<SuperOperator>, Vec<usize>),
    Seq(Vec<Arc<Node>>),
    Case {
        site: usize,
        meas: Arc<MeasurementSet>,
        targets: Vec<usize>,
        branches: Vec<Option<Arc<Node>>>,
    },
    While {
        site: usize,
        meas: Arc<MeasurementSet>,
        targets: Vec<usize>,
        body: Arc<Node>,
    },
}

#[derive(Debug)]
struct Node {
    op: Op,
    src: Stmt,
}

/// A validated program with every name resolved to its operator and every
/// register reference to global qubit indices.
#[derive(Debug, Clone)]
pub struct Executable {
    n_qubits: usize,
    root: Arc<Node>,
    sites: Vec<SiteKind>,
}

impl Executable {
    pub fn new(p: &SourceProgram, lib: &GateLibrary) -> Result<Self> {
        let report = lang::validate(p, lib);
        if !report.is_ok() {
            return Err(LangError::Invalid(report).into());
        }
        let mut sites = Vec::new();
        let root = lower(p, lib, &p.body, &mut sites);
        Ok(Self {
            n_qubits: p.n_qubits(),
            root,
            sites,
        })
    }

    /// Parses, validates and resolves against the standard gate library.
    pub fn from_source(text: &str) -> Result<Self> {
        Self::new(&lang::parse(text)?, &GateLibrary::standard())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Kind of each measurement site, indexed by site id (pre-order).
    pub fn sites(&self) -> &[SiteKind] {
        &self.sites
    }
}

fn lower(p: &SourceProgram, lib: &GateLibrary, s: &Stmt, sites: &mut Vec<SiteKind>) -> Arc<Node> {
    let targets = |qs: &[lang::QubitRef]| p.targets(qs).expect("validated");
    let op = match s {
        Stmt::Skip => Op::Skip,
        Stmt::Init(q) => Op::Init(targets(std::slice::from_ref(q))),
        Stmt::Unitary { gate, qubits } => Op::Unitary(
            Arc::new(p.gate_matrix(gate, lib).expect("validated")),
            targets(qubits),
        ),
        Stmt::Channel { channel, qubits } => Op::Channel(
            Arc::new(p.channel(channel).expect("validated")),
            targets(qubits),
        ),
        Stmt::Seq(v) => Op::Seq(v.iter().map(|s| lower(p, lib, s, sites)).collect()),
        Stmt::Case {
            meas,
            qubits,
            branches,
        } => {
            let site = sites.len();
            sites.push(SiteKind::Case);
            let m = p.measurement(meas).expect("validated");
            let mut slots: Vec<Option<Arc<Node>>> = vec![None; m.len()];
            for b in branches {
                slots[b.outcome] = Some(lower(p, lib, &b.body, sites));
            }
            Op::Case {
                site,
                meas: Arc::new(m),
                targets: targets(qubits),
                branches: slots,
            }
        }
        Stmt::While { meas, qubits, body } => {
            let site = sites.len();
            sites.push(SiteKind::Loop);
            Op::While {
                site,
                meas: Arc::new(p.measurement(meas).expect("validated")),
                targets: targets(qubits),
                body: lower(p, lib, body, sites),
            }
        }
    };
    Arc::new(Node { op, src: s.clone() })
}

/// One measurement performed by a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Event {
    pub site: usize,
    pub outcome: usize,
}

/// `⟨S, ρ⟩` with a branch weight. The remaining program is a stack of
/// statements, top last; an empty stack is the terminal `E`.
#[derive(Debug, Clone)]
pub struct Configuration {
    stack: Vec<Arc<Node>>,
    pub state: DensityOperator,
    pub weight: f64,
    /// The measurement made by the step that produced this configuration.
    pub event: Option<Event>,
    pub steps: u64,
}

impl Configuration {
    /// The whole program on `|0…0⟩`.
    pub fn initial(exe: &Executable) -> Result<Self> {
        Ok(Self::with_state(exe, DensityOperator::zero_state(exe.n_qubits)?))
    }

    pub fn with_state(exe: &Executable, state: DensityOperator) -> Self {
        Self {
            stack: vec![exe.root.clone()],
            state,
            weight: 1.0,
            event: None,
            steps: 0,
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.flattened().is_empty()
    }

    /// Remaining statements, first to run first, with sequences flattened.
    pub fn remaining(&self) -> Vec<Stmt> {
        self.flattened().iter().rev().map(|n| n.src.clone()).collect()
    }

    fn flattened(&self) -> Vec<Arc<Node>> {
        let mut stack = self.stack.clone();
        normalize_stack(&mut stack);
        stack
    }
}

/// Expands `Seq` nodes on top of the stack until a primitive is on top or
/// the stack is empty. Sequencing itself is not a step.
fn normalize_stack(stack: &mut Vec<Arc<Node>>) {
    while let Some(top) = stack.last() {
        match &top.op {
            Op::Seq(children) => {
                let children = children.clone();
                stack.pop();
                stack.extend(children.into_iter().rev());
            }
            _ => return,
        }
    }
}

/// One transition. With a sampler, a measurement picks one outcome and the
/// result has a single successor; without one, every outcome with
/// probability at least `1e-12` gets a successor whose weight is scaled by
/// that probability.
pub fn step(c: &Configuration, rng: Option<&mut SamplerState>) -> Result<Vec<Configuration>> {
    let mut stack = c.stack.clone();
    normalize_stack(&mut stack);
    let Some(top) = stack.pop() else {
        return Err(SimError::Terminal);
    };
    let simple = |state: DensityOperator| {
        Ok(vec![Configuration {
            stack: stack.clone(),
            state,
            weight: c.weight,
            event: None,
            steps: c.steps + 1,
        }])
    };
    match &top.op {
        Op::Skip => simple(c.state.clone()),
        Op::Init(qs) => simple(c.state.init_qubits(qs)?),
        Op::Unitary(u, t) => simple(c.state.conjugate_on(u, t)?),
        Op::Channel(e, t) => simple(e.apply_on(&c.state, t)?),
        Op::Seq(_) => unreachable!("normalized"),
        Op::Case {
            site,
            meas,
            targets,
            branches,
        } => measure(c, rng, *site, meas, targets, |outcome| {
            let mut s = stack.clone();
            if let Some(Some(b)) = branches.get(outcome) {
                s.push(b.clone());
            }
            s
        }),
        Op::While {
            site,
            meas,
            targets,
            body,
        } => measure(c, rng, *site, meas, targets, |outcome| {
            let mut s = stack.clone();
            if outcome == 1 {
                s.push(top.clone());
                s.push(body.clone());
            }
            s
        }),
    }
}

fn measure(
    c: &Configuration,
    rng: Option<&mut SamplerState>,
    site: usize,
    meas: &MeasurementSet,
    targets: &[usize],
    continuation: impl Fn(usize) -> Vec<Arc<Node>>,
) -> Result<Vec<Configuration>> {
    let probs = c.state.probabilities_on(meas, targets)?;
    let outcomes: Vec<usize> = match rng {
        Some(r) => vec![sample_outcome(&probs, r)?],
        None => (0..probs.len())
            .filter(|&i| probs[i] >= ZERO_PROBABILITY)
            .collect(),
    };
    let mut out = Vec::with_capacity(outcomes.len());
    for i in outcomes {
        let (state, _) = c.state.post_measurement_on(meas, targets, i)?;
        out.push(Configuration {
            stack: continuation(i),
            state,
            weight: c.weight * probs[i],
            event: Some(Event { site, outcome: i }),
            steps: c.steps + 1,
        });
    }
    Ok(out)
}

/// Outcome of one sampled execution.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RunRecord {
    /// `(site id, outcome)` for every measurement, in execution order.
    pub outcomes: Vec<(usize, usize)>,
    #[serde(skip)]
    pub final_state: DensityOperator,
    pub steps: u64,
    /// Number of guard-1 events per loop site.
    pub loop_counts: BTreeMap<usize, u64>,
}

/// One shot with the default step limit.
pub fn run_shot(exe: &Executable, seed: u64) -> Result<RunRecord> {
    run_shot_with(exe, &mut SamplerState::new(seed), DEFAULT_STEP_LIMIT)
}

pub fn run_shot_with(exe: &Executable, rng: &mut SamplerState, step_limit: u64) -> Result<RunRecord> {
    let mut c = Configuration::initial(exe)?;
    let mut outcomes = Vec::new();
    let mut loop_counts: BTreeMap<usize, u64> = exe
        .sites
        .iter()
        .enumerate()
        .filter(|(_, k)| **k == SiteKind::Loop)
        .map(|(i, _)| (i, 0))
        .collect();
    loop {
        normalize_stack(&mut c.stack);
        if c.stack.is_empty() {
            break;
        }
        if c.steps >= step_limit {
            return Err(SimError::StepLimitExceeded { limit: step_limit });
        }
        c = step(&c, Some(rng))?.pop().expect("one successor");
        if let Some(e) = c.event {
            outcomes.push((e.site, e.outcome));
            if exe.sites[e.site] == SiteKind::Loop && e.outcome == 1 {
                *loop_counts.get_mut(&e.site).expect("loop site") += 1;
            }
        }
    }
    Ok(RunRecord {
        outcomes,
        final_state: c.state,
        steps: c.steps,
        loop_counts,
    })
}

/// A distinct final state and how often (or with what weight) it occurred.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FinalState {
    #[serde(skip)]
    pub state: DensityOperator,
    pub count: u64,
}

/// Aggregate statistics over many shots.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ShotStats {
    pub shots: u64,
    pub seed: u64,
    /// Per site: number of times each outcome was observed.
    pub outcome_counts: BTreeMap<usize, Vec<u64>>,
    /// Per loop site: number of shots that entered the body exactly `k` times.
    pub loop_histograms: BTreeMap<usize, BTreeMap<u64, u64>>,
    pub total_steps: u64,
    /// Distinct final states (merged within `1e-9`), at most
    /// [`MAX_TRACKED_STATES`].
    pub final_states: Vec<FinalState>,
    pub final_states_truncated: bool,
}

pub const MAX_TRACKED_STATES: usize = 64;

impl ShotStats {
    pub(crate) fn new(sites: &[SiteKind], shots: u64, seed: u64) -> Self {
        let mut outcome_counts = BTreeMap::new();
        let mut loop_histograms = BTreeMap::new();
        for (i, k) in sites.iter().enumerate() {
            outcome_counts.insert(i, Vec::new());
            if *k == SiteKind::Loop {
                loop_histograms.insert(i, BTreeMap::new());
            }
        }
        Self {
            shots,
            seed,
            outcome_counts,
            loop_histograms,
            total_steps: 0,
            final_states: Vec::new(),
            final_states_truncated: false,
        }
    }

    pub(crate) fn record(&mut self, r: RunRecord) {
        for (site, outcome) in &r.outcomes {
            let v = self.outcome_counts.get_mut(site).expect("known site");
            if v.len() <= *outcome {
                v.resize(outcome + 1, 0);
            }
            v[*outcome] += 1;
        }
        for (site, k) in &r.loop_counts {
            *self
                .loop_histograms
                .get_mut(site)
                .expect("loop site")
                .entry(*k)
                .or_insert(0) += 1;
        }
        self.total_steps += r.steps;
        let known = self
            .final_states
            .iter()
            .position(|f| f.state.distance(&r.final_state) <= STATE_MERGE_TOL);
        match known {
            Some(i) => self.final_states[i].count += 1,
            None if self.final_states.len() < MAX_TRACKED_STATES => {
                self.final_states.push(FinalState {
                    state: r.final_state,
                    count: 1,
                })
            }
            None => self.final_states_truncated = true,
        }
    }

    /// Shots in which loop `site` was entered at least once.
    pub fn loop_entries(&self, site: usize) -> u64 {
        self.loop_histograms
            .get(&site)
            .map(|h| h.iter().filter(|(k, _)| **k > 0).map(|(_, c)| c).sum())
            .unwrap_or(0)
    }

    /// Rows `(site, outcome, count)` for CSV export.
    pub fn outcome_rows(&self) -> Vec<(usize, usize, u64)> {
        self.outcome_counts
            .iter()
            .flat_map(|(s, v)| v.iter().enumerate().map(move |(o, c)| (*s, o, *c)))
            .collect()
    }
}

/// `n` independent shots; shot `k` uses seed [`shot_seed`]`(seed, k)`.
pub fn run_shots(exe: &Executable, n: u64, seed: u64) -> Result<ShotStats> {
    run_shots_with(exe, n, seed, DEFAULT_STEP_LIMIT)
}

pub fn run_shots_with(exe: &Executable, n: u64, seed: u64, step_limit: u64) -> Result<ShotStats> {
    let mut stats = ShotStats::new(&exe.sites, n, seed);
    for k in 0..n {
        let mut rng = SamplerState::new(shot_seed(seed, k));
        stats.record(run_shot_with(exe, &mut rng, step_limit)?);
    }
    Ok(stats)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Terminal {
    pub weight: f64,
    #[serde(skip)]
    pub state: DensityOperator,
}

/// Weighted terminal states plus the mass left unexplored.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Distribution {
    pub terminals: Vec<Terminal>,
    pub residual: f64,
    /// Measurement layers explored.
    pub rounds: u64,
    #[serde(skip)]
    index: StateIndex,
}

impl Distribution {
    pub fn total_weight(&self) -> f64 {
        self.terminals.iter().map(|t| t.weight).sum()
    }

    pub(crate) fn empty() -> Self {
        Self {
            terminals: Vec::new(),
            residual: 0.0,
            rounds: 0,
            index: StateIndex::default(),
        }
    }

    pub(crate) fn add_terminal(&mut self, weight: f64, state: DensityOperator) {
        let terminals = &self.terminals;
        match self.index.find(&state, |i| &terminals[i].state) {
            Some(i) => self.terminals[i].weight += weight,
            None => {
                self.index.insert(&state, self.terminals.len());
                self.terminals.push(Terminal { weight, state });
            }
        }
    }


    /// Weight of the terminal closest to `state` within `tol`, else 0.
    pub fn weight_of(&self, state: &DensityOperator, tol: f64) -> f64 {
        self.terminals
            .iter()
            .filter(|t| t.state.distance(state) <= tol)
            .map(|t| t.weight)
            .sum()
    }
}

/// Explores every branch, one measurement layer at a time. Each branch
/// runs deterministically to its next measurement; branches that wait at
/// the same statement with the same state (within [`STATE_MERGE_TOL`]) are
/// merged, and a merged branch lighter than `mass_threshold` is dropped into
/// the residual. Whatever is still running after `step_limit` layers goes
/// there too.
pub fn run_distribution(exe: &Executable, mass_threshold: f64, step_limit: u64) -> Result<Distribution> {
    let mut dist = Distribution::empty();
    let mut frontier = vec![Configuration::initial(exe)?];
    while !frontier.is_empty() {
        let mut waiting = Frontier::new(|c: &Configuration| &c.state);
        for mut c in frontier {
            loop {
                normalize_stack(&mut c.stack);
                match c.stack.last().map(|n| &n.op) {
                    None => {
                        dist.add_terminal(c.weight, c.state);
                        break;
                    }
                    Some(Op::Case { .. } | Op::While { .. }) => {
                        let key: Vec<usize> = c.stack.iter().map(|n| Arc::as_ptr(n) as usize).collect();
                        let w = c.weight;
                        waiting.insert(key, w, c);
                        break;
                    }
                    Some(_) => c = step(&c, None)?.pop().expect("one successor"),
                }
            }
        }
        if waiting.is_empty() {
            break;
        }
        if dist.rounds >= step_limit {
            dist.residual += waiting.total_weight();
            break;
        }
        let mut next = Vec::new();
        for (weight, mut c) in waiting.into_items() {
            if weight < mass_threshold {
                dist.residual += weight;
                continue;
            }
            c.weight = weight;
            next.extend(step(&c, None)?);
        }
        frontier = next;
        dist.rounds += 1;
    }
    Ok(dist)
}

/// Lookup of stored states within [`STATE_MERGE_TOL`] of a query. States
/// are kept sorted by a fixed linear functional of their entries, which
/// differs by at most `1.5·dim·d` between states at distance `d`, so only a
/// narrow key window is compared.
#[derive(Debug, Clone, Default)]
pub(crate) struct StateIndex {
    keys: Vec<(f64, usize)>,
}

impl StateIndex {
    fn key(state: &DensityOperator) -> f64 {
        let m = state.debug_matrix();
        let mut k = 0.0;
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let w = ((7 * i + 13 * j) % 17 + 1) as f64 / 17.0;
                let z = m.get(i, j);
                k += w * (z.re + 0.5 * z.im);
            }
        }
        k
    }

    /// Smallest stored index whose state is within tolerance of `state`.
    pub(crate) fn find<'a>(&self, state: &DensityOperator, stored: impl Fn(usize) -> &'a DensityOperator) -> Option<usize> {
        let k = Self::key(state);
        let window = 1.5 * state.debug_matrix().rows() as f64 * STATE_MERGE_TOL + 1e-12 * (1.0 + k.abs());
        let start = self.keys.partition_point(|(x, _)| *x < k - window);
        self.keys[start..]
            .iter()
            .take_while(|(x, _)| *x <= k + window)
            .filter(|(_, i)| stored(*i).distance(state) <= STATE_MERGE_TOL)
            .map(|(_, i)| *i)
            .min()
    }

    pub(crate) fn insert(&mut self, state: &DensityOperator, idx: usize) {
        let k = Self::key(state);
        let at = self.keys.partition_point(|(x, _)| *x < k);
        self.keys.insert(at, (k, idx));
    }
}

/// Branches waiting at a measurement, merged by continuation and state.
pub(crate) struct Frontier<K, T> {
    state_of: fn(&T) -> &DensityOperator,
    slots: HashMap<K, StateIndex>,
    items: Vec<(f64, T)>,
}

impl<K: Hash + Eq, T> Frontier<K, T> {
    pub(crate) fn new(state_of: fn(&T) -> &DensityOperator) -> Self {
        Self {
            state_of,
            slots: HashMap::new(),
            items: Vec::new(),
        }
    }

    pub(crate) fn insert(&mut self, key: K, weight: f64, item: T) {
        let slot = self.slots.entry(key).or_default();
        let (items, state_of) = (&self.items, self.state_of);
        match slot.find(state_of(&item), |i| state_of(&items[i].1)) {
            Some(i) => self.items[i].0 += weight,
            None => {
                slot.insert(state_of(&item), self.items.len());
                self.items.push((weight, item));
            }
        }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub(crate) fn total_weight(&self) -> f64 {
        self.items.iter().map(|(w, _)| w).sum()
    }

    /// Merged weight and the first branch of each group, in arrival order.
    pub(crate) fn into_items(self) -> impl Iterator<Item = (f64, T)> {
        self.items.into_iter()
    }
}
