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

//! `qwhile`: run while-programs, compile them to f-QASM, synthesize
//! unitaries into gate sequences and reproduce the bundled experiments.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Seed used by every randomized command unless `--seed` is given.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(name = "qwhile", version, about = "Quantum while-language toolchain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Execute a `.qw` program.
    Run(RunArgs),
    /// Lower a `.qw` program to f-QASM.
    Compile(CompileArgs),
    /// Turn a unitary (JSON matrix) into a gate sequence.
    Synthesize(SynthArgs),
    /// Run one of the bundled experiments.
    Experiment(ExperimentArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Sampled,
    Distribution,
}

#[derive(Args, Debug)]
pub struct Output {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the primary output here instead of stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Limits {
    /// Per-shot step limit (sampled) or measurement-layer limit (distribution).
    #[arg(long, default_value_t = qwhile_core::sim::DEFAULT_STEP_LIMIT)]
    pub step_limit: u64,
    /// Branches lighter than this are dropped into the residual.
    #[arg(long, default_value_t = qwhile_core::sim::DEFAULT_MASS_THRESHOLD)]
    pub mass_threshold: f64,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "sampled")]
    pub mode: Mode,
    #[command(flatten)]
    pub limits: Limits,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct CompileArgs {
    pub file: PathBuf,
    /// Also compare the VM against the interpreter in distribution mode.
    #[arg(long)]
    pub check: bool,
    #[command(flatten)]
    pub limits: Limits,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// JSON 2-D array of `[re, im]` pairs, row major.
    pub matrix: PathBuf,
    #[arg(long, default_value = "qsd", value_parser = ["qr", "qsd"])]
    pub method: String,
    #[arg(long, default_value_t = 1e-3, value_parser = positive)]
    pub epsilon: f64,
    /// Basic gate set; CNOT is always available.
    #[arg(long, value_delimiter = ',', default_value = "H,T,Tdg,S,Sdg,X,CNOT")]
    pub gates: Vec<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[command(subcommand)]
    pub which: Experiment,
}

#[derive(Subcommand, Debug)]
pub enum Experiment {
    /// Loop counter statistics.
    Qloop {
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        shots: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// One BB84 session with its full transcript.
    Bb84 {
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value = "identity")]
        channel: String,
        /// Sampling fraction for the check step; omit for the global comparison.
        #[arg(long)]
        sample: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// One Alice serving several Bobs.
    Bb84Multi {
        #[arg(long, default_value_t = 8)]
        clients: u64,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value = "identity")]
        channel: String,
        #[arg(long)]
        sample: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Success counts over channels, key lengths and sampling fractions.
    Bb84Sweep {
        #[arg(long, default_value_t = 100)]
        sessions: u64,
        /// Defaults to identity plus the five noisy channels.
        #[arg(long, value_delimiter = ';')]
        channels: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "16,64,256")]
        lengths: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.25,0.5")]
        fractions: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Grover search, single or multi-object.
    Grover {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<usize>,
        #[arg(long, default_value = "single", value_parser = ["single", "multi"])]
        mode: String,
        /// `fixed`: round(π/4·√N) every round; `marked`: round(π/4·√(N/m)).
        #[arg(long, default_value = "fixed", value_parser = ["fixed", "marked"])]
        rule: String,
        /// Oracle calls per round, overriding the rule.
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => commands::run(&a),
        Command::Compile(a) => commands::compile(&a),
        Command::Synthesize(a) => commands::synthesize(&a),
        Command::Experiment(a) => commands::experiment(a.which),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
