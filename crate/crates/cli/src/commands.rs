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

use std::fs;
use std::path::Path;

use qwhile_core::experiments::{
    self as ex, bb84_channel_sweep, bb84_multi_client, bb84_run, grover_run, standard_channels, qloop_run, Bb84Channel,
    Bb84Session, GroverMode, GroverSpec, IterationRule,
};
use qwhile_core::fqasm::{check_equivalence, compile_with, default_basic_set};
use qwhile_core::lang::{parse, LangError};
use qwhile_core::quantum::{c64, ComplexMatrix, GateLibrary};
use qwhile_core::sim::{run_distribution, run_shots_with, Executable, SimError};
use qwhile_core::synthesis::{reconstruct, synthesize as synth, GateSet, Method};

use crate::report;
use crate::{CompileArgs, Experiment, Format, Mode, Output, RunArgs, SynthArgs};

type Result<T> = std::result::Result<T, String>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// `file:line:col: message` when the position is known.
fn lang_error(path: &Path, e: &LangError) -> String {
    let (line, col, msg) = match e {
        LangError::Syntax { line, col, message } => (line, col, format!("syntax error: {message}")),
        LangError::UndeclaredName { line, col, name } => (line, col, format!("undeclared name `{name}`")),
        LangError::Dimension { line, col, message } => (line, col, format!("dimension error: {message}")),
        LangError::Invalid(_) => return format!("{}: {e}", path.display()),
    };
    format!("{}:{line}:{col}: {msg}", path.display())
}

fn sim_error(path: &Path, e: SimError) -> String {
    match &e {
        SimError::Lang(l) => lang_error(path, l),
        _ => format!("{}: {e}", path.display()),
    }
}

fn emit(out: &Output, text: &str) -> Result<()> {
    write_out(out.out.as_deref(), text)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(a: &RunArgs) -> Result<()> {
    let src = read(&a.file)?;
    let exe = Executable::from_source(&src).map_err(|e| sim_error(&a.file, e))?;
    let name = a.file.display().to_string();
    let text = match a.mode {
        Mode::Sampled => {
            let stats = run_shots_with(&exe, a.shots, a.seed, a.limits.step_limit).map_err(|e| sim_error(&a.file, e))?;
            report::shots(&name, exe.sites(), &stats, a.output.format)
        }
        Mode::Distribution => {
            let d = run_distribution(&exe, a.limits.mass_threshold, a.limits.step_limit)
                .map_err(|e| sim_error(&a.file, e))?;
            report::distribution(&name, &d, a.output.format)
        }
    };
    emit(&a.output, &text)
}

pub fn compile(a: &CompileArgs) -> Result<()> {
    let src = read(&a.file)?;
    let p = parse(&src).map_err(|e| lang_error(&a.file, &e))?;
    let compiled = compile_with(&p, &GateLibrary::standard(), &default_basic_set())
        .map_err(|e| format!("{}: {e}", a.file.display()))?;
    write_out(a.out.as_deref(), &compiled.serialize())?;
    if a.check {
        let rep = check_equivalence(&p, a.limits.mass_threshold, a.limits.step_limit, 1e-9)
            .map_err(|e| format!("{}: {e}", a.file.display()))?;
        if !rep.passed {
            return Err(format!(
                "{}: check failed: {}",
                a.file.display(),
                rep.detail.unwrap_or_default()
            ));
        }
        eprintln!(
            "check: pass ({} terminals, max weight gap {:.3e})",
            rep.terminals, rep.max_weight_gap
        );
    }
    Ok(())
}

/// Parses a JSON 2-D array of `[re, im]` pairs.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<[f64; 2]>> =
        serde_json::from_str(text).map_err(|e| format!("matrix must be a 2-D array of [re, im] pairs: {e}"))?;
    let rows: Vec<Vec<_>> = rows.iter().map(|r| r.iter().map(|[re, im]| c64(*re, *im)).collect()).collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| e.to_string())
}

pub fn synthesize(a: &SynthArgs) -> Result<()> {
    let path = a.matrix.display();
    let u = parse_matrix(&read(&a.matrix)?).map_err(|e| format!("{path}: {e}"))?;
    let method: Method = a.method.parse()?;
    let basic: GateSet = a.gates.iter().map(|g| g.trim().to_string()).collect();
    let seq = synth(&u, method, &basic, a.epsilon).map_err(|e| format!("{path}: {e}"))?;
    let error = reconstruct(&seq, seq.n_qubits)
        .map_err(|e| e.to_string())?
        .phase_invariant_distance(&u);
    emit(&a.output, &report::synthesis(&seq, error, a.epsilon, &a.method, a.output.format))
}

fn channel(s: &str) -> Result<Bb84Channel> {
    s.parse().map_err(|e: ex::ExperimentError| e.to_string())
}

pub fn experiment(which: Experiment) -> Result<()> {
    let err = |e: ex::ExperimentError| e.to_string();
    match which {
        Experiment::Qloop { shots, seed, output } => {
            let rep = qloop_run(shots, seed).map_err(err)?;
            emit(&output, &report::qloop(&rep, output.format))
        }
        Experiment::Bb84 {
            n,
            channel: ch,
            sample,
            seed,
            output,
        } => {
            let mut s = Bb84Session::new(n, channel(&ch)?, seed);
            s.sample_fraction = sample;
            let t = bb84_run(&s).map_err(err)?;
            emit(&output, &report::bb84(&s, &t, output.format))
        }
        Experiment::Bb84Multi {
            clients,
            n,
            channel: ch,
            sample,
            seed,
            output,
        } => {
            let ts = bb84_multi_client(clients, n, channel(&ch)?, sample, seed).map_err(err)?;
            emit(&output, &report::bb84_multi(seed, &ts, output.format))
        }
        Experiment::Bb84Sweep {
            sessions,
            channels,
            lengths,
            fractions,
            seed,
            output,
        } => {
            let chans = if channels.is_empty() {
                standard_channels()
            } else {
                channels.iter().map(|c| channel(c)).collect::<Result<Vec<_>>>()?
            };
            let table = bb84_channel_sweep(&chans, &lengths, &fractions, sessions, seed).map_err(err)?;
            let text = match output.format {
                Format::Csv => table.to_csv(),
                Format::Json => report::json(&table),
                Format::Text => format!("seed: {seed}\nsessions per cell: {sessions}\n{}", table.summary()),
            };
            emit(&output, &text)
        }
        Experiment::Grover {
            n,
            targets,
            mode,
            rule,
            rounds,
            seed,
            output,
        } => {
            let rule: IterationRule = rule.parse().map_err(err)?;
            let mode: GroverMode = mode.parse().map_err(err)?;
            let mut spec = GroverSpec::new(n, &targets).map_err(err)?.with_rule(rule);
            if let Some(r) = rounds {
                spec = spec.with_iterations(r);
            }
            let rep = grover_run(&spec, mode, seed).map_err(err)?;
            emit(&output, &report::grover(&rep, output.format))
        }
    }
}
