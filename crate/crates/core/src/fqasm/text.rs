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

use std::collections::BTreeSet;

use super::{default_basic_set, is_classical_register, FqasmError, FqasmProgram, Instruction, Operand, Result};
use crate::lang::{self, Decl, LangError, QubitRef, Stmt};
use crate::quantum::GateLibrary;

/// Parses f-QASM text. Without register declarations in the header every
/// quantum register is inferred from its first use and has width 1.
pub fn parse_fqasm(text: &str) -> Result<FqasmProgram> {
    let mut decls: Vec<Decl> = Vec::new();
    let mut basic: Option<BTreeSet<String>> = None;
    let mut raw: Vec<(usize, Instruction)> = Vec::new();
    for (i, full) in text.lines().enumerate() {
        let line = i + 1;
        let s = full.split("//").next().unwrap_or("").trim();
        let s = s.strip_suffix(';').unwrap_or(s).trim_end();
        if s.is_empty() {
            continue;
        }
        if is_declaration(s) {
            if !raw.is_empty() {
                return Err(syntax(line, "declarations must precede instructions"));
            }
            for d in parse_decls(s, line)? {
                if decls.iter().any(|e| e.name() == d.name()) {
                    return Err(syntax(line, format!("`{}` declared twice", d.name())));
                }
                decls.push(d);
            }
            continue;
        }
        if let Some(args) = call_args(s, "BASIC") {
            basic = Some(split_args(args, line)?.into_iter().map(String::from).collect());
            continue;
        }
        raw.push((line, parse_instruction(s, line)?));
    }

    let declared = decls.iter().any(|d| matches!(d, Decl::Register { .. }));
    if !declared {
        for (_, ins) in &raw {
            for q in ins.qubit_refs() {
                let known = decls.iter().any(|d| d.name() == q.register);
                if !known {
                    decls.push(Decl::Register { name: q.register.clone(), width: 1 });
                }
            }
        }
    }

    // gate names are matched without regard to case
    let mut gates: Vec<String> = GateLibrary::standard().names().map(String::from).collect();
    gates.extend(decls.iter().filter_map(|d| match d {
        Decl::Gate { name, .. } => Some(name.clone()),
        _ => None,
    }));
    let basic = basic.unwrap_or_else(default_basic_set);
    let mut lines = Vec::with_capacity(raw.len());
    let mut instructions = Vec::with_capacity(raw.len());
    for (line, mut ins) in raw {
        if let Instruction::Apply { gate, num, .. } = &mut ins {
            *gate = resolve_gate(gate, &gates, line)?;
            if *num == u32::MAX {
                *num = u32::from(!basic.contains(gate.as_str()));
            }
        }
        lines.push(line);
        instructions.push(ins);
    }
    let f = FqasmProgram { decls, basic, instructions };
    f.check(Some(&lines))?;
    Ok(f)
}

fn syntax(line: usize, message: impl Into<String>) -> FqasmError {
    FqasmError::Syntax { line, message: message.into() }
}

fn is_declaration(s: &str) -> bool {
    let first = s.split_whitespace().next().unwrap_or("");
    if matches!(first, "gate" | "meas" | "channel") {
        return true;
    }
    match s.split_once(':') {
        Some((name, rest)) => {
            !rest.starts_with('=')
                && is_ident(name.trim())
                && rest.trim_start().starts_with("qubit")
        }
        None => false,
    }
}

fn parse_decls(s: &str, line: usize) -> Result<Vec<Decl>> {
    let p = lang::parse(&format!("{s};")).map_err(|e| match e {
        LangError::Syntax { message, .. } => syntax(line, message),
        LangError::UndeclaredName { name, .. } => syntax(line, format!("undeclared name `{name}`")),
        LangError::Dimension { message, .. } => syntax(line, message),
        other => other.into(),
    })?;
    if p.body != Stmt::Seq(Vec::new()) {
        return Err(syntax(line, "statements are not allowed in the header"));
    }
    Ok(p.decls)
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// The text between `NAME(` and the matching final `)`, for a
/// case-insensitive `NAME`.
fn call_args<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    let open = s.find('(')?;
    if !s[..open].trim().eq_ignore_ascii_case(name) || !s.ends_with(')') {
        return None;
    }
    Some(&s[open + 1..s.len() - 1])
}

/// Splits on commas outside brackets.
fn split_args(s: &str, line: usize) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(syntax(line, "unbalanced brackets"));
        }
    }
    if depth != 0 {
        return Err(syntax(line, "unbalanced brackets"));
    }
    let last = s[start..].trim();
    if !last.is_empty() || !out.is_empty() {
        out.push(last);
    }
    if out.iter().any(|a| a.is_empty()) {
        return Err(syntax(line, "empty argument"));
    }
    Ok(out)
}

fn qubit(s: &str, line: usize) -> Result<QubitRef> {
    let s = s.trim();
    if is_ident(s) {
        return Ok(QubitRef::whole(s));
    }
    if let Some((name, rest)) = s.split_once('[') {
        if let Some(idx) = rest.strip_suffix(']') {
            if is_ident(name.trim()) {
                let i = idx.trim().parse().map_err(|_| syntax(line, format!("bad index in `{s}`")))?;
                return Ok(QubitRef::at(name.trim(), i));
            }
        }
    }
    Err(syntax(line, format!("expected a quantum register, found `{s}`")))
}

fn qubits(args: &[&str], line: usize) -> Result<Vec<QubitRef>> {
    if args.is_empty() {
        return Err(syntax(line, "expected at least one quantum register"));
    }
    args.iter().map(|a| qubit(a, line)).collect()
}

fn creg(s: &str, line: usize) -> Result<String> {
    let s = s.trim();
    if is_classical_register(s) {
        Ok(s.to_string())
    } else if is_ident(s) {
        Err(FqasmError::UnknownRegister { line, name: s.to_string() })
    } else {
        Err(syntax(line, format!("expected a classical register, found `{s}`")))
    }
}

fn label(s: &str, line: usize) -> Result<String> {
    let s = s.trim();
    if is_ident(s) {
        Ok(s.to_string())
    } else {
        Err(syntax(line, format!("bad label `{s}`")))
    }
}

/// `{M}(q1,q2)` as `(M, [q1, q2])`.
fn measurement(s: &str, line: usize) -> Result<(String, Vec<QubitRef>)> {
    let s = s.trim();
    let inner = s
        .strip_prefix('{')
        .and_then(|t| t.split_once('}'))
        .ok_or_else(|| syntax(line, format!("expected `{{M}}(q)`, found `{s}`")))?;
    let name = inner.0.trim();
    let args = inner
        .1
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| syntax(line, "expected `(` after the measurement name"))?;
    if !is_ident(name) {
        return Err(syntax(line, format!("bad measurement name `{name}`")));
    }
    Ok((name.to_string(), qubits(&split_args(args, line)?, line)?))
}

fn parse_instruction(s: &str, line: usize) -> Result<Instruction> {
    if let Some(l) = s.strip_suffix(':') {
        return Ok(Instruction::Label(label(l, line)?));
    }
    if let Some((lhs, rhs)) = s.split_once(":=") {
        let (meas, qs) = measurement(rhs, line)?;
        return Ok(Instruction::Measure { reg: creg(lhs, line)?, meas, qubits: qs });
    }
    let head: String = s.chars().take_while(|c| c.is_ascii_alphanumeric() || *c == '_').collect();
    let rest = s[head.len()..].trim();
    let upper = head.to_ascii_uppercase();
    match upper.as_str() {
        "JMP" => return Ok(Instruction::Jmp(label(rest, line)?)),
        "JE" => return Ok(Instruction::Je(label(rest, line)?)),
        "APPLY" if !rest.starts_with('(') => {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() < 3 {
                return Err(syntax(line, "expected `APPLY gate q… num`"));
            }
            let num = parts[parts.len() - 1]
                .parse()
                .map_err(|_| syntax(line, "expected a numeric tag"))?;
            return Ok(Instruction::Apply {
                gate: parts[0].to_string(),
                qubits: qubits(&parts[1..parts.len() - 1], line)?,
                num,
            });
        }
        _ => {}
    }
    let args = rest
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| syntax(line, format!("cannot parse `{s}`")))?;
    let args = split_args(args, line)?;
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(syntax(line, format!("`{head}` takes {n} arguments")))
        }
    };
    match upper.as_str() {
        "INIT" => {
            arity(1)?;
            Ok(Instruction::Init(qubit(args[0], line)?))
        }
        "MOV" => {
            arity(2)?;
            let dst = creg(args[0], line)?;
            if args[1].starts_with('{') {
                let (meas, qs) = measurement(args[1], line)?;
                Ok(Instruction::MeasMov { reg: dst, meas, qubits: qs })
            } else {
                Ok(Instruction::Mov { dst, src: creg(args[1], line)? })
            }
        }
        "CMP" => {
            arity(2)?;
            let operand = match args[1].parse::<u64>() {
                Ok(v) => Operand::Lit(v),
                Err(_) => Operand::Reg(creg(args[1], line)?),
            };
            Ok(Instruction::Cmp { reg: creg(args[0], line)?, operand })
        }
        "SUPOP" => {
            if args.len() < 2 || !is_ident(args[0]) {
                return Err(syntax(line, "expected `SUPOP(channel,q…)`"));
            }
            Ok(Instruction::SupOp { channel: args[0].to_string(), qubits: qubits(&args[1..], line)? })
        }
        _ if upper.len() > 4 && upper.ends_with("GATE") => {
            let gate = head[..head.len() - 4].to_string();
            // a trailing integer is the tag; without one it is inferred
            let (num, qs) = match args.last().and_then(|a| a.parse::<u32>().ok()) {
                Some(n) => (n, &args[..args.len() - 1]),
                None => (u32::MAX, &args[..]),
            };
            Ok(Instruction::Apply { gate, qubits: qubits(qs, line)?, num })
        }
        _ => Err(syntax(line, format!("unknown instruction `{head}`"))),
    }
}

/// Exact match first, then a unique case-insensitive one. Unknown names are
/// kept as written and rejected when a VM is built.
fn resolve_gate(written: &str, gates: &[String], line: usize) -> Result<String> {
    if gates.iter().any(|g| g == written) {
        return Ok(written.to_string());
    }
    let matches: Vec<&String> = gates.iter().filter(|g| g.eq_ignore_ascii_case(written)).collect();
    match matches.as_slice() {
        [] => Ok(written.to_string()),
        [one] => Ok((*one).clone()),
        _ => Err(syntax(line, format!("gate `{written}` is ambiguous"))),
    }
}
