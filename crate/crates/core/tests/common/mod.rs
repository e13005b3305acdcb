#![allow(dead_code)]
//! Shared helpers for the integration suites.

use mabs_core::contract::{Cog, Dep};
use mabs_core::lam::{Lam, LamPair, ParamLamPair, Relation};
use mabs_core::tast::TypedProgram;
use std::path::PathBuf;
use std::rc::Rc;

pub fn program_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../programs").join(name)
}

pub fn load_program(name: &str) -> Rc<TypedProgram> {
    let source = std::fs::read_to_string(program_path(name))
        .unwrap_or_else(|e| panic!("reading {name}: {e}"));
    compile(&source)
}

pub fn compile(source: &str) -> Rc<TypedProgram> {
    let prog = match mabs_core::pipeline::frontend(source) {
        Ok(p) => p,
        Err(diags) => {
            panic!(
                "frontend failed:\n{}",
                diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
            )
        }
    };
    Rc::new(prog)
}

pub fn cv(n: u32) -> Cog {
    Cog::Var(n)
}

pub fn dep(a: Cog, b: Cog) -> Dep {
    Dep::get(a, b)
}

pub fn adep(a: Cog, b: Cog) -> Dep {
    Dep::awaited(a, b)
}

pub fn lam_of(rels: &[&[Dep]]) -> Lam {
    Lam {
        relations: rels
            .iter()
            .map(|r| r.iter().copied().collect::<Relation>())
            .collect(),
    }
}

pub fn pair_of(present: &[&[Dep]], future: &[&[Dep]]) -> LamPair {
    LamPair { present: lam_of(present), future: lam_of(future) }
}

pub fn param_pair(params: &[Cog], present: &[&[Dep]], future: &[&[Dep]]) -> ParamLamPair {
    ParamLamPair { params: params.to_vec(), pair: pair_of(present, future) }
}

/// Canonical renaming of cog (`c<n>`) and record-variable (`X<n>`) tokens
/// by first occurrence, for alpha-insensitive string comparison of
/// contracts and lams.
pub fn canon(s: &str) -> String {
    let bytes = s.as_bytes();
    let mut out = String::new();
    let mut cogs: Vec<String> = Vec::new();
    let mut vars: Vec<String> = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        let boundary = i == 0 || !(bytes[i - 1] as char).is_ascii_alphanumeric();
        if boundary && (ch == 'c' || ch == 'X') && i + 1 < bytes.len() {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                j += 1;
            }
            let has_digits = j > i + 1;
            let word_ends = j == bytes.len() || !(bytes[j] as char).is_ascii_alphanumeric();
            if has_digits && word_ends {
                let tok = &s[i..j];
                let (table, prefix): (&mut Vec<String>, &str) =
                    if ch == 'c' { (&mut cogs, "c") } else { (&mut vars, "X") };
                let idx = match table.iter().position(|t| t == tok) {
                    Some(k) => k,
                    None => {
                        table.push(tok.to_string());
                        table.len() - 1
                    }
                };
                out.push_str(prefix);
                out.push_str(&idx.to_string());
                i = j;
                continue;
            }
        }
        out.push(ch);
        i += 1;
    }
    out
}
