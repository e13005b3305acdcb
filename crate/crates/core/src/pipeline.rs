//! The end-to-end pipeline: parse, type-check, infer contracts, solve the
//! constraints, and run the selected analysis back-ends.

use crate::contract::ContractTable;
use crate::diag::{DiagCode, Diagnostic};
use crate::fixpoint;
use crate::infer::{self, InferError};
use crate::modelcheck;
use crate::report::*;
use crate::solve::SolveError;
use crate::tast::TypedProgram;
use serde_json::json;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{}", render_diags(.0))]
    Frontend(Vec<Diagnostic>),
    #[error(transparent)]
    Infer(#[from] InferError),
}

fn render_diags(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Fixpoint,
    ModelCheck,
    Both,
}

#[derive(Debug, Clone)]
pub struct AnalyzeOpts {
    pub backend: Backend,
    pub saturation: usize,
    pub lam_cap: usize,
    pub dump_contracts: bool,
    pub dump_lams: bool,
    pub dump_cp: bool,
}

impl Default for AnalyzeOpts {
    fn default() -> Self {
        AnalyzeOpts {
            backend: Backend::Both,
            saturation: 0,
            lam_cap: 100_000,
            dump_contracts: false,
            dump_lams: false,
            dump_cp: false,
        }
    }
}

/// Parse and type-check.
pub fn frontend(source: &str) -> Result<TypedProgram, Vec<Diagnostic>> {
    let ast = crate::parser::parse(source).map_err(|d| vec![d])?;
    crate::typecheck::typecheck(&ast)
}

/// Inference plus constraint solving, with solver failures mapped onto the
/// corresponding restriction diagnostics.
pub fn contracts(program: &TypedProgram) -> Result<ContractTable, PipelineError> {
    match infer::infer_and_solve(program) {
        Ok(t) => Ok(t),
        Err(InferError::Solve(SolveError::Occurs(v))) => {
            Err(PipelineError::Frontend(vec![Diagnostic::restriction(
                DiagCode::RecursiveRecord,
                format!("recursive object structure (record variable X{v} occurs in itself)"),
                Default::default(),
            )]))
        }
        Err(e) => Err(PipelineError::Infer(e)),
    }
}

pub fn analyze_source(
    name: &str,
    source: &str,
    opts: &AnalyzeOpts,
) -> Result<AnalysisReport, PipelineError> {
    let program = frontend(source).map_err(PipelineError::Frontend)?;
    let cct = contracts(&program)?;
    Ok(analyze_table(name, &cct, opts))
}

/// Runs the selected back-ends over an already-computed contract table.
pub fn analyze_table(name: &str, cct: &ContractTable, opts: &AnalyzeOpts) -> AnalysisReport {
    let mut backends = Vec::new();
    let mut lams_dump = None;
    let mut cp_dump = None;

    if matches!(opts.backend, Backend::Fixpoint | Backend::Both) {
        let t0 = Instant::now();
        match fixpoint::analyze(cct, opts.saturation, opts.lam_cap) {
            Ok(a) => {
                let time_ms = t0.elapsed().as_secs_f64() * 1e3;
                if opts.dump_lams {
                    lams_dump = Some(lams_json(&a.report));
                }
                backends.push(BackendReport {
                    backend: "fixpoint".into(),
                    verdict: Some(a.verdict),
                    saturated: a.report.saturated,
                    witness: witness_strings(&a.witness),
                    time_ms,
                    error: None,
                    details: json!({
                        "converged_at": a.report.converged_at,
                        "saturation_point": a.report.saturation_point,
                        "main_lam": a.lam.to_string(),
                        "table": a.report.table,
                    }),
                });
            }
            Err(e) => {
                let time_ms = t0.elapsed().as_secs_f64() * 1e3;
                backends.push(BackendReport::failed("fixpoint", e.to_string(), time_ms));
            }
        }
    }

    if matches!(opts.backend, Backend::ModelCheck | Backend::Both) {
        let t0 = Instant::now();
        match modelcheck::analyze(cct) {
            Ok(a) => {
                let time_ms = t0.elapsed().as_secs_f64() * 1e3;
                if opts.dump_cp {
                    cp_dump = Some(a.final_cp.to_string());
                }
                let mutations: serde_json::Value = a
                    .info
                    .iter()
                    .map(|((c, m), i)| {
                        (
                            format!("{c}.{m}"),
                            json!({
                                "recursive": i.recursive,
                                "linear": i.linear,
                                "cycle": i.cycle,
                                "mutation": i.mutation.as_ref().map(|mu| mu.to_string()),
                                "order": i.order,
                            }),
                        )
                    })
                    .collect::<serde_json::Map<String, serde_json::Value>>()
                    .into();
                backends.push(BackendReport {
                    backend: "modelcheck".into(),
                    verdict: Some(a.verdict),
                    saturated: false,
                    witness: witness_strings(&a.witness),
                    time_ms,
                    error: None,
                    details: json!({
                        "steps": a.steps,
                        "main_lam": a.lam.to_string(),
                        "methods": mutations,
                    }),
                });
            }
            Err(e) => {
                let time_ms = t0.elapsed().as_secs_f64() * 1e3;
                backends.push(BackendReport::failed("modelcheck", e.to_string(), time_ms));
            }
        }
    }

    let methods = cct.methods.keys().map(|(c, m)| format!("{c}.{m}")).collect();
    AnalysisReport {
        schema: REPORT_SCHEMA,
        program: name.to_string(),
        methods,
        backends,
        contracts: opts.dump_contracts.then(|| contracts_dump(cct)),
        lams: lams_dump,
        cp: cp_dump,
    }
}

/// Every approximant in the tabular style of the lam dumps.
fn lams_json(report: &fixpoint::FixpointReport) -> serde_json::Value {
    let approximants: Vec<serde_json::Value> = report
        .approximants
        .iter()
        .map(|t| {
            t.iter()
                .map(|((c, m), p)| (format!("{c}.{m}"), json!(p.to_string())))
                .collect::<serde_json::Map<String, serde_json::Value>>()
                .into()
        })
        .collect();
    json!({
        "approximants": approximants,
        "final": report.table,
        "converged_at": report.converged_at,
        "saturated": report.saturated,
    })
}
