//! Analysis reports: the result of running one or both back-ends on a
//! program, rendered as text or JSON (schema `schemas/report.schema.json`).

use crate::contract::{Cog, ContractTable};
use crate::fixpoint::AnalysisVerdict;
use serde::Serialize;
use serde_json::json;

pub const REPORT_SCHEMA: &str = "mabs-report/1";

#[derive(Debug, Clone, Serialize)]
pub struct BackendReport {
    pub backend: String,
    pub verdict: Option<AnalysisVerdict>,
    pub saturated: bool,
    pub witness: Vec<String>,
    pub time_ms: f64,
    pub error: Option<String>,
    /// Back-end specific details (iterations, lams, mutations, orders).
    pub details: serde_json::Value,
}

impl BackendReport {
    pub fn failed(backend: &str, error: String, time_ms: f64) -> Self {
        BackendReport {
            backend: backend.to_string(),
            verdict: None,
            saturated: false,
            witness: Vec::new(),
            time_ms,
            error: Some(error),
            details: serde_json::Value::Null,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema: &'static str,
    pub program: String,
    pub methods: Vec<String>,
    pub backends: Vec<BackendReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contracts: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lams: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cp: Option<String>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn render_text(&self, color: bool) -> String {
        let mut out = String::new();
        out.push_str(&format!("program: {}\n", self.program));
        out.push_str(&format!("methods: {}\n", self.methods.join(", ")));
        for b in &self.backends {
            match (&b.verdict, &b.error) {
                (Some(v), _) => {
                    let verdict = if color {
                        match v {
                            AnalysisVerdict::DeadlockFree => format!("\x1b[32m{v}\x1b[0m"),
                            AnalysisVerdict::PotentialDeadlock => format!("\x1b[31m{v}\x1b[0m"),
                        }
                    } else {
                        v.to_string()
                    };
                    out.push_str(&format!(
                        "{}: {} ({:.1} ms{})\n",
                        b.backend,
                        verdict,
                        b.time_ms,
                        if b.saturated { ", saturated: answer may be imprecise" } else { "" }
                    ));
                    if !b.witness.is_empty() {
                        out.push_str(&format!("  witness cycle: {}\n", b.witness.join(" -> ")));
                    }
                }
                (None, Some(e)) => {
                    out.push_str(&format!("{}: error: {}\n", b.backend, e));
                }
                (None, None) => {}
            }
        }
        out
    }

    /// The worst verdict across back-ends, used for the exit code.
    pub fn overall(&self) -> Option<AnalysisVerdict> {
        let mut seen = None;
        for b in &self.backends {
            match b.verdict {
                Some(AnalysisVerdict::PotentialDeadlock) => {
                    return Some(AnalysisVerdict::PotentialDeadlock)
                }
                Some(AnalysisVerdict::DeadlockFree) => seen = Some(AnalysisVerdict::DeadlockFree),
                None => {}
            }
        }
        seen
    }

    pub fn any_error(&self) -> bool {
        self.backends.iter().any(|b| b.error.is_some())
    }
}

pub fn witness_strings(witness: &Option<Vec<Cog>>) -> Vec<String> {
    witness.as_ref().map(|w| w.iter().map(|c| c.to_string()).collect()).unwrap_or_default()
}

/// The contract table in both the human notation and a structured form.
pub fn contracts_dump(cct: &ContractTable) -> serde_json::Value {
    let pretty: Vec<String> =
        cct.methods.values().map(|mc| mc.to_string()).collect();
    json!({
        "methods": serde_json::to_value(cct.methods.values().collect::<Vec<_>>()).unwrap(),
        "pretty": pretty,
        "main": {
            "sync": cct.main_sync.to_string(),
            "unsync": cct.main_unsync.to_string(),
            "structured": {
                "sync": serde_json::to_value(&cct.main_sync).unwrap(),
                "unsync": serde_json::to_value(&cct.main_unsync).unwrap(),
            }
        }
    })
}
