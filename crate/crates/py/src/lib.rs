//! Python bindings for the mabs deadlock analyzer.
//!
//! Exposes the pipeline stages as module functions returning JSON strings,
//! plus a `Program` class wrapping a type-checked program for repeated
//! interpreter runs:
//!
//! ```python
//! import json, mabs_py
//! report = json.loads(mabs_py.analyze(source, backend="both"))
//! p = mabs_py.Program(source)
//! print(p.run(seed=1))
//! ```

// The pyo3 attribute macros expand to PyErr conversions that clippy
// flags as useless on these signatures.
#![allow(clippy::useless_conversion)]

use mabs_core::interp;
use mabs_core::pipeline::{self, AnalyzeOpts, Backend};
use mabs_core::tast::TypedProgram;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn frontend_or_err(source: &str) -> PyResult<TypedProgram> {
    pipeline::frontend(source).map_err(|diags| {
        let msg = diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n");
        PyValueError::new_err(msg)
    })
}

fn backend_of(name: &str) -> PyResult<Backend> {
    match name {
        "fixpoint" => Ok(Backend::Fixpoint),
        "modelcheck" => Ok(Backend::ModelCheck),
        "both" => Ok(Backend::Both),
        other => Err(PyValueError::new_err(format!("unknown backend `{other}`"))),
    }
}

/// Parse and type-check; raises ValueError with the diagnostics on failure.
#[pyfunction]
fn check(source: &str) -> PyResult<String> {
    let program = frontend_or_err(source)?;
    let classes: Vec<String> = program.classes.iter().map(|c| c.name.clone()).collect();
    Ok(serde_json::json!({ "ok": true, "classes": classes }).to_string())
}

/// Run the full analysis pipeline; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (source, backend="both", saturation=0, dump_contracts=false))]
fn analyze(
    source: &str,
    backend: &str,
    saturation: usize,
    dump_contracts: bool,
) -> PyResult<String> {
    let opts = AnalyzeOpts {
        backend: backend_of(backend)?,
        saturation,
        dump_contracts,
        ..AnalyzeOpts::default()
    };
    match pipeline::analyze_source("<python>", source, &opts) {
        Ok(report) => Ok(report.to_json().to_string()),
        Err(e) => Err(PyValueError::new_err(e.to_string())),
    }
}

/// The solved contract class table of a program, as JSON.
#[pyfunction]
fn contracts(source: &str) -> PyResult<String> {
    let program = frontend_or_err(source)?;
    let cct = pipeline::contracts(&program).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(mabs_core::report::contracts_dump(&cct).to_string())
}

/// A type-checked program ready for interpretation.
#[pyclass]
struct Program {
    program: std::sync::Arc<ProgramCell>,
}

// The interpreter works on Rc-shared trees; runs are confined to a single
// call, so holding the typed AST behind a Send wrapper is safe here.
struct ProgramCell(TypedProgram);
unsafe impl Send for ProgramCell {}
unsafe impl Sync for ProgramCell {}

#[pymethods]
impl Program {
    #[new]
    fn new(source: &str) -> PyResult<Self> {
        let program = frontend_or_err(source)?;
        Ok(Program { program: std::sync::Arc::new(ProgramCell(program)) })
    }

    /// Execute with a seeded scheduler; returns the JSON trace.
    #[pyo3(signature = (seed=0, max_steps=10_000))]
    fn run(&self, seed: u64, max_steps: usize) -> String {
        let rc = std::rc::Rc::new(self.program.0.clone());
        let trace = interp::trace::run(rc, seed, max_steps);
        trace.to_json().to_string()
    }

    /// Breadth-first exploration of all schedules; returns the JSON summary.
    #[pyo3(signature = (depth=30, state_cap=200_000))]
    fn explore(&self, depth: usize, state_cap: usize) -> PyResult<String> {
        let rc = std::rc::Rc::new(self.program.0.clone());
        let init = interp::init_config(rc);
        let opts = interp::explore::ExploreOpts { depth, state_cap, check_invariants: false };
        match interp::explore::explore(init, &opts) {
            Ok(res) => Ok(serde_json::json!({
                "reachable": res.deadlock_reachable,
                "termination_reachable": res.termination_reachable,
                "states": res.states,
                "depth": res.depth,
                "witness": res.witness.as_ref().map(|w| {
                    w.iter().map(|l| l.to_string()).collect::<Vec<_>>()
                }),
            })
            .to_string()),
            Err(e) => Err(PyValueError::new_err(e.to_string())),
        }
    }
}

#[pymodule]
fn mabs_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(contracts, m)?)?;
    m.add_class::<Program>()?;
    Ok(())
}
