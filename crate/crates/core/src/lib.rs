//! Static deadlock analysis and a reference interpreter for mabs, a small
//! concurrent object language with asynchronous calls, futures, and
//! cog-based cooperative scheduling.
//!
//! The pipeline has four stages: the frontend parses and type-checks
//! `.mabs` sources; the inference engine extracts behavioral contracts and
//! solves the generated constraints by semi-unification; and two
//! interchangeable back-ends decide circularity-freedom of the contracts —
//! a fixpoint computation over lams with saturation, and a model checker
//! that unfolds contracts up to mutation orders. The interpreter executes
//! the operational semantics and serves as the runtime deadlock oracle.

pub mod ast;
pub mod contract;
pub mod diag;
pub mod fixpoint;
pub mod gen;
pub mod infer;
pub mod interp;
pub mod lam;
pub mod lexer;
pub mod modelcheck;
pub mod parser;
pub mod pipeline;
pub mod pretty;
pub mod report;
pub mod solve;
pub mod tast;
pub mod typecheck;

pub use diag::{DiagCode, Diagnostic};
pub use parser::parse;
pub use pretty::pretty;
pub use typecheck::typecheck;
