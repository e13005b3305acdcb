//! `mabs`: static deadlock analyzer and reference interpreter for `.mabs`
//! programs.
//!
//! Exit codes: `analyze` returns 0 when every back-end reports
//! deadlock-free, 1 on a potential deadlock, 2 on any analysis error;
//! `run` returns 0/1/3 for terminated/deadlocked/step-limit; `explore`
//! returns 1 when a deadlock is reachable, 0 otherwise, 4 on a resource
//! limit.

use clap::{Parser, Subcommand, ValueEnum};
use mabs_core::interp;
use mabs_core::pipeline::{self, AnalyzeOpts, Backend};
use std::path::PathBuf;
use std::process::ExitCode;
use std::rc::Rc;

#[derive(Parser)]
#[command(name = "mabs", version, about = "Deadlock analysis for mabs programs")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Fixpoint,
    Modelcheck,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Infer contracts and analyze them for potential deadlocks.
    Analyze {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = BackendArg::Both)]
        backend: BackendArg,
        /// Saturation point for the fixpoint back-end.
        #[arg(long, default_value_t = 0)]
        saturation: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Include the solved contract class table in the report.
        #[arg(long)]
        dump_contracts: bool,
        /// Include every lam-table approximant in the report.
        #[arg(long)]
        dump_lams: bool,
        /// Include the evaluated contract pair in the report.
        #[arg(long)]
        dump_cp: bool,
        /// Abort the fixpoint when a lam exceeds this many relations.
        #[arg(long, default_value_t = 100_000)]
        lam_cap: usize,
    },
    /// Execute the program with a seeded random scheduler.
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Explore all schedules up to a depth bound.
    Explore {
        file: PathBuf,
        #[arg(long, default_value_t = 30)]
        depth: usize,
        #[arg(long, default_value_t = 200_000)]
        state_cap: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Cmd::Analyze {
            file,
            backend,
            saturation,
            format,
            dump_contracts,
            dump_lams,
            dump_cp,
            lam_cap,
        } => {
            let source = match read(&file) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let opts = AnalyzeOpts {
                backend: match backend {
                    BackendArg::Fixpoint => Backend::Fixpoint,
                    BackendArg::Modelcheck => Backend::ModelCheck,
                    BackendArg::Both => Backend::Both,
                },
                saturation,
                lam_cap,
                dump_contracts,
                dump_lams,
                dump_cp,
            };
            let name = file.display().to_string();
            match pipeline::analyze_source(&name, &source, &opts) {
                Ok(report) => {
                    match format {
                        Format::Text => print!("{}", report.render_text(color_enabled())),
                        Format::Json => println!("{}", report.to_json()),
                    }
                    if report.any_error() {
                        return ExitCode::from(2);
                    }
                    match report.overall() {
                        Some(mabs_core::fixpoint::AnalysisVerdict::DeadlockFree) => {
                            ExitCode::SUCCESS
                        }
                        Some(mabs_core::fixpoint::AnalysisVerdict::PotentialDeadlock) => {
                            ExitCode::from(1)
                        }
                        None => ExitCode::from(2),
                    }
                }
                Err(pipeline::PipelineError::Frontend(diags)) => {
                    for d in diags {
                        eprintln!("{}", d.render(&name));
                    }
                    ExitCode::from(2)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Cmd::Run { file, seed, steps, format } => {
            let program = match load(&file) {
                Ok(p) => p,
                Err(code) => return code,
            };
            let trace = interp::trace::run(program, seed, steps);
            match format {
                Format::Text => print!("{}", trace.render_text()),
                Format::Json => println!("{}", trace.to_json()),
            }
            match trace.verdict {
                interp::trace::Verdict::Terminated => ExitCode::SUCCESS,
                interp::trace::Verdict::Deadlocked => ExitCode::from(1),
                interp::trace::Verdict::StepLimit => ExitCode::from(3),
            }
        }
        Cmd::Explore { file, depth, state_cap, format } => {
            if depth == 0 {
                eprintln!("error: --depth must be positive");
                return ExitCode::from(2);
            }
            let program = match load(&file) {
                Ok(p) => p,
                Err(code) => return code,
            };
            let init = interp::init_config(program);
            let opts = interp::explore::ExploreOpts { depth, state_cap, check_invariants: false };
            match interp::explore::explore(init, &opts) {
                Ok(res) => {
                    let summary = serde_json::json!({
                        "reachable": res.deadlock_reachable,
                        "termination_reachable": res.termination_reachable,
                        "states": res.states,
                        "depth": res.depth,
                        "witness": res.witness.as_ref().map(|w| {
                            w.iter().map(|l| l.to_string()).collect::<Vec<_>>()
                        }),
                    });
                    match format {
                        Format::Text => {
                            println!(
                                "deadlock reachable: {} (states: {}, depth: {})",
                                res.deadlock_reachable, res.states, res.depth
                            );
                            println!("termination reachable: {}", res.termination_reachable);
                            if let Some(w) = &res.witness {
                                for (k, label) in w.iter().enumerate() {
                                    println!("step {k}: {label}");
                                }
                            }
                        }
                        Format::Json => println!("{summary}"),
                    }
                    if res.deadlock_reachable {
                        ExitCode::from(1)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(4)
                }
            }
        }
    }
}

fn color_enabled() -> bool {
    std::env::var("DF_COLOR").map(|v| v != "0").unwrap_or(true)
}

fn read(file: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(file).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", file.display());
        ExitCode::from(2)
    })
}

fn load(file: &PathBuf) -> Result<Rc<mabs_core::tast::TypedProgram>, ExitCode> {
    let source = read(file)?;
    let name = file.display().to_string();
    match pipeline::frontend(&source) {
        Ok(p) => Ok(Rc::new(p)),
        Err(diags) => {
            for d in diags {
                eprintln!("{}", d.render(&name));
            }
            Err(ExitCode::from(2))
        }
    }
}
