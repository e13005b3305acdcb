//! Seeded random execution producing a reproducible trace.

use super::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Terminated,
    Deadlocked,
    StepLimit,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Terminated => write!(f, "terminated"),
            Verdict::Deadlocked => write!(f, "deadlocked"),
            Verdict::StepLimit => write!(f, "step-limit"),
        }
    }
}

#[derive(Debug)]
pub struct Trace {
    pub steps: Vec<Label>,
    pub verdict: Verdict,
    pub final_config: Config,
}

impl Trace {
    /// Line-oriented rendering: `step k: RULE obj=.. fut=..`.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (k, label) in self.steps.iter().enumerate() {
            out.push_str(&format!("step {k}: {label}\n"));
        }
        out.push_str(&format!("verdict: {}\n", self.verdict));
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "steps": self.steps,
            "verdict": self.verdict,
        })
    }
}

/// Runs the program from its initial configuration, choosing uniformly
/// among enabled transitions with a seeded PRNG. Identical inputs yield
/// identical traces.
pub fn run(program: std::rc::Rc<crate::tast::TypedProgram>, seed: u64, max_steps: usize) -> Trace {
    let mut cfg = init_config(program);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut steps = Vec::new();
    loop {
        if cfg.is_deadlocked() {
            return Trace { steps, verdict: Verdict::Deadlocked, final_config: cfg };
        }
        if steps.len() >= max_steps {
            return Trace { steps, verdict: Verdict::StepLimit, final_config: cfg };
        }
        let mut succ = cfg.enabled();
        if succ.is_empty() {
            let verdict =
                if cfg.is_deadlocked() { Verdict::Deadlocked } else { Verdict::Terminated };
            return Trace { steps, verdict, final_config: cfg };
        }
        let pick = rng.gen_range(0..succ.len());
        let (label, next) = succ.swap_remove(pick);
        steps.push(label);
        cfg = next;
    }
}
