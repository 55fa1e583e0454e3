//! SMT-LIB2 emission, the solver subprocess, model parsing and witness
//! reconstruction, tied together by [`decide`].

mod sexpr;
mod smtlib;
mod solver;
mod witness;

pub use sexpr::{parse_model, parse_sexps, print_model, Sexp};
pub use smtlib::to_smtlib2;
pub use solver::{
    invoke, SolverConfig, SolverResult, Status, DEFAULT_SOLVER, QUANTIFIED_SOLVER_ENV, SOLVER_ENV,
};
pub use witness::{euler_path, flows_to_path, flows_to_run, FlowWitness};

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encode::{
    encode_inclusion, encode_inclusion_refutation, encode_membership, encode_query, fixed_dummies,
    incl_var, to_normal_form, EncodeError, Mode,
};
use crate::model::{Configuration, Machine, ModelError, Run, Vector};
use crate::pa::{Formula, SizeConvention};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BackendError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("bad witness: {0}")]
    Witness(String),
    #[error("refused to report an unchecked answer: {0}")]
    Unsound(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

impl std::fmt::Display for Answer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    /// unary size of the first sentence sent to the solver
    pub formula_size: usize,
    pub solver_calls: usize,
    pub solver_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub answer: Answer,
    pub witness: Option<Run>,
    pub counterexample: Option<Vector>,
    pub reason: Option<String>,
    pub stats: Stats,
}

impl Verdict {
    fn new(answer: Answer, stats: Stats) -> Self {
        Verdict {
            answer,
            witness: None,
            counterexample: None,
            reason: None,
            stats,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    Reach {
        src: Configuration,
        dst: Configuration,
    },
    Cover {
        src: Configuration,
        dst: Configuration,
    },
    /// `reach(m, src) ⊆ reach(other, other_src)`
    Incl {
        src: Configuration,
        other: Machine,
        other_src: Configuration,
    },
}

impl Query {
    pub fn kind(&self) -> &'static str {
        match self {
            Query::Reach { .. } => "reach",
            Query::Cover { .. } => "cover",
            Query::Incl { .. } => "incl",
        }
    }
}

/// The sentence handed to the solver for `q`: existential for reach and
/// cover, `Π₂` for inclusion.
pub fn encode(m: &Machine, q: &Query) -> Result<Formula, BackendError> {
    match q {
        Query::Reach { src, dst } | Query::Cover { src, dst } => {
            let mode = if matches!(q, Query::Reach { .. }) {
                Mode::Reach
            } else {
                Mode::Cover
            };
            let nf = to_normal_form(m)?;
            Ok(encode_query(&nf.machine, src, dst, mode)?)
        }
        Query::Incl {
            src,
            other,
            other_src,
        } => {
            let a = to_normal_form(m)?;
            let b = to_normal_form(other)?;
            Ok(encode_inclusion(&a.machine, src, &b.machine, other_src)?)
        }
    }
}

fn run_solver(
    f: &Formula,
    config: &SolverConfig,
    stats: &mut Stats,
) -> Result<SolverResult, BackendError> {
    if stats.solver_calls == 0 {
        stats.formula_size = f.size(SizeConvention::Unary);
    }
    let r = invoke(&to_smtlib2(f), config)?;
    stats.solver_calls += 1;
    stats.solver_ms += r.elapsed.as_millis() as u64;
    Ok(r)
}

pub fn decide(m: &Machine, q: &Query, config: &SolverConfig) -> Result<Verdict, BackendError> {
    match q {
        Query::Reach { src, dst } => decide_run(m, src, dst, Mode::Reach, config),
        Query::Cover { src, dst } => decide_run(m, src, dst, Mode::Cover, config),
        Query::Incl {
            src,
            other,
            other_src,
        } => decide_inclusion(m, src, other, other_src, config),
    }
}

fn reaches(end: &Configuration, dst: &Configuration, mode: Mode) -> bool {
    end.state == dst.state
        && match mode {
            Mode::Reach => end.counters == dst.counters,
            Mode::Cover => end.counters.dominates(&dst.counters),
        }
}

fn decide_run(
    m: &Machine,
    src: &Configuration,
    dst: &Configuration,
    mode: Mode,
    config: &SolverConfig,
) -> Result<Verdict, BackendError> {
    let nf = to_normal_form(m)?;
    for c in [src, dst] {
        if c.state.0 as usize == 0 || c.state.0 as usize > m.num_states() {
            return Err(ModelError::InvalidRun(format!("no state #{}", c.state.0)).into());
        }
    }
    let f = encode_query(&nf.machine, src, dst, mode)?;
    let mut stats = Stats::default();
    let r = run_solver(&f, config, &mut stats)?;
    match r.status {
        Status::Unsat => Ok(Verdict::new(Answer::No, stats)),
        Status::Unknown => {
            let mut v = Verdict::new(Answer::Unknown, stats);
            v.reason = Some(r.diagnostics);
            Ok(v)
        }
        Status::Sat => {
            let mut model = r
                .model
                .ok_or_else(|| BackendError::Solver("sat without a model".into()))?;
            model.extend(fixed_dummies(&nf.machine));
            let w = FlowWitness::from_model(&model, &nf.machine)?;
            let gate = |e: BackendError| BackendError::Unsound(format!("witness rejected: {e}"));
            let run = flows_to_run(&nf.machine, src, &w).map_err(gate)?;
            let lifted = nf.lift_run(m, &run).map_err(|e| gate(e.into()))?;
            lifted.validate(m).map_err(|e| gate(e.into()))?;
            if !reaches(lifted.end(), dst, mode) {
                return Err(gate(BackendError::Witness(format!(
                    "run ends at {}, query asks for {}",
                    m.show(lifted.end()),
                    m.show(dst)
                ))));
            }
            let mut v = Verdict::new(Answer::Yes, stats);
            v.witness = Some(lifted);
            Ok(v)
        }
    }
}

fn decide_inclusion(
    a: &Machine,
    src_a: &Configuration,
    b: &Machine,
    src_b: &Configuration,
    config: &SolverConfig,
) -> Result<Verdict, BackendError> {
    let na = to_normal_form(a)?;
    let nb = to_normal_form(b)?;
    let mut stats = Stats::default();
    let valid = encode_inclusion(&na.machine, src_a, &nb.machine, src_b)?;
    let r = run_solver(&valid, config, &mut stats)?;
    match r.status {
        Status::Sat => return Ok(Verdict::new(Answer::Yes, stats)),
        Status::Unknown => {
            let mut v = Verdict::new(Answer::Unknown, stats);
            v.reason = Some(r.diagnostics);
            return Ok(v);
        }
        Status::Unsat => {}
    }
    let mut verdict = Verdict::new(Answer::No, stats);
    let refute = encode_inclusion_refutation(&na.machine, src_a, &nb.machine, src_b)?;
    let r = run_solver(&refute, config, &mut verdict.stats)?;
    let model = match (r.status, r.model) {
        (Status::Sat, Some(model)) => model,
        (status, _) => {
            verdict.reason = Some(format!(
                "no counterexample extracted (refutation query: {status:?})"
            ));
            return Ok(verdict);
        }
    };
    let x: Vec<i64> = (1..=a.dim())
        .map(|i| model.get(&incl_var(i).name).copied().unwrap_or(0))
        .collect();
    let x = Vector::from(x);
    let in_b = run_solver(
        &encode_membership(&nb.machine, src_b, &x)?,
        config,
        &mut verdict.stats,
    )?;
    let in_a = run_solver(
        &encode_membership(&na.machine, src_a, &x)?,
        config,
        &mut verdict.stats,
    )?;
    match (in_a.status, in_b.status) {
        (Status::Sat, Status::Unsat) => verdict.counterexample = Some(x),
        (Status::Unsat, _) | (_, Status::Sat) => {
            return Err(BackendError::Unsound(format!(
                "refuting vector {x} failed its membership checks"
            )));
        }
        _ => verdict.reason = Some(format!("candidate {x} could not be confirmed")),
    }
    Ok(verdict)
}

/// Truth of a closed sentence, asked of the solver directly.
pub fn check_sentence(f: &Formula, config: &SolverConfig) -> Result<Answer, BackendError> {
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(BackendError::Solver(format!(
            "sentence has free variable `{}`",
            v.name
        )));
    }
    Ok(match invoke(&to_smtlib2(f), config)?.status {
        Status::Sat => Answer::Yes,
        Status::Unsat => Answer::No,
        Status::Unknown => Answer::Unknown,
    })
}

/// Convenience: decide with a fresh configuration and an optional timeout.
pub fn decide_with_timeout(
    m: &Machine,
    q: &Query,
    timeout: Option<Duration>,
) -> Result<Verdict, BackendError> {
    decide(m, q, &SolverConfig::from_env().with_timeout(timeout))
}

#[cfg(test)]
mod tests;
