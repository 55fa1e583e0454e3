use anyhow::{bail, Result};
use serde::Serialize;
use serde_json::{json, Value};
use zvass_core::backend::{Answer, Query, Verdict};
use zvass_core::model::{Configuration, Machine, Run};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Serialize)]
struct Step<'a> {
    state: &'a str,
    counters: &'a [i64],
}

pub fn config_json(m: &Machine, c: &Configuration) -> Value {
    json!(Step {
        state: m.state_name(c.state),
        counters: &c.counters.0,
    })
}

pub fn run_json(m: &Machine, run: &Run) -> Value {
    Value::Array(run.configurations().map(|c| config_json(m, c)).collect())
}

fn word(m: &Machine, run: &Run) -> Vec<String> {
    run.word(m)
        .iter()
        .map(|&a| m.letter(a).name.clone())
        .collect()
}

/// Replays the witness against the machine and the query before anything
/// is printed.
pub fn recheck(m: &Machine, q: &Query, v: &Verdict) -> Result<()> {
    let Some(run) = &v.witness else {
        return Ok(());
    };
    run.validate(m)?;
    let (src, dst) = match q {
        Query::Reach { src, dst } | Query::Cover { src, dst } => (src, dst),
        Query::Incl { .. } => bail!("inclusion verdict carries a run"),
    };
    let end = run.end();
    let hit = end.state == dst.state
        && match q {
            Query::Reach { .. } => end.counters == dst.counters,
            _ => end.counters.dominates(&dst.counters),
        };
    if run.start != *src || !hit {
        bail!("witness does not connect the query configurations");
    }
    Ok(())
}

pub fn verdict_json(m: &Machine, q: &Query, v: &Verdict) -> Value {
    json!({
        "schema": SCHEMA,
        "query": q.kind(),
        "answer": v.answer,
        "witness": v.witness.as_ref().map(|r| run_json(m, r)),
        "word": v.witness.as_ref().map(|r| word(m, r)),
        "counterexample": v.counterexample.as_ref().map(|x| &x.0),
        "reason": v.reason,
        "stats": v.stats,
    })
}

pub fn verdict_text(m: &Machine, v: &Verdict) -> String {
    let mut out = v.answer.to_string();
    if let Some(run) = &v.witness {
        out.push_str(&format!("\nrun ({} steps): {}", run.len(), run.render(m)));
    }
    if let Some(x) = &v.counterexample {
        out.push_str(&format!("\ncounterexample: {x}"));
    }
    if let Some(r) = &v.reason {
        out.push_str(&format!("\nreason: {r}"));
    }
    let s = &v.stats;
    out.push_str(&format!(
        "\nformula size {}, {} solver call{}, {} ms",
        s.formula_size,
        s.solver_calls,
        if s.solver_calls == 1 { "" } else { "s" },
        s.solver_ms
    ));
    out
}

pub fn exit_code(a: Answer) -> u8 {
    match a {
        Answer::Yes => 0,
        Answer::No => 1,
        Answer::Unknown => 2,
    }
}
