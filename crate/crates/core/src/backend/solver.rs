use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::pa::Assignment;

use super::sexpr::parse_model;
use super::BackendError;

pub const SOLVER_ENV: &str = "ZVASS_SOLVER";
pub const DEFAULT_SOLVER: &str = "z3 -in";
/// A second solver raced against the main one on scripts with quantifiers.
pub const QUANTIFIED_SOLVER_ENV: &str = "ZVASS_QSOLVER";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverResult {
    pub status: Status,
    pub model: Option<Assignment>,
    pub diagnostics: String,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub command: Vec<String>,
    pub quantified: Option<Vec<String>>,
    pub timeout: Option<Duration>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::from_env()
    }
}

impl SolverConfig {
    pub fn new(command: &str, timeout: Option<Duration>) -> Self {
        SolverConfig {
            command: split(command),
            quantified: None,
            timeout,
        }
    }

    /// `$ZVASS_SOLVER`, falling back to `z3 -in`, and `$ZVASS_QSOLVER`,
    /// without a timeout.
    pub fn from_env() -> Self {
        let var = |name| std::env::var(name).ok().filter(|s| !s.trim().is_empty());
        let cmd = var(SOLVER_ENV);
        SolverConfig::new(cmd.as_deref().unwrap_or(DEFAULT_SOLVER), None)
            .with_quantified(var(QUANTIFIED_SOLVER_ENV).as_deref())
    }

    pub fn with_quantified(mut self, command: Option<&str>) -> Self {
        self.quantified = command.map(split);
        self
    }

    pub fn with_timeout(mut self, timeout: Option<Duration>) -> Self {
        self.timeout = timeout;
        self
    }
}

fn split(command: &str) -> Vec<String> {
    command.split_whitespace().map(String::from).collect()
}

fn is_quantified(script: &str) -> bool {
    script.contains("(forall") || script.contains("(exists")
}

/// Runs the solver on `script` (fed through stdin). Quantified scripts go
/// to both solvers when a second one is configured; the first definite
/// answer wins.
pub fn invoke(script: &str, config: &SolverConfig) -> Result<SolverResult, BackendError> {
    match &config.quantified {
        Some(q) if is_quantified(script) && *q != config.command => {
            race(script, [&config.command, q], config.timeout)
        }
        _ => run(
            script,
            &config.command,
            config.timeout,
            &AtomicBool::new(false),
        ),
    }
}

fn race(
    script: &str,
    commands: [&Vec<String>; 2],
    timeout: Option<Duration>,
) -> Result<SolverResult, BackendError> {
    let cancel = AtomicBool::new(false);
    thread::scope(|s| {
        let (tx, rx) = mpsc::channel();
        for cmd in commands {
            let (tx, cancel) = (tx.clone(), &cancel);
            s.spawn(move || {
                let _ = tx.send(run(script, cmd, timeout, cancel));
            });
        }
        drop(tx);
        let mut first = None;
        for r in rx {
            if matches!(&r, Ok(res) if res.status != Status::Unknown) {
                cancel.store(true, Ordering::Relaxed);
                return r;
            }
            first.get_or_insert(r);
        }
        first.expect("two solvers ran")
    })
}

fn run(
    script: &str,
    command: &[String],
    timeout: Option<Duration>,
    cancel: &AtomicBool,
) -> Result<SolverResult, BackendError> {
    let (prog, args) = command
        .split_first()
        .ok_or_else(|| BackendError::Solver("empty solver command".into()))?;
    let started = Instant::now();
    let mut child = Command::new(prog)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| BackendError::Solver(format!("cannot start `{prog}`: {e}")))?;

    let mut stdin = child.stdin.take().expect("piped");
    let input = script.to_string();
    let writer = thread::spawn(move || {
        let _ = stdin.write_all(input.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("piped");
    let reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let mut stderr = child.stderr.take().expect("piped");
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });

    let mut timed_out = false;
    let mut wait = Duration::from_micros(200);
    let status = loop {
        match child.try_wait() {
            Ok(Some(st)) => break Some(st),
            Ok(None) => {}
            Err(e) => return Err(BackendError::Solver(format!("waiting for solver: {e}"))),
        }
        if cancel.load(Ordering::Relaxed) || timeout.is_some_and(|t| started.elapsed() >= t) {
            let _ = child.kill();
            let _ = child.wait();
            timed_out = true;
            break None;
        }
        thread::sleep(wait);
        wait = (wait * 2).min(Duration::from_millis(20));
    };
    let _ = writer.join();
    let out = reader.join().unwrap_or_default();
    let err = err_reader.join().unwrap_or_default();
    let elapsed = started.elapsed();

    if timed_out {
        let diagnostics = match timeout {
            Some(t) if started.elapsed() >= t => format!("timeout after {} ms", t.as_millis()),
            _ => "cancelled".into(),
        };
        return Ok(SolverResult {
            status: Status::Unknown,
            model: None,
            diagnostics,
            elapsed,
        });
    }
    let mut lines = out.trim_start().splitn(2, '\n');
    let first = lines.next().unwrap_or("").trim();
    let rest = lines.next().unwrap_or("");
    let status_word = match first {
        "sat" => Status::Sat,
        "unsat" => Status::Unsat,
        "unknown" => Status::Unknown,
        _ => {
            let code = status
                .and_then(|s| s.code())
                .map_or("signal".into(), |c| c.to_string());
            return Err(BackendError::Solver(format!(
                "unexpected solver output (exit {code}): {}{}",
                out.trim(),
                if err.trim().is_empty() {
                    String::new()
                } else {
                    format!(" / {}", err.trim())
                }
            )));
        }
    };
    let model = if status_word == Status::Sat && script.contains("(get-model)") {
        Some(parse_model(rest)?)
    } else {
        None
    };
    let diagnostics = if status_word == Status::Unknown {
        format!(
            "solver answered unknown{}",
            if rest.trim().is_empty() {
                String::new()
            } else {
                format!(": {}", rest.trim())
            }
        )
    } else {
        err.trim().to_string()
    };
    Ok(SolverResult {
        status: status_word,
        model,
        diagnostics,
        elapsed,
    })
}
