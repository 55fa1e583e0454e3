//! `zvass`: reachability, coverability and inclusion checks for integer
//! VASS with resets.
//!
//! Exit codes: 0 yes, 1 no, 2 unknown, 10 usage, 11 bad input, 12 solver or
//! internal failure.

mod generate;
mod query;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use zvass_core::backend::{
    decide, encode, to_smtlib2, BackendError, Query, SolverConfig, DEFAULT_SOLVER,
};
use zvass_core::encode::{psi_gpi, to_normal_form, Mode, Nfa};
use zvass_core::model::{parse_configuration, parse_word, ModelError};
use zvass_core::oracle::{bfs, incl_counterexample_bounded};
use zvass_core::pa::SizeConvention;

use query::{load_machine, Kind, QueryFile};
use report::{
    config_json, exit_code, recheck, run_json, verdict_json, verdict_text, Format, SCHEMA,
};

#[derive(Parser, Debug)]
#[command(
    name = "zvass",
    version,
    about = "Decide reachability, coverability and inclusion for integer VASS with resets"
)]
struct Cli {
    /// SMT solver command reading SMT-LIB2 on stdin
    #[arg(long, global = true, env = "ZVASS_SOLVER", default_value = DEFAULT_SOLVER)]
    solver_cmd: String,
    /// second solver raced against the first on quantified sentences
    #[arg(long, global = true, env = "ZVASS_QSOLVER")]
    qsolver_cmd: Option<String>,
    /// per solver call
    #[arg(long, global = true)]
    timeout_ms: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[arg(value_enum)]
    kind: Option<Kind>,
    machine: Option<PathBuf>,
    /// source configuration `state:c1,..,cd`
    #[arg(long)]
    from: Option<String>,
    /// target configuration (reach, cover)
    #[arg(long)]
    to: Option<String>,
    /// the right-hand machine (incl)
    #[arg(long)]
    other: Option<PathBuf>,
    /// source configuration in the right-hand machine (incl)
    #[arg(long)]
    other_from: Option<String>,
}

impl QueryArgs {
    fn to_file(&self) -> Result<QueryFile> {
        let (Some(kind), Some(machine), Some(from)) = (self.kind, &self.machine, &self.from) else {
            return Err(usage("expected <KIND> <MACHINE> --from <CONFIG>"));
        };
        Ok(QueryFile {
            kind,
            machine: machine.clone(),
            from: from.clone(),
            to: self.to.clone(),
            other: self.other.clone(),
            other_from: self.other_from.clone(),
            options: Default::default(),
        })
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Decide a query with the SMT backend
    Check {
        #[command(flatten)]
        query: QueryArgs,
        /// query files to run instead, concurrently; output keeps input order
        #[arg(long, num_args = 1.., conflicts_with_all = ["kind", "machine"])]
        batch: Vec<PathBuf>,
        /// worker threads for --batch
        #[arg(long, default_value_t = 4)]
        jobs: usize,
    },
    /// Print the SMT-LIB2 script for a query
    EmitSmt {
        #[command(flatten)]
        query: QueryArgs,
    },
    /// Read a word from a configuration
    Simulate {
        machine: PathBuf,
        #[arg(long)]
        from: String,
        /// letter names; nothing for the empty word
        word: Vec<String>,
    },
    /// Bounded breadth-first search
    Oracle {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        /// bound for the right-hand machine (incl); defaults to twice --max-len
        #[arg(long)]
        max_len_other: Option<usize>,
    },
    /// Write a generated instance with its ground truth
    Gen(generate::GenArgs),
    /// Formula statistics
    Stats {
        #[command(subcommand)]
        what: StatsCmd,
    },
}

#[derive(Subcommand, Debug)]
enum StatsCmd {
    /// Unary size of the Parikh-image formula as the reset alphabet grows
    PsiSize {
        machine: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_k: usize,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(msg: &str) -> anyhow::Error {
    anyhow::Error::new(Failure {
        code: 10,
        error: anyhow!("{msg}"),
    })
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl std::error::Error for Failure {}

/// Solver trouble and rejected witnesses are 12, everything else about the
/// input is 11.
fn code_of(e: &anyhow::Error) -> u8 {
    if let Some(f) = e.downcast_ref::<Failure>() {
        return f.code;
    }
    for cause in e.chain() {
        if let Some(b) = cause.downcast_ref::<BackendError>() {
            return match b {
                BackendError::Solver(_)
                | BackendError::Parse { .. }
                | BackendError::Witness(_)
                | BackendError::Unsound(_) => 12,
                _ => 11,
            };
        }
        if cause.downcast_ref::<ModelError>().is_some() {
            return 11;
        }
    }
    11
}

fn solver_config(cli: &Cli) -> SolverConfig {
    SolverConfig::new(&cli.solver_cmd, cli.timeout_ms.map(Duration::from_millis))
        .with_quantified(cli.qsolver_cmd.as_deref())
}

fn print_json(v: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string(v).expect("json values serialize")
    );
}

fn check_one(cli: &Cli, q: &QueryFile, base: &Path) -> Result<(u8, String)> {
    let loaded = q.load(base)?;
    let mut cfg = solver_config(cli);
    if let Some(ms) = loaded.options.timeout_ms {
        cfg = cfg.with_timeout(Some(Duration::from_millis(ms)));
    }
    let v = decide(&loaded.machine, &loaded.query, &cfg)?;
    recheck(&loaded.machine, &loaded.query, &v).context("witness failed re-simulation")?;
    let text = match cli.format {
        Format::Text => verdict_text(&loaded.machine, &v),
        Format::Json => serde_json::to_string(&verdict_json(&loaded.machine, &loaded.query, &v))?,
    };
    Ok((exit_code(v.answer), text))
}

fn check_batch(cli: &Cli, files: &[PathBuf], jobs: usize) -> Result<u8> {
    let next = AtomicUsize::new(0);
    let mut results: Vec<Option<Result<(u8, String)>>> = (0..files.len()).map(|_| None).collect();
    let slots: Vec<std::sync::Mutex<&mut Option<_>>> =
        results.iter_mut().map(std::sync::Mutex::new).collect();
    std::thread::scope(|s| {
        for _ in 0..jobs.max(1).min(files.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = files.get(i) else { break };
                let base = path.parent().unwrap_or(Path::new("."));
                let r = QueryFile::read(path).and_then(|q| check_one(cli, &q, base));
                **slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    drop(slots);
    let mut worst = 0;
    for (path, r) in files.iter().zip(results) {
        let r = r.expect("every query ran");
        let code = match &r {
            Ok((c, _)) => *c,
            Err(e) => code_of(e),
        };
        worst = worst.max(code);
        match (cli.format, r) {
            (Format::Text, Ok((_, text))) => println!("== {}\n{text}", path.display()),
            (Format::Text, Err(e)) => println!("== {}\nerror: {e:#}", path.display()),
            (Format::Json, Ok((_, text))) => {
                let mut v: serde_json::Value = serde_json::from_str(&text)?;
                v["input"] = json!(path.display().to_string());
                print_json(&v);
            }
            (Format::Json, Err(e)) => print_json(&json!({
                "schema": SCHEMA,
                "input": path.display().to_string(),
                "error": format!("{e:#}"),
                "code": code,
            })),
        }
    }
    Ok(worst)
}

fn oracle(cli: &Cli, q: &QueryFile, max_len: usize, max_len_other: Option<usize>) -> Result<u8> {
    let loaded = q.load(Path::new("."))?;
    let m = &loaded.machine;
    let (found, explored, detail) = match &loaded.query {
        Query::Reach { src, dst } | Query::Cover { src, dst } => {
            let mode = if q.kind == Kind::Reach {
                Mode::Reach
            } else {
                Mode::Cover
            };
            let r = bfs(m, src, dst, mode, max_len)?;
            let detail = match cli.format {
                Format::Text => r
                    .found
                    .as_ref()
                    .map(|run| run.render(m))
                    .into_iter()
                    .collect(),
                Format::Json => vec![],
            };
            let json_run = r.found.as_ref().map(|run| run_json(m, run));
            (r.found.is_some(), r.explored, (detail, json_run, None))
        }
        Query::Incl {
            src,
            other,
            other_src,
        } => {
            let other_len = max_len_other.unwrap_or(2 * max_len);
            let r = incl_counterexample_bounded(m, src, other, other_src, max_len, other_len)?;
            let text = r
                .found
                .as_ref()
                .map(|x| format!("candidate counterexample {x} (not reached by the other machine within {other_len} steps)"))
                .into_iter()
                .collect();
            let x = r.found.as_ref().map(|x| x.0.clone());
            (r.found.is_some(), r.explored, (text, None, x))
        }
    };
    let (text, run, candidate) = detail;
    match cli.format {
        Format::Text => {
            println!(
                "{}",
                if found {
                    "found"
                } else {
                    "nothing within the bound"
                }
            );
            for line in text {
                println!("{line}");
            }
            println!("explored {explored} configurations, max length {max_len}");
        }
        Format::Json => print_json(&json!({
            "schema": SCHEMA,
            "query": q.kind,
            "found": found,
            "run": run,
            "candidate": candidate,
            "explored": explored,
            "max_len": max_len,
        })),
    }
    Ok(if found { 0 } else { 2 })
}

fn simulate(cli: &Cli, path: &Path, from: &str, word: &[String]) -> Result<u8> {
    let m = load_machine(path)?;
    let src = parse_configuration(&m, from)?;
    let w = parse_word(&m, &word.join(" "))?;
    let ends = m.run(&src, &w)?;
    match cli.format {
        Format::Text => {
            if ends.is_empty() {
                println!("the word cannot be read");
            }
            for c in &ends {
                println!("{}", m.show(c));
            }
        }
        Format::Json => print_json(&json!({
            "schema": SCHEMA,
            "configurations": ends.iter().map(|c| config_json(&m, c)).collect::<Vec<_>>(),
        })),
    }
    Ok(if ends.is_empty() { 1 } else { 0 })
}

fn psi_size(cli: &Cli, path: &Path, max_k: usize) -> Result<u8> {
    let m = load_machine(path)?;
    let nf = to_normal_form(&m)?;
    let base = Nfa::from_machine(&nf.machine, 1, (1..=nf.machine.num_states()).collect());
    let size_b = base.states + base.transitions.len();
    let mut rows = Vec::new();
    for k in base.monitored.max(1)..=max_k.max(base.monitored) {
        let nfa = Nfa {
            monitored: k,
            ..base.clone()
        };
        let f = psi_gpi(&nfa);
        rows.push((
            k,
            f.size(SizeConvention::Nodes),
            f.size(SizeConvention::Unary),
        ));
    }
    match cli.format {
        Format::Text => {
            println!("|B| = {size_b}");
            println!(
                "{:>3} {:>10} {:>10} {:>12}",
                "k", "nodes", "unary", "unary/k²|B|"
            );
            for (k, nodes, unary) in &rows {
                let ratio = *unary as f64 / (k * k * size_b) as f64;
                println!("{k:>3} {nodes:>10} {unary:>10} {ratio:>12.2}");
            }
        }
        Format::Json => print_json(&json!({
            "schema": SCHEMA,
            "size_b": size_b,
            "rows": rows.iter().map(|(k, n, u)| json!({"k": k, "nodes": n, "unary": u})).collect::<Vec<_>>(),
        })),
    }
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Cmd::Check { query, batch, jobs } => {
            if !batch.is_empty() {
                return check_batch(cli, batch, *jobs);
            }
            let (code, text) = check_one(cli, &query.to_file()?, Path::new("."))?;
            println!("{text}");
            Ok(code)
        }
        Cmd::EmitSmt { query } => {
            let loaded = query.to_file()?.load(Path::new("."))?;
            print!("{}", to_smtlib2(&encode(&loaded.machine, &loaded.query)?));
            Ok(0)
        }
        Cmd::Simulate {
            machine,
            from,
            word,
        } => simulate(cli, machine, from, word),
        Cmd::Oracle {
            query,
            max_len,
            max_len_other,
        } => oracle(cli, &query.to_file()?, *max_len, *max_len_other),
        Cmd::Gen(args) => {
            let files = generate::run(args, &solver_config(cli))?;
            match cli.format {
                Format::Text => files.iter().for_each(|f| println!("{}", f.display())),
                Format::Json => print_json(&json!({
                    "schema": SCHEMA,
                    "files": files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
                })),
            }
            Ok(0)
        }
        Cmd::Stats {
            what: StatsCmd::PsiSize { machine, max_k },
        } => psi_size(cli, machine, *max_k),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 10 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code_of(&e))
        }
    }
}
