//! `gen <kind>`: writes `<name>.zvass` (or `<name>.A.zvass` and
//! `<name>.B.zvass`), a `<name>.query` sidecar and a `<name>.truth` note.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rand::rngs::StdRng;
use rand::SeedableRng;
use zvass_core::backend::{check_sentence, Answer, SolverConfig};
use zvass_core::encode::Mode;
use zvass_core::gen::{
    diophantine_to_zvas, pcp_to_affine_rm, pcp_word, pi2pa_to_inclusion, qslde_to_zvas_inclusion,
    qsos2_to_qslde, random_linear_system, random_pi2, random_qsos2, random_zvassr, Encoding,
    InclusionInstance, PcpInstance, ReachInstance,
};
use zvass_core::model::{write_machine, Configuration, Machine, StateId, Vector};
use zvass_core::oracle::{bfs, reach_set_bounded};

use crate::query::{Kind, Options, QueryFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum GenKind {
    /// random ℤ-VASS with resets; truth from the bounded oracle
    Random,
    /// `Ax = b` as a one-state ℤ-VAS; truth from ILP brute force
    Diophantine,
    /// QSOS₂ through QSLDE to an inclusion pair; truth from subset brute force
    Qsos,
    /// a random ∀∃ formula as an inclusion pair; truth from the solver on the formula
    Pi2,
    /// the PCP machine over affine maps; simulation only
    Pcp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum EncodingArg {
    Binary,
    Unary,
}

#[derive(clap::Args, Debug)]
pub struct GenArgs {
    pub kind: GenKind,
    /// output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// file stem; defaults to the kind
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// QSLDE encoding for `qsos`
    #[arg(long, value_enum, default_value = "binary")]
    pub encoding: EncodingArg,
    /// pairs for `pcp` as `u/v,u/v,...` over {0,1}
    #[arg(long, default_value = "0/100,01/00,110/11")]
    pub pairs: String,
    /// a known solution for `pcp`, as 1-based indices `3,2,3,1`
    #[arg(long, default_value = "3,2,3,1")]
    pub solution: String,
    /// oracle bound for `random`
    #[arg(long, default_value_t = 8)]
    pub max_len: usize,
}

struct Truth {
    expected: Answer,
    method: String,
    source: String,
}

fn show(m: &Machine, c: &Configuration) -> String {
    m.show(c)
}

fn write(path: &Path, text: &str) -> Result<PathBuf> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path.to_path_buf())
}

fn file_name(p: &Path) -> PathBuf {
    PathBuf::from(p.file_name().expect("file path"))
}

fn reach_query(
    dir: &Path,
    stem: &str,
    kind: Kind,
    inst: &ReachInstance,
) -> Result<(Vec<PathBuf>, QueryFile)> {
    let path = write(
        &dir.join(format!("{stem}.zvass")),
        &write_machine(&inst.machine),
    )?;
    let q = QueryFile {
        kind,
        machine: file_name(&path),
        from: show(&inst.machine, &inst.src),
        to: Some(show(&inst.machine, &inst.dst)),
        other: None,
        other_from: None,
        options: Options::default(),
    };
    Ok((vec![path], q))
}

fn incl_query(
    dir: &Path,
    stem: &str,
    inst: &InclusionInstance,
) -> Result<(Vec<PathBuf>, QueryFile)> {
    let a = write(
        &dir.join(format!("{stem}.A.zvass")),
        &write_machine(&inst.a),
    )?;
    let b = write(
        &dir.join(format!("{stem}.B.zvass")),
        &write_machine(&inst.b),
    )?;
    let q = QueryFile {
        kind: Kind::Incl,
        machine: file_name(&a),
        from: show(&inst.a, &inst.src_a),
        to: None,
        other: Some(file_name(&b)),
        other_from: Some(show(&inst.b, &inst.src_b)),
        options: Options::default(),
    };
    Ok((vec![a, b], q))
}

fn yes_no(b: bool) -> Answer {
    if b {
        Answer::Yes
    } else {
        Answer::No
    }
}

fn parse_pairs(text: &str) -> Result<PcpInstance> {
    let pairs = text
        .split(',')
        .map(|p| {
            p.split_once('/')
                .map(|(u, v)| (u.trim().to_string(), v.trim().to_string()))
                .with_context(|| format!("pair `{p}` is not `u/v`"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PcpInstance { pairs })
}

/// Runs the generator; returns the written files, sidecar last.
pub fn run(args: &GenArgs, solver: &SolverConfig) -> Result<Vec<PathBuf>> {
    let mut rng = StdRng::seed_from_u64(args.seed);
    let dir = &args.out;
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let kind_name = format!("{:?}", args.kind).to_lowercase();
    let stem = args.name.clone().unwrap_or(kind_name);

    let (mut files, query, truth) = match args.kind {
        GenKind::Random => {
            let m = random_zvassr(&mut rng, 3, 2, 2);
            let src = Configuration::new(StateId(1), Vector::zeros(m.dim()));
            let reach: Vec<_> = reach_set_bounded(&m, &src, args.max_len / 2)?
                .into_iter()
                .collect();
            let dst = reach[rand::Rng::gen_range(&mut rng, 0..reach.len())].clone();
            let found = bfs(&m, &src, &dst, Mode::Reach, args.max_len)?;
            let inst = ReachInstance {
                machine: m,
                src,
                dst,
            };
            let (files, q) = reach_query(dir, &stem, Kind::Reach, &inst)?;
            let run = found
                .found
                .expect("target taken from the bounded reach set");
            let truth = Truth {
                expected: Answer::Yes,
                method: format!("bounded oracle run of length {}", run.len()),
                source: run.render(&inst.machine),
            };
            (files, q, truth)
        }
        GenKind::Diophantine => {
            let s = random_linear_system(&mut rng, 3, 3, 3);
            let inst = diophantine_to_zvas(&s)?;
            let (files, q) = reach_query(dir, &stem, Kind::Reach, &inst)?;
            let sol = s.brute_force(10);
            let truth = Truth {
                expected: if sol.is_some() {
                    Answer::Yes
                } else {
                    Answer::Unknown
                },
                method: match &sol {
                    Some(x) => format!("ILP brute force, solution x = {x:?}"),
                    None => "ILP brute force found no solution with entries ≤ 10".into(),
                },
                source: format!("A = {:?}, b = {:?}", s.a, s.b),
            };
            (files, q, truth)
        }
        GenKind::Qsos => {
            let inst = random_qsos2(&mut rng, 3, 7);
            let enc = match args.encoding {
                EncodingArg::Binary => Encoding::Binary,
                EncodingArg::Unary => Encoding::Unary,
            };
            let system = qsos2_to_qslde(&inst, enc)?;
            let pair = qslde_to_zvas_inclusion(&system)?;
            let (files, q) = incl_query(dir, &stem, &pair)?;
            let truth = Truth {
                expected: yes_no(inst.brute_force()),
                method: "subset brute force".into(),
                source: format!(
                    "M1 = {:?}, M2 = {:?}, T = {}, {:?} encoding",
                    inst.sets[0], inst.sets[1], inst.target, args.encoding
                ),
            };
            (files, q, truth)
        }
        GenKind::Pi2 => {
            let f = random_pi2(&mut rng, 3, 2);
            let pair = pi2pa_to_inclusion(&f)?;
            let (files, q) = incl_query(dir, &stem, &pair)?;
            let formula = f.to_formula()?;
            let truth = Truth {
                expected: check_sentence(&formula, solver)?,
                method: "solver on the source formula".into(),
                source: formula.to_string(),
            };
            (files, q, truth)
        }
        GenKind::Pcp => {
            let p = parse_pairs(&args.pairs)?;
            let m = pcp_to_affine_rm(&p)?;
            let solution: Vec<usize> = args
                .solution
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .context("solution indices")?;
            let origin = Configuration::new(StateId(1), vec![0, 0]);
            let target = Configuration::new(StateId(2), vec![0, 0]);
            let inst = ReachInstance {
                machine: m,
                src: origin,
                dst: target,
            };
            let (files, q) = reach_query(dir, &stem, Kind::Reach, &inst)?;
            let truth = if p.is_solution(&solution) {
                let (u, _) = p.concat(&solution);
                let value = u.chars().fold(0i64, |acc, c| 2 * acc + i64::from(c == '1'));
                Truth {
                    expected: Answer::Yes,
                    method: format!(
                        "index sequence {solution:?} matches ({u}); simulate `{} …` with {value} separators",
                        pcp_word(&p, &solution, 0)
                    ),
                    source: format!("pairs {}; affine machine, simulation only", args.pairs),
                }
            } else {
                Truth {
                    expected: Answer::Unknown,
                    method: "no solution given; PCP is undecidable in general".into(),
                    source: format!("pairs {}; affine machine, simulation only", args.pairs),
                }
            };
            (files, q, truth)
        }
    };

    let sidecar = write(
        &dir.join(format!("{stem}.query")),
        &toml::to_string(&query).context("serializing the query")?,
    )?;
    let note = format!(
        "expected: {}\nmethod: {}\nsource: {}\nseed: {}\n",
        truth.expected, truth.method, truth.source, args.seed
    );
    files.push(write(&dir.join(format!("{stem}.truth")), &note)?);
    files.push(sidecar);
    Ok(files)
}
