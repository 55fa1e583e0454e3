//! Line-based machine files.
//!
//! ```text
//! machine <name>
//! class zrm|zvassr|zvass|zvas
//! dim <d>
//! states <id> <id> ...
//! letters <name> ...
//! effect <letter> add <d ints>
//! effect <letter> reset <i>
//! effect <letter> affine <d*d ints row-major> ; <d ints>
//! transition <state> <letter> <state>
//! ```

use std::fmt::Write as _;

use super::{Configuration, Machine, MachineClass, ModelError, Transform, Vector};

fn err(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse {
        line,
        message: message.into(),
    }
}

fn ints(line: usize, toks: &[&str]) -> Result<Vec<i64>, ModelError> {
    toks.iter()
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| err(line, format!("expected integer, got `{t}`")))
        })
        .collect()
}

pub fn parse_machine(text: &str) -> Result<Machine, ModelError> {
    let mut name = None;
    let mut class = None;
    let mut dim: Option<usize> = None;
    let mut states: Vec<String> = Vec::new();
    let mut letters: Vec<String> = Vec::new();
    let mut effects: Vec<(usize, String, Transform)> = Vec::new();
    let mut transitions: Vec<(usize, [String; 3])> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "machine" => {
                let [_, n] = toks[..] else {
                    return Err(err(line, "usage: machine <name>"));
                };
                name = Some(n.to_string());
            }
            "class" => {
                let [_, c] = toks[..] else {
                    return Err(err(line, "usage: class <kind>"));
                };
                class = Some(
                    MachineClass::from_keyword(c)
                        .ok_or_else(|| err(line, format!("unknown class `{c}`")))?,
                );
            }
            "dim" => {
                let [_, d] = toks[..] else {
                    return Err(err(line, "usage: dim <d>"));
                };
                let d: usize = d
                    .parse()
                    .map_err(|_| err(line, "dimension must be a number"))?;
                if d == 0 {
                    return Err(err(line, "dimension must be positive"));
                }
                dim = Some(d);
            }
            "states" => states.extend(toks[1..].iter().map(|s| s.to_string())),
            "letters" => letters.extend(toks[1..].iter().map(|s| s.to_string())),
            "effect" => {
                let d = dim.ok_or_else(|| err(line, "`dim` must precede effects"))?;
                if toks.len() < 3 {
                    return Err(err(line, "usage: effect <letter> add|reset|affine ..."));
                }
                let t = match toks[2] {
                    "add" => {
                        let b = ints(line, &toks[3..])?;
                        if b.len() != d {
                            return Err(err(line, format!("add needs {d} integers")));
                        }
                        Transform::Add(Vector(b))
                    }
                    "reset" => {
                        let [i] = toks[3..] else {
                            return Err(err(line, "usage: reset <i>"));
                        };
                        let i: usize = i.parse().map_err(|_| err(line, "bad reset index"))?;
                        if i == 0 || i > d {
                            return Err(err(line, format!("reset index must be in 1..={d}")));
                        }
                        Transform::Reset(i)
                    }
                    "affine" => {
                        let rest = &toks[3..];
                        let semi = rest
                            .iter()
                            .position(|t| *t == ";")
                            .ok_or_else(|| err(line, "affine needs `;` before the offset"))?;
                        let a = ints(line, &rest[..semi])?;
                        let b = ints(line, &rest[semi + 1..])?;
                        if a.len() != d * d || b.len() != d {
                            return Err(err(
                                line,
                                format!("affine needs {} + {d} integers", d * d),
                            ));
                        }
                        Transform::Affine {
                            matrix: a.chunks(d).map(|r| r.to_vec()).collect(),
                            offset: Vector(b),
                        }
                    }
                    other => return Err(err(line, format!("unknown effect kind `{other}`"))),
                };
                effects.push((line, toks[1].to_string(), t));
            }
            "transition" => {
                let [_, p, a, q] = toks[..] else {
                    return Err(err(line, "usage: transition <state> <letter> <state>"));
                };
                transitions.push((line, [p.to_string(), a.to_string(), q.to_string()]));
            }
            other => return Err(err(line, format!("unknown directive `{other}`"))),
        }
    }

    let class = class.ok_or_else(|| err(0, "missing `class`"))?;
    let dim = dim.ok_or_else(|| err(0, "missing `dim`"))?;
    let mut b =
        Machine::builder(name.unwrap_or_else(|| "unnamed".into()), class, dim).states(states);
    for l in &letters {
        let mut found = effects.iter().filter(|(_, n, _)| n == l);
        let (_, _, t) = found
            .next()
            .ok_or_else(|| err(0, format!("letter `{l}` has no effect line")))?;
        if let Some((line, _, _)) = found.next() {
            return Err(err(*line, format!("second effect for letter `{l}`")));
        }
        b = b.letter(l.clone(), t.clone());
    }
    if let Some((line, n, _)) = effects.iter().find(|(_, n, _)| !letters.contains(n)) {
        return Err(err(*line, format!("effect for undeclared letter `{n}`")));
    }
    let monitored = |a: &str| {
        class == MachineClass::Zvassr
            && a.strip_prefix('r')
                .and_then(|i| i.parse::<usize>().ok())
                .is_some_and(|i| (1..=dim).contains(&i) && a == format!("r{i}"))
    };
    for (line, [p, a, q]) in &transitions {
        for s in [p, q] {
            if !b.has_state(s) {
                return Err(err(*line, format!("unknown state `{s}`")));
            }
        }
        if !letters.contains(a) && !monitored(a) {
            return Err(err(*line, format!("unknown letter `{a}`")));
        }
        b = b.transition(p, a, q);
    }
    b.build()
}

/// Parses `state:c1,c2,...,cd` against a machine.
pub fn parse_configuration(m: &Machine, text: &str) -> Result<Configuration, ModelError> {
    let (state, counters) = text
        .rsplit_once(':')
        .ok_or_else(|| err(0, format!("configuration `{text}` is not `state:c1,..,cd`")))?;
    let q = m
        .state_by_name(state)
        .ok_or_else(|| ModelError::UnknownState(state.to_string()))?;
    let toks: Vec<&str> = counters
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect();
    let v = ints(0, &toks)?;
    if v.len() != m.dim() {
        return Err(ModelError::DimensionMismatch {
            expected: m.dim(),
            found: v.len(),
        });
    }
    Ok(Configuration {
        state: q,
        counters: Vector(v),
    })
}

pub fn write_machine(m: &Machine) -> String {
    let mut out = String::new();
    let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
    writeln!(out, "machine {}", m.name()).unwrap();
    writeln!(out, "class {}", m.class().keyword()).unwrap();
    writeln!(out, "dim {}", m.dim()).unwrap();
    let states: Vec<&str> = m.states().map(|q| m.state_name(q)).collect();
    writeln!(out, "states {}", states.join(" ")).unwrap();
    let plain: Vec<_> = m.letters().filter(|&a| !m.is_monitored(a)).collect();
    if !plain.is_empty() {
        let names: Vec<&str> = plain.iter().map(|&a| m.letter(a).name.as_str()).collect();
        writeln!(out, "letters {}", names.join(" ")).unwrap();
    }
    for a in plain {
        let l = m.letter(a);
        match &l.effect {
            Transform::Add(b) => writeln!(out, "effect {} add {}", l.name, join(&b.0)),
            Transform::Reset(i) => writeln!(out, "effect {} reset {i}", l.name),
            Transform::Affine { matrix, offset } => {
                let flat: Vec<i64> = matrix.iter().flatten().copied().collect();
                writeln!(
                    out,
                    "effect {} affine {} ; {}",
                    l.name,
                    join(&flat),
                    join(&offset.0)
                )
            }
        }
        .unwrap();
    }
    for t in m.transitions() {
        writeln!(
            out,
            "transition {} {} {}",
            m.state_name(t.from),
            m.letter(t.letter).name,
            m.state_name(t.to)
        )
        .unwrap();
    }
    out
}
