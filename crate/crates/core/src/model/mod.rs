//! Machines, configurations and their operational semantics.
//!
//! States are numbered `1..=m`, plain letters `1..=n` and monitored letters
//! `n+1..=n+k`. For the reset class the monitored letters are the implicit
//! `r1..rd`, where `ri` resets counter `i`.

mod format;
mod normalize;

pub use format::{parse_configuration, parse_machine, write_machine};
pub use normalize::{normalize, NormalForm, TransitionOrigin};

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("reset coordinate {coord} outside 1..={dim}")]
    ResetOutOfRange { coord: usize, dim: usize },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("class violation: {0}")]
    ClassViolation(String),
    #[error("invalid run: {0}")]
    InvalidRun(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// An integer vector. Coordinates are addressed 1-based in the public API.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(pub Vec<i64>);

impl Vector {
    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0; dim])
    }

    /// The unit vector `e_i` (1-based).
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i - 1] = 1;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize) -> i64 {
        self.0[i - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn checked_add(&self, other: &Vector) -> Result<Vector, ModelError> {
        self.expect_dim(other.dim())?;
        Ok(Vector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn neg(&self) -> Vector {
        Vector(self.0.iter().map(|x| -x).collect())
    }

    /// `self|S`: the coordinates in `coords` (1-based) set to zero.
    pub fn reset(&self, coords: impl IntoIterator<Item = usize>) -> Vector {
        let mut out = self.clone();
        for i in coords {
            out.0[i - 1] = 0;
        }
        out
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &Vector) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// `(self, other)` as one vector.
    pub fn concat(&self, other: &Vector) -> Vector {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Vector(v)
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    fn expect_dim(&self, dim: usize) -> Result<(), ModelError> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(ModelError::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            })
        }
    }
}

impl From<Vec<i64>> for Vector {
    fn from(v: Vec<i64>) -> Self {
        Vector(v)
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// The effect of a letter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transform {
    /// `v ↦ v + b`
    Add(Vector),
    /// `v ↦ v|i` (1-based coordinate)
    Reset(usize),
    /// `v ↦ Av + b`, `A` stored row-major
    Affine {
        matrix: Vec<Vec<i64>>,
        offset: Vector,
    },
}

impl Transform {
    pub fn apply(&self, v: &Vector) -> Result<Vector, ModelError> {
        match self {
            Transform::Add(b) => v.checked_add(b),
            Transform::Reset(i) => {
                if *i == 0 || *i > v.dim() {
                    return Err(ModelError::ResetOutOfRange {
                        coord: *i,
                        dim: v.dim(),
                    });
                }
                Ok(v.reset([*i]))
            }
            Transform::Affine { matrix, offset } => {
                let d = v.dim();
                if matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
                    return Err(ModelError::DimensionMismatch {
                        expected: d,
                        found: matrix.len(),
                    });
                }
                offset.expect_dim(d)?;
                let out = matrix
                    .iter()
                    .zip(&offset.0)
                    .map(|(row, b)| row.iter().zip(&v.0).map(|(a, x)| a * x).sum::<i64>() + b)
                    .collect();
                Ok(Vector(out))
            }
        }
    }

    /// Checks the transform against a dimension without applying it.
    pub fn check_dim(&self, dim: usize) -> Result<(), ModelError> {
        match self {
            Transform::Add(b) => b.expect_dim(dim),
            Transform::Reset(i) if *i == 0 || *i > dim => {
                Err(ModelError::ResetOutOfRange { coord: *i, dim })
            }
            Transform::Reset(_) => Ok(()),
            Transform::Affine { matrix, offset } => {
                if matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) {
                    return Err(ModelError::DimensionMismatch {
                        expected: dim,
                        found: matrix.len(),
                    });
                }
                offset.expect_dim(dim)
            }
        }
    }

    /// Decomposes a reset-class transform `diag(λ)·v + b` into the reset
    /// coordinates (those with `λ_i = 0`) and the offset `b`.
    /// Returns `None` for transforms outside the class.
    pub fn as_resets_then_add(&self, dim: usize) -> Option<(Vec<usize>, Vector)> {
        match self {
            Transform::Add(b) => Some((Vec::new(), b.clone())),
            Transform::Reset(i) => Some((vec![*i], Vector::zeros(dim))),
            Transform::Affine { matrix, offset } => {
                let mut resets = Vec::new();
                for (i, row) in matrix.iter().enumerate() {
                    for (j, &a) in row.iter().enumerate() {
                        let ok = if i == j { a == 0 || a == 1 } else { a == 0 };
                        if !ok {
                            return None;
                        }
                    }
                    if row[i] == 0 {
                        resets.push(i + 1);
                    }
                }
                Some((resets, offset.clone()))
            }
        }
    }

    pub fn is_add(&self) -> bool {
        matches!(self, Transform::Add(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MachineClass {
    /// integer register machine with arbitrary affine maps
    Zrm,
    /// integer VASS with resets
    Zvassr,
    /// integer VASS
    Zvass,
    /// integer VAS (one state)
    Zvas,
}

impl MachineClass {
    pub fn keyword(self) -> &'static str {
        match self {
            MachineClass::Zrm => "zrm",
            MachineClass::Zvassr => "zvassr",
            MachineClass::Zvass => "zvass",
            MachineClass::Zvas => "zvas",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "zrm" => MachineClass::Zrm,
            "zvassr" => MachineClass::Zvassr,
            "zvass" => MachineClass::Zvass,
            "zvas" => MachineClass::Zvas,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LetterId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterDef {
    pub name: String,
    pub effect: Transform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: StateId,
    pub letter: LetterId,
    pub to: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Machine {
    name: String,
    class: MachineClass,
    dim: usize,
    states: Vec<String>,
    /// plain letters followed by monitored letters
    letters: Vec<LetterDef>,
    plain: usize,
    transitions: Vec<Transition>,
}

impl Machine {
    pub fn builder(name: impl Into<String>, class: MachineClass, dim: usize) -> MachineBuilder {
        MachineBuilder {
            name: name.into(),
            class,
            dim,
            states: Vec::new(),
            letters: Vec::new(),
            named: Vec::new(),
            transitions: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn class(&self) -> MachineClass {
        self.class
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (1..=self.states.len() as u32).map(StateId)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.0 as usize - 1]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u32 + 1))
    }

    /// `n`, the number of plain letters.
    pub fn num_plain(&self) -> usize {
        self.plain
    }

    /// `k`, the number of monitored letters.
    pub fn num_monitored(&self) -> usize {
        self.letters.len() - self.plain
    }

    pub fn letters(&self) -> impl Iterator<Item = LetterId> + '_ {
        (1..=self.letters.len() as u32).map(LetterId)
    }

    pub fn letter(&self, a: LetterId) -> &LetterDef {
        &self.letters[a.0 as usize - 1]
    }

    pub fn letter_by_name(&self, name: &str) -> Option<LetterId> {
        self.letters
            .iter()
            .position(|l| l.name == name)
            .map(|i| LetterId(i as u32 + 1))
    }

    pub fn effect(&self, a: LetterId) -> &Transform {
        &self.letter(a).effect
    }

    pub fn is_monitored(&self, a: LetterId) -> bool {
        a.0 as usize > self.plain
    }

    /// The monitored letter `r_i` (1-based counter index) of a reset-class machine.
    pub fn reset_letter(&self, i: usize) -> LetterId {
        debug_assert_eq!(self.class, MachineClass::Zvassr);
        LetterId((self.plain + i) as u32)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Normal form: every plain letter is a pure addition and the monitored
    /// letters are exactly `r1..rd`.
    pub fn is_normal_form(&self) -> bool {
        self.class == MachineClass::Zvassr
            && self.letters[..self.plain].iter().all(|l| l.effect.is_add())
    }

    /// True when some letter is not expressible as resets plus an addition.
    pub fn has_general_affine(&self) -> bool {
        self.letters
            .iter()
            .any(|l| l.effect.as_resets_then_add(self.dim).is_none())
    }

    /// Views a VASS or VAS as a reset machine (adds the implicit `r1..rd`; plain
    /// letters with those names get a `'` suffix).
    pub fn to_zvassr(&self) -> Result<Machine, ModelError> {
        match self.class {
            MachineClass::Zvassr => Ok(self.clone()),
            MachineClass::Zvass | MachineClass::Zvas => {
                let mut b = Machine::builder(self.name.clone(), MachineClass::Zvassr, self.dim);
                for s in &self.states {
                    b = b.state(s.clone());
                }
                let taken: Vec<&str> = self.letters.iter().map(|l| l.name.as_str()).collect();
                for l in &self.letters[..self.plain] {
                    let mut name = l.name.clone();
                    while monitored_index(&name).is_some_and(|j| j <= self.dim)
                        || (name != l.name && taken.contains(&name.as_str()))
                    {
                        name.push('\'');
                    }
                    b = b.letter(name, l.effect.clone());
                }
                b.transitions = self.transitions.clone();
                b.build()
            }
            MachineClass::Zrm => Err(ModelError::ClassViolation(
                "register machines with general affine maps cannot be viewed as reset machines"
                    .into(),
            )),
        }
    }

    /// Renders a configuration as `state:c1,..,cd`.
    pub fn show(&self, c: &Configuration) -> String {
        format!("{}:{}", self.state_name(c.state), c.counters)
    }

    /// All successors of `c` reading `letter`.
    pub fn step(
        &self,
        c: &Configuration,
        letter: LetterId,
    ) -> Result<Vec<Configuration>, ModelError> {
        let mut out = Vec::new();
        for t in self
            .transitions
            .iter()
            .filter(|t| t.from == c.state && t.letter == letter)
        {
            let counters = self.effect(letter).apply(&c.counters)?;
            out.push(Configuration {
                state: t.to,
                counters,
            });
        }
        Ok(out)
    }

    /// All configurations reachable from `c` by reading `word`.
    pub fn run(
        &self,
        c: &Configuration,
        word: &[LetterId],
    ) -> Result<BTreeSet<Configuration>, ModelError> {
        let mut current = BTreeSet::from([c.clone()]);
        for &a in word {
            let mut next = BTreeSet::new();
            for cfg in &current {
                next.extend(self.step(cfg, a)?);
            }
            current = next;
        }
        Ok(current)
    }

    /// Successors along every transition leaving `c`, in transition order.
    pub fn successors(&self, c: &Configuration) -> Result<Vec<(usize, Configuration)>, ModelError> {
        let mut out = Vec::new();
        for (idx, t) in self
            .transitions
            .iter()
            .enumerate()
            .filter(|(_, t)| t.from == c.state)
        {
            let counters = self.effect(t.letter).apply(&c.counters)?;
            out.push((
                idx,
                Configuration {
                    state: t.to,
                    counters,
                },
            ));
        }
        Ok(out)
    }

    /// `τ(word)(v)`: the letters' effects folded over `v`, ignoring states.
    pub fn word_effect(&self, word: &[LetterId], v: &Vector) -> Result<Vector, ModelError> {
        word.iter()
            .try_fold(v.clone(), |acc, &a| self.effect(a).apply(&acc))
    }

    /// Replays a sequence of transition indices from `start`.
    pub fn replay(&self, start: &Configuration, path: &[usize]) -> Result<Run, ModelError> {
        let mut cur = start.clone();
        let mut steps = Vec::with_capacity(path.len());
        for &idx in path {
            let t = self
                .transitions
                .get(idx)
                .ok_or_else(|| ModelError::InvalidRun(format!("no transition #{idx}")))?;
            if t.from != cur.state {
                return Err(ModelError::InvalidRun(format!(
                    "transition #{idx} leaves {} but the run is in {}",
                    self.state_name(t.from),
                    self.state_name(cur.state)
                )));
            }
            cur = Configuration {
                state: t.to,
                counters: self.effect(t.letter).apply(&cur.counters)?,
            };
            steps.push(RunStep {
                transition: idx,
                config: cur.clone(),
            });
        }
        Ok(Run {
            start: start.clone(),
            steps,
        })
    }
}

pub struct MachineBuilder {
    name: String,
    class: MachineClass,
    dim: usize,
    states: Vec<String>,
    letters: Vec<LetterDef>,
    named: Vec<(String, String, String)>,
    transitions: Vec<Transition>,
}

impl MachineBuilder {
    pub fn state(mut self, name: impl Into<String>) -> Self {
        self.states.push(name.into());
        self
    }

    pub fn states<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.states.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn letter(mut self, name: impl Into<String>, effect: Transform) -> Self {
        self.letters.push(LetterDef {
            name: name.into(),
            effect,
        });
        self
    }

    /// Adds a transition by state and letter names; names are resolved by
    /// [`MachineBuilder::build`].
    pub fn transition(mut self, from: &str, letter: &str, to: &str) -> Self {
        self.named
            .push((from.to_string(), letter.to_string(), to.to_string()));
        self
    }

    pub fn has_state(&self, name: &str) -> bool {
        self.states.iter().any(|s| s == name)
    }

    pub fn transition_ids(mut self, from: StateId, letter: LetterId, to: StateId) -> Self {
        self.transitions.push(Transition { from, letter, to });
        self
    }

    pub fn build(self) -> Result<Machine, ModelError> {
        let MachineBuilder {
            name,
            class,
            dim,
            states,
            mut letters,
            named,
            mut transitions,
        } = self;
        if dim == 0 {
            return Err(ModelError::ClassViolation(
                "dimension must be positive".into(),
            ));
        }
        if states.is_empty() {
            return Err(ModelError::ClassViolation("machine has no states".into()));
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(ModelError::Duplicate {
                    kind: "state",
                    name: s.clone(),
                });
            }
        }
        let plain = letters.len();
        for (i, l) in letters.iter().enumerate() {
            if letters[..i].iter().any(|o| o.name == l.name) {
                return Err(ModelError::Duplicate {
                    kind: "letter",
                    name: l.name.clone(),
                });
            }
            if class == MachineClass::Zvassr && monitored_index(&l.name).is_some_and(|j| j <= dim) {
                return Err(ModelError::Duplicate {
                    kind: "letter",
                    name: l.name.clone(),
                });
            }
            l.effect.check_dim(dim)?;
            match class {
                MachineClass::Zvass | MachineClass::Zvas if !l.effect.is_add() => {
                    return Err(ModelError::ClassViolation(format!(
                        "letter `{}` is not a pure addition",
                        l.name
                    )))
                }
                MachineClass::Zvassr if l.effect.as_resets_then_add(dim).is_none() => {
                    return Err(ModelError::ClassViolation(format!(
                        "letter `{}` is not a reset/addition map",
                        l.name
                    )))
                }
                _ => {}
            }
        }
        if class == MachineClass::Zvas && states.len() != 1 {
            return Err(ModelError::ClassViolation(
                "a VAS has exactly one state".into(),
            ));
        }
        if class == MachineClass::Zvassr {
            for i in 1..=dim {
                letters.push(LetterDef {
                    name: format!("r{i}"),
                    effect: Transform::Reset(i),
                });
            }
        }
        for (from, letter, to) in named {
            let state = |n: &str| {
                states
                    .iter()
                    .position(|s| s == n)
                    .map(|i| StateId(i as u32 + 1))
                    .ok_or_else(|| ModelError::UnknownState(n.to_string()))
            };
            let letter = letters
                .iter()
                .position(|l| l.name == letter)
                .map(|i| LetterId(i as u32 + 1))
                .ok_or(ModelError::UnknownLetter(letter))?;
            transitions.push(Transition {
                from: state(&from)?,
                letter,
                to: state(&to)?,
            });
        }
        let mut seen = BTreeSet::new();
        for t in &transitions {
            if t.from.0 == 0 || t.from.0 as usize > states.len() {
                return Err(ModelError::UnknownState(format!("#{}", t.from.0)));
            }
            if t.to.0 == 0 || t.to.0 as usize > states.len() {
                return Err(ModelError::UnknownState(format!("#{}", t.to.0)));
            }
            if t.letter.0 == 0 || t.letter.0 as usize > letters.len() {
                return Err(ModelError::UnknownLetter(format!("#{}", t.letter.0)));
            }
            if !seen.insert(*t) {
                let n = format!(
                    "{} {} {}",
                    states[t.from.0 as usize - 1],
                    letters[t.letter.0 as usize - 1].name,
                    states[t.to.0 as usize - 1]
                );
                return Err(ModelError::Duplicate {
                    kind: "transition",
                    name: n,
                });
            }
        }
        Ok(Machine {
            name,
            class,
            dim,
            states,
            letters,
            plain,
            transitions,
        })
    }
}

/// `ri` → `Some(i)`.
fn monitored_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('r')?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration {
    pub state: StateId,
    pub counters: Vector,
}

impl Configuration {
    pub fn new(state: StateId, counters: impl Into<Vector>) -> Self {
        Configuration {
            state,
            counters: counters.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStep {
    /// index into [`Machine::transitions`]
    pub transition: usize,
    pub config: Configuration,
}

/// A run: the start configuration and one step per fired transition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    pub start: Configuration,
    pub steps: Vec<RunStep>,
}

impl Run {
    pub fn empty(start: Configuration) -> Self {
        Run {
            start,
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self) -> &Configuration {
        self.steps.last().map_or(&self.start, |s| &s.config)
    }

    pub fn configurations(&self) -> impl Iterator<Item = &Configuration> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|s| &s.config))
    }

    pub fn transition_path(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.transition).collect()
    }

    pub fn word(&self, m: &Machine) -> Vec<LetterId> {
        self.steps
            .iter()
            .map(|s| m.transitions()[s.transition].letter)
            .collect()
    }

    /// Re-simulates the run and checks every recorded configuration.
    pub fn validate(&self, m: &Machine) -> Result<(), ModelError> {
        if self.start.counters.dim() != m.dim() {
            return Err(ModelError::DimensionMismatch {
                expected: m.dim(),
                found: self.start.counters.dim(),
            });
        }
        let replayed = m.replay(&self.start, &self.transition_path())?;
        for (i, (a, b)) in replayed.steps.iter().zip(&self.steps).enumerate() {
            if a.config != b.config {
                return Err(ModelError::InvalidRun(format!(
                    "step {} records {} but the machine computes {}",
                    i + 1,
                    m.show(&b.config),
                    m.show(&a.config)
                )));
            }
        }
        Ok(())
    }

    pub fn render(&self, m: &Machine) -> String {
        let word: Vec<&str> = self
            .word(m)
            .iter()
            .map(|&a| m.letter(a).name.as_str())
            .collect();
        let configs: Vec<String> = self.configurations().map(|c| m.show(c)).collect();
        format!("{}  [{}]", configs.join(" -> "), word.join(" "))
    }
}

/// Maps letter names to ids; whitespace-separated, `ε`/empty string is the empty word.
pub fn parse_word(m: &Machine, text: &str) -> Result<Vec<LetterId>, ModelError> {
    let index: HashMap<&str, LetterId> = m
        .letters()
        .map(|a| (m.letter(a).name.as_str(), a))
        .collect();
    text.split_whitespace()
        .filter(|t| *t != "ε" && *t != "eps")
        .map(|t| {
            index
                .get(t)
                .copied()
                .ok_or_else(|| ModelError::UnknownLetter(t.to_string()))
        })
        .collect()
}
