//! Presburger encodings of generalized Parikh images, counter effects and
//! the reachability, coverability and inclusion questions built on them.
//!
//! Variable names are fixed functions of their role: `sigma{i}`, `p`,
//! `s{i}`/`t{i}` for segment endpoints, `x{i}_{e}` for the flow through
//! transition `e` in segment `i`, `dist{i}_{q}`, `alpha{i}_{a}`,
//! `beta{i}_{j}`, `nu{i}`, `v{i}` and `w{i}`.

mod reduce;

pub use reduce::{reduce, Direction, Reduced};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{Configuration, Machine, ModelError, Transition, Vector};
use crate::pa::{
    and, eq, exists, ge, implies, le, ne, not, or, to_prenex_pi2, Formula, LinExpr, PaError, Var,
};
use crate::parikh::{MonitoredWord, Symbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("machine is not in normal form")]
    NotNormalForm,
    #[error("machine uses general affine maps, which are simulation-only")]
    Affine,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pa(#[from] PaError),
}

pub fn sigma_var(i: usize) -> Var {
    Var::nat(format!("sigma{i}"))
}

pub fn p_var() -> Var {
    Var::nat("p")
}

pub fn s_var(i: usize) -> Var {
    Var::nat(format!("s{i}"))
}

pub fn t_var(i: usize) -> Var {
    Var::nat(format!("t{i}"))
}

/// Flow through transition `e` (0-based index) in segment `i`.
pub fn flow_var(i: usize, e: usize) -> Var {
    Var::nat(format!("x{i}_{}", e + 1))
}

pub fn dist_var(i: usize, q: usize) -> Var {
    Var::nat(format!("dist{i}_{q}"))
}

pub fn alpha_var(i: usize, a: usize) -> Var {
    Var::nat(format!("alpha{i}_{a}"))
}

pub fn beta_var(i: usize, j: usize) -> Var {
    Var::int(format!("beta{i}_{j}"))
}

pub fn nu_var(i: usize) -> Var {
    Var::int(format!("nu{i}"))
}

pub fn v_var(i: usize) -> Var {
    Var::int(format!("v{i}"))
}

pub fn w_var(i: usize) -> Var {
    Var::int(format!("w{i}"))
}

pub fn start_var() -> Var {
    Var::nat("q")
}

pub fn end_var() -> Var {
    Var::nat("qf")
}

/// An automaton over a monitored alphabet: plain letters `1..=n`, monitored
/// letters `n+1..=n+k`, states `1..=m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    pub states: usize,
    pub plain: usize,
    pub monitored: usize,
    pub transitions: Vec<Transition>,
    pub initial: usize,
    pub finals: Vec<usize>,
}

impl Nfa {
    pub fn from_machine(m: &Machine, initial: usize, finals: Vec<usize>) -> Nfa {
        Nfa {
            states: m.num_states(),
            plain: m.num_plain(),
            monitored: m.num_monitored(),
            transitions: m.transitions().to_vec(),
            initial,
            finals,
        }
    }

    /// The automaton with states `1..=|γ|+1` accepting exactly `γ`.
    pub fn single_path(word: &MonitoredWord) -> Nfa {
        let n = word.n();
        let transitions = word
            .symbols()
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let letter = match *s {
                    Symbol::Plain(a) => a,
                    Symbol::Monitored(r) => n + r,
                };
                Transition {
                    from: crate::model::StateId(i as u32 + 1),
                    letter: crate::model::LetterId(letter as u32),
                    to: crate::model::StateId(i as u32 + 2),
                }
            })
            .collect();
        Nfa {
            states: word.len() + 1,
            plain: n,
            monitored: word.k(),
            transitions,
            initial: 1,
            finals: vec![word.len() + 1],
        }
    }

    fn is_monitored(&self, t: &Transition) -> bool {
        t.letter.0 as usize > self.plain
    }
}

/// Where a run may start or end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Var(Var),
    AnyOf(Vec<usize>),
}

impl Endpoint {
    fn constrain(&self, e: LinExpr) -> Formula {
        match self {
            Endpoint::Var(v) => eq(e, v),
            Endpoint::AnyOf(qs) => or(qs.iter().map(|&q| eq(e.clone(), q as i64))),
        }
    }
}

/// `σ` is a permutation of `[k]`.
pub fn phi_perm(k: usize) -> Formula {
    let mut parts = Vec::new();
    for i in 1..=k {
        parts.push(ge(sigma_var(i), 1));
        parts.push(le(sigma_var(i), k as i64));
    }
    for i in 1..=k {
        for j in 1..=k {
            if i != j {
                parts.push(ne(sigma_var(i), sigma_var(j)));
            }
        }
    }
    and(parts)
}

/// `φ_Δ(from, letter, to)` over the monitored transitions.
fn phi_delta(nfa: &Nfa, from: LinExpr, letter: LinExpr, to: LinExpr) -> Formula {
    or(nfa
        .transitions
        .iter()
        .filter(|t| nfa.is_monitored(t))
        .map(|t| {
            and([
                eq(from.clone(), t.from.0 as i64),
                eq(letter.clone(), t.letter.0 as i64),
                eq(to.clone(), t.to.0 as i64),
            ])
        }))
}

fn phi_states_with(nfa: &Nfa, start: &Endpoint, end: &Endpoint) -> Formula {
    let k = nfa.monitored;
    let p = p_var();
    let mut parts = vec![
        start.constrain(s_var(0).expr()),
        end.constrain(t_var(k).expr()),
    ];
    for i in 1..=k {
        parts.push(implies(
            ge(p.clone(), i as i64),
            and([eq(s_var(i - 1), t_var(i - 1)), eq(t_var(i - 1), s_var(i))]),
        ));
        let letter = sigma_var(i).expr() + LinExpr::constant(nfa.plain as i64);
        parts.push(implies(
            le(p.clone(), i as i64 - 1),
            phi_delta(nfa, t_var(i - 1).expr(), letter, s_var(i).expr()),
        ));
    }
    and(parts)
}

/// Segment endpoints: `s₀` initial, `t_k` final, collapsed dummy segments
/// and a monitored transition between consecutive real segments.
pub fn phi_states(nfa: &Nfa) -> Formula {
    phi_states_with(
        nfa,
        &Endpoint::AnyOf(vec![nfa.initial]),
        &Endpoint::AnyOf(nfa.finals.clone()),
    )
}

fn in_out(nfa: &Nfa, seg: usize, q: usize) -> (LinExpr, LinExpr) {
    let mut inflow = LinExpr::default();
    let mut outflow = LinExpr::default();
    for (e, t) in nfa.transitions.iter().enumerate() {
        if t.to.0 as usize == q {
            inflow = inflow + flow_var(seg, e).expr();
        }
        if t.from.0 as usize == q {
            outflow = outflow + flow_var(seg, e).expr();
        }
    }
    (inflow, outflow)
}

/// `(f, s, t)` is a consistent and connected flow for segment `seg`.
pub fn phi_connected_flow(nfa: &Nfa, seg: usize) -> Formula {
    let (s, t) = (s_var(seg), t_var(seg));
    let m = nfa.states as i64;
    let mut parts = vec![
        ge(s.clone(), 1),
        le(s.clone(), m),
        ge(t.clone(), 1),
        le(t.clone(), m),
    ];
    for q in 1..=nfa.states {
        let qi = q as i64;
        let (inflow, outflow) = in_out(nfa, seg, q);
        let (is_s, is_t) = (eq(s.clone(), qi), eq(t.clone(), qi));
        let (not_s, not_t) = (ne(s.clone(), qi), ne(t.clone(), qi));
        parts.push(implies(
            and([is_s.clone(), not_t.clone()]),
            eq(outflow.clone(), inflow.clone() + 1.into()),
        ));
        parts.push(implies(
            and([is_t.clone(), not_s.clone()]),
            eq(inflow.clone(), outflow.clone() + 1.into()),
        ));
        parts.push(implies(
            or([and([is_s.clone(), is_t]), and([not_s.clone(), not_t])]),
            eq(inflow.clone(), outflow),
        ));

        let d = dist_var(seg, q);
        parts.push(implies(is_s, eq(d.clone(), 0)));
        let feeders = nfa
            .transitions
            .iter()
            .enumerate()
            .filter(|(_, tr)| tr.to.0 as usize == q && tr.from.0 as usize != q);
        let reach = or(feeders.map(|(e, tr)| {
            and([
                ge(flow_var(seg, e), 1),
                eq(
                    d.clone(),
                    dist_var(seg, tr.from.0 as usize).expr() + 1.into(),
                ),
            ])
        }));
        parts.push(implies(and([not_s.clone(), ge(inflow.clone(), 1)]), reach));
        parts.push(implies(and([not_s, eq(inflow, 0)]), eq(d, 0)));
    }
    and(parts)
}

/// Dummy segments carry no flow; real segments are connected flows that
/// avoid monitored letters whose last occurrence is already behind.
pub fn phi_flows(nfa: &Nfa) -> Formula {
    let k = nfa.monitored;
    let p = p_var();
    let mut parts = Vec::new();
    for i in 0..=k {
        let total = LinExpr::sum((0..nfa.transitions.len()).map(|e| flow_var(i, e).expr()));
        parts.push(implies(ge(p.clone(), i as i64 + 1), eq(total, 0)));
        let mut real = vec![phi_connected_flow(nfa, i)];
        for j in 1..=i {
            for (e, t) in nfa
                .transitions
                .iter()
                .enumerate()
                .filter(|(_, t)| nfa.is_monitored(t))
            {
                let r = t.letter.0 as i64 - nfa.plain as i64;
                real.push(implies(eq(sigma_var(j), r), eq(flow_var(i, e), 0)));
            }
        }
        parts.push(implies(le(p.clone(), i as i64), and(real)));
    }
    and(parts)
}

fn alpha_sums(nfa: &Nfa) -> Formula {
    let mut parts = Vec::new();
    for i in 0..=nfa.monitored {
        for a in 1..=nfa.plain {
            let sum = LinExpr::sum(
                nfa.transitions
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.letter.0 as usize == a)
                    .map(|(e, _)| flow_var(i, e).expr()),
            );
            parts.push(eq(alpha_var(i, a), sum));
        }
    }
    and(parts)
}

fn witness_vars(nfa: &Nfa) -> Vec<Var> {
    let k = nfa.monitored;
    let mut vars = Vec::new();
    for i in 0..=k {
        vars.push(s_var(i));
        vars.push(t_var(i));
        vars.extend((0..nfa.transitions.len()).map(|e| flow_var(i, e)));
        vars.extend((1..=nfa.states).map(|q| dist_var(i, q)));
    }
    vars
}

/// The generalized Parikh image variables `α` (row-major) followed by `σ`.
pub fn image_vars(n: usize, k: usize) -> Vec<Var> {
    let mut vars: Vec<Var> = (0..=k)
        .flat_map(|i| (1..=n).map(move |a| alpha_var(i, a)))
        .collect();
    vars.extend((1..=k).map(sigma_var));
    vars
}

fn psi_body(nfa: &Nfa, start: &Endpoint, end: &Endpoint) -> Formula {
    let k = nfa.monitored as i64;
    and([
        ge(p_var(), 0),
        le(p_var(), k),
        phi_perm(nfa.monitored),
        phi_states_with(nfa, start, end),
        phi_flows(nfa),
        alpha_sums(nfa),
    ])
}

/// `Ψ_B(α, σ)`: the generalized Parikh image of the language of `nfa`.
pub fn psi_gpi(nfa: &Nfa) -> Formula {
    let mut vars = vec![p_var()];
    vars.extend(witness_vars(nfa));
    exists(
        vars,
        psi_body(
            nfa,
            &Endpoint::AnyOf(vec![nfa.initial]),
            &Endpoint::AnyOf(nfa.finals.clone()),
        ),
    )
}

/// `Ψ'_B(α, σ, p, q, qf)`: as [`psi_gpi`] with `p` free and the first and
/// last state given by the variables `q` and `qf`.
pub fn psi_open(nfa: &Nfa) -> Formula {
    exists(
        witness_vars(nfa),
        psi_body(nfa, &Endpoint::Var(start_var()), &Endpoint::Var(end_var())),
    )
}

fn check_normal(m: &Machine) -> Result<(), EncodeError> {
    if m.has_general_affine() {
        return Err(EncodeError::Affine);
    }
    if !m.is_normal_form() {
        return Err(EncodeError::NotNormalForm);
    }
    Ok(())
}

/// `(Bα_j)(i)` as a linear expression.
fn b_alpha(m: &Machine, j: usize, i: usize) -> LinExpr {
    LinExpr::sum(m.letters().filter(|&a| !m.is_monitored(a)).map(|a| {
        let c = match m.effect(a) {
            crate::model::Transform::Add(b) => b.get(i),
            _ => unreachable!("normal form"),
        };
        LinExpr::term(c, alpha_var(j, a.0 as usize))
    }))
}

/// Counter values after a run with image `(α, σ)` and padding `p`, from
/// `v` to `w`.
pub fn phi_counters(m: &Machine) -> Result<Formula, EncodeError> {
    check_normal(m)?;
    let d = m.dim();
    let p = p_var();
    let mut parts = Vec::new();
    for i in 1..=d {
        parts.push(eq(beta_var(i, 0), 0));
        parts.push(eq(w_var(i), beta_var(i, d).expr() + nu_var(i).expr()));
        for pos in 1..=d {
            let mut block = Vec::new();
            for j in 1..=d {
                let mut rhs = beta_var(i, j - 1).expr();
                if pos <= j {
                    rhs = rhs + b_alpha(m, j, i);
                }
                block.push(eq(beta_var(i, j), rhs));
            }
            block.push(implies(le(p.clone(), pos as i64 - 1), eq(nu_var(i), 0)));
            block.push(implies(ge(p.clone(), pos as i64), eq(nu_var(i), v_var(i))));
            parts.push(implies(eq(sigma_var(pos), i as i64), and(block)));
        }
    }
    Ok(and(parts))
}

fn counter_aux(d: usize) -> Vec<Var> {
    let mut vars: Vec<Var> = (1..=d)
        .flat_map(|i| (0..=d).map(move |j| beta_var(i, j)))
        .collect();
    vars.extend((1..=d).map(nu_var));
    vars
}

/// `Φ_A(q, qf, v, w, α, σ)`.
pub fn phi_reach(m: &Machine) -> Result<Formula, EncodeError> {
    reach_body(m, &BTreeMap::new())
}

/// Values that every query may assume. A reset letter with no transition
/// never occurs, so it is a dummy, and dummies can go in any order: they
/// take the first positions of `σ`, in ascending order, with empty segments.
pub fn fixed_dummies(m: &Machine) -> BTreeMap<String, i64> {
    let k = m.num_monitored();
    let unused: Vec<usize> = (1..=k)
        .filter(|&r| {
            let l = m.reset_letter(r);
            !m.transitions().iter().any(|t| t.letter == l)
        })
        .collect();
    let mut out = BTreeMap::new();
    for (j, &r) in unused.iter().enumerate() {
        out.insert(sigma_var(j + 1).name, r as i64);
        for e in 0..m.transitions().len() {
            out.insert(flow_var(j, e).name, 0);
        }
        for a in 1..=m.num_plain() {
            out.insert(alpha_var(j, a).name, 0);
        }
    }
    if unused.len() == k {
        out.insert(p_var().name, k as i64);
    }
    out
}

fn reach_body(m: &Machine, fixed: &BTreeMap<String, i64>) -> Result<Formula, EncodeError> {
    check_normal(m)?;
    let nfa = Nfa::from_machine(m, 1, vec![]);
    let mut vars = vec![p_var()];
    vars.extend(counter_aux(m.dim()));
    vars.extend(witness_vars(&nfa));
    vars.retain(|v| !fixed.contains_key(&v.name));
    let dummies = fixed.keys().filter(|n| n.starts_with("sigma")).count();
    let body = and([
        psi_body(&nfa, &Endpoint::Var(start_var()), &Endpoint::Var(end_var())),
        phi_counters(m)?,
        ge(p_var(), dummies as i64),
    ]);
    Ok(exists(vars, body.substitute(fixed)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Reach,
    Cover,
}

/// A closed existential sentence for `src →* dst` (or covering `dst`).
pub fn encode_query(
    m: &Machine,
    src: &Configuration,
    dst: &Configuration,
    mode: Mode,
) -> Result<Formula, EncodeError> {
    check_normal(m)?;
    let d = m.dim();
    for c in [src, dst] {
        if c.counters.dim() != d {
            return Err(EncodeError::DimensionMismatch(d, c.counters.dim()));
        }
    }
    let mut values = std::collections::BTreeMap::new();
    values.insert(start_var().name, src.state.0 as i64);
    values.insert(end_var().name, dst.state.0 as i64);
    for i in 1..=d {
        values.insert(v_var(i).name, src.counters.get(i));
    }
    let target = and((1..=d).map(|i| match mode {
        Mode::Reach => eq(w_var(i), dst.counters.get(i)),
        Mode::Cover => ge(w_var(i), dst.counters.get(i)),
    }));
    let fixed = fixed_dummies(m);
    let body = and([reach_body(m, &fixed)?.substitute(&values), target]);
    let mut vars = image_vars(m.num_plain(), m.num_monitored());
    vars.retain(|v| !fixed.contains_key(&v.name));
    vars.extend((1..=d).map(w_var));
    Ok(exists(vars, body))
}

/// The shared counter-vector variables of an inclusion sentence.
pub fn incl_var(i: usize) -> Var {
    Var::int(format!("x{i}"))
}

/// `φ_{A,q(v)}(x)`: `x` is reachable in `m` from `src`, at any state.
fn reach_set_formula(
    m: &Machine,
    src: &Configuration,
    prefix: &str,
) -> Result<Formula, EncodeError> {
    let d = m.dim();
    let mut values = std::collections::BTreeMap::new();
    values.insert(start_var().name, src.state.0 as i64);
    for i in 1..=d {
        values.insert(v_var(i).name, src.counters.get(i));
    }
    let fixed = fixed_dummies(m);
    let mut vars = image_vars(m.num_plain(), m.num_monitored());
    vars.retain(|v| !fixed.contains_key(&v.name));
    vars.push(end_var());
    let body = and([
        reach_body(m, &fixed)?.substitute(&values),
        ge(end_var(), 1),
        le(end_var(), m.num_states() as i64),
    ]);
    let f = exists(vars, body).prefix_names(prefix);
    let map = (1..=d)
        .map(|i| (format!("{prefix}{}", w_var(i).name), incl_var(i).name))
        .collect();
    Ok(f.rename(&map))
}

/// `∀x ∀u ∃v. φ_A → φ_B`: every vector reachable in `a` is reachable in `b`.
pub fn encode_inclusion(
    a: &Machine,
    src_a: &Configuration,
    b: &Machine,
    src_b: &Configuration,
) -> Result<Formula, EncodeError> {
    if a.dim() != b.dim() {
        return Err(EncodeError::DimensionMismatch(a.dim(), b.dim()));
    }
    let xs: Vec<Var> = (1..=a.dim()).map(incl_var).collect();
    let fa = reach_set_formula(a, src_a, "A_")?;
    let fb = reach_set_formula(b, src_b, "B_")?;
    Ok(to_prenex_pi2(&not(exists(xs, and([fa, not(fb)]))))?)
}

/// `∃x ∃u. φ_A ∧ ∀v. ¬φ_B`, whose models carry a refuting vector `x`.
pub fn encode_inclusion_refutation(
    a: &Machine,
    src_a: &Configuration,
    b: &Machine,
    src_b: &Configuration,
) -> Result<Formula, EncodeError> {
    let valid = encode_inclusion(a, src_a, b, src_b)?;
    let Formula::Forall(univ, inner) = valid else {
        return Err(PaError::Shape("expected a universal prefix".into()).into());
    };
    let (exist, matrix) = match *inner {
        Formula::Exists(vs, m) => (vs, *m),
        m => (Vec::new(), m),
    };
    let Formula::Implies(lhs, rhs) = matrix else {
        return Err(PaError::Shape("expected an implication".into()).into());
    };
    Ok(exists(
        univ,
        and([*lhs, crate::pa::forall(exist, not(*rhs))]),
    ))
}

/// `x ∈ reach(b, src_b)` for a concrete `x`. Unsatisfiability confirms
/// that `x` refutes an inclusion into `b`.
pub fn encode_membership(
    b: &Machine,
    src_b: &Configuration,
    x: &Vector,
) -> Result<Formula, EncodeError> {
    if x.dim() != b.dim() {
        return Err(EncodeError::DimensionMismatch(b.dim(), x.dim()));
    }
    let f = reach_set_formula(b, src_b, "B_")?;
    let values = (1..=x.dim())
        .map(|i| (incl_var(i).name, x.get(i)))
        .collect();
    Ok(f.substitute(&values))
}

/// The machine with every class viewed as a normal-form reset machine.
pub fn to_normal_form(m: &Machine) -> Result<crate::model::NormalForm, EncodeError> {
    if m.has_general_affine() {
        return Err(EncodeError::Affine);
    }
    Ok(crate::model::normalize(&m.to_zvassr()?)?)
}
