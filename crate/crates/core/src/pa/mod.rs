//! Presburger arithmetic: linear atoms `Σ cᵢxᵢ + c ⋈ 0`, boolean structure
//! and quantifier blocks over natural- or integer-sorted variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

mod search;

pub use search::{enumerate_bounded, sat_bounded, BoundedEnumeration, BoundedSat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PaError {
    #[error("no value for variable `{0}`")]
    MissingVariable(String),
    #[error("formula contains quantifiers where none are allowed")]
    Quantified,
    #[error("formula is not existential")]
    NotExistential,
    #[error("formula does not have the expected shape: {0}")]
    Shape(String),
    #[error("arithmetic overflow while evaluating")]
    Overflow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Natural,
    Integer,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: String,
    pub sort: Sort,
}

impl Var {
    pub fn nat(name: impl Into<String>) -> Self {
        Var {
            name: name.into(),
            sort: Sort::Natural,
        }
    }

    pub fn int(name: impl Into<String>) -> Self {
        Var {
            name: name.into(),
            sort: Sort::Integer,
        }
    }

    pub fn expr(&self) -> LinExpr {
        LinExpr::var(self.clone())
    }
}

pub type Assignment = BTreeMap<String, i64>;

/// `Σ cᵢxᵢ + c`
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LinExpr {
    pub terms: BTreeMap<Var, i64>,
    pub constant: i64,
}

impl LinExpr {
    pub fn constant(c: i64) -> Self {
        LinExpr {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: Var) -> Self {
        LinExpr {
            terms: BTreeMap::from([(v, 1)]),
            constant: 0,
        }
    }

    pub fn term(c: i64, v: Var) -> Self {
        LinExpr::var(v) * c
    }

    pub fn sum(items: impl IntoIterator<Item = LinExpr>) -> Self {
        items.into_iter().fold(LinExpr::default(), |a, b| a + b)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, v: Var, c: i64) {
        let e = self.terms.entry(v).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
    }

    pub fn eval(&self, a: &Assignment) -> Result<i64, PaError> {
        let mut acc = self.constant as i128;
        for (v, c) in &self.terms {
            let x = a
                .get(&v.name)
                .ok_or_else(|| PaError::MissingVariable(v.name.clone()))?;
            acc += *c as i128 * *x as i128;
        }
        i64::try_from(acc).map_err(|_| PaError::Overflow)
    }

    fn substitute(&self, values: &BTreeMap<String, i64>) -> LinExpr {
        let mut out = LinExpr::constant(self.constant);
        for (v, c) in &self.terms {
            match values.get(&v.name) {
                Some(x) => out.constant += c * x,
                None => out.add_term(v.clone(), *c),
            }
        }
        out
    }

    fn rename(&self, map: &BTreeMap<String, String>) -> LinExpr {
        let mut out = LinExpr::constant(self.constant);
        for (v, c) in &self.terms {
            let name = map.get(&v.name).cloned().unwrap_or_else(|| v.name.clone());
            out.add_term(Var { name, sort: v.sort }, *c);
        }
        out
    }
}

impl From<i64> for LinExpr {
    fn from(c: i64) -> Self {
        LinExpr::constant(c)
    }
}

impl From<Var> for LinExpr {
    fn from(v: Var) -> Self {
        LinExpr::var(v)
    }
}

impl From<&Var> for LinExpr {
    fn from(v: &Var) -> Self {
        LinExpr::var(v.clone())
    }
}

impl Add for LinExpr {
    type Output = LinExpr;
    fn add(mut self, rhs: LinExpr) -> LinExpr {
        self.constant += rhs.constant;
        for (v, c) in rhs.terms {
            self.add_term(v, c);
        }
        self
    }
}

impl Sub for LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: LinExpr) -> LinExpr {
        self + (-rhs)
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self * -1
    }
}

impl Mul<i64> for LinExpr {
    type Output = LinExpr;
    fn mul(mut self, k: i64) -> LinExpr {
        if k == 0 {
            return LinExpr::default();
        }
        self.constant *= k;
        for c in self.terms.values_mut() {
            *c *= k;
        }
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cmp {
    Ge,
    Eq,
    Le,
    Ne,
    Gt,
    Lt,
}

impl Cmp {
    fn holds(self, x: i64) -> bool {
        match self {
            Cmp::Ge => x >= 0,
            Cmp::Eq => x == 0,
            Cmp::Le => x <= 0,
            Cmp::Ne => x != 0,
            Cmp::Gt => x > 0,
            Cmp::Lt => x < 0,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Cmp::Ge => ">=",
            Cmp::Eq => "=",
            Cmp::Le => "<=",
            Cmp::Ne => "!=",
            Cmp::Gt => ">",
            Cmp::Lt => "<",
        }
    }

    pub fn negate(self) -> Cmp {
        match self {
            Cmp::Ge => Cmp::Lt,
            Cmp::Eq => Cmp::Ne,
            Cmp::Le => Cmp::Gt,
            Cmp::Ne => Cmp::Eq,
            Cmp::Gt => Cmp::Le,
            Cmp::Lt => Cmp::Ge,
        }
    }
}

/// `expr ⋈ 0`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub expr: LinExpr,
    pub cmp: Cmp,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Vec<Var>, Box<Formula>),
    Forall(Vec<Var>, Box<Formula>),
}

fn atom(lhs: LinExpr, rhs: LinExpr, cmp: Cmp) -> Formula {
    let expr = lhs - rhs;
    if expr.is_constant() {
        return if cmp.holds(expr.constant) {
            Formula::True
        } else {
            Formula::False
        };
    }
    Formula::Atom(Atom { expr, cmp })
}

pub fn ge(l: impl Into<LinExpr>, r: impl Into<LinExpr>) -> Formula {
    atom(l.into(), r.into(), Cmp::Ge)
}

pub fn le(l: impl Into<LinExpr>, r: impl Into<LinExpr>) -> Formula {
    atom(l.into(), r.into(), Cmp::Le)
}

pub fn gt(l: impl Into<LinExpr>, r: impl Into<LinExpr>) -> Formula {
    atom(l.into(), r.into(), Cmp::Gt)
}

pub fn lt(l: impl Into<LinExpr>, r: impl Into<LinExpr>) -> Formula {
    atom(l.into(), r.into(), Cmp::Lt)
}

pub fn eq(l: impl Into<LinExpr>, r: impl Into<LinExpr>) -> Formula {
    atom(l.into(), r.into(), Cmp::Eq)
}

pub fn ne(l: impl Into<LinExpr>, r: impl Into<LinExpr>) -> Formula {
    atom(l.into(), r.into(), Cmp::Ne)
}

/// Flattening conjunction; constants are folded.
pub fn and(items: impl IntoIterator<Item = Formula>) -> Formula {
    let mut out = Vec::new();
    for f in items {
        match f {
            Formula::True => {}
            Formula::False => return Formula::False,
            Formula::And(inner) => out.extend(inner),
            f => out.push(f),
        }
    }
    match out.len() {
        0 => Formula::True,
        1 => out.pop().unwrap(),
        _ => Formula::And(out),
    }
}

/// Flattening disjunction; constants are folded.
pub fn or(items: impl IntoIterator<Item = Formula>) -> Formula {
    let mut out = Vec::new();
    for f in items {
        match f {
            Formula::False => {}
            Formula::True => return Formula::True,
            Formula::Or(inner) => out.extend(inner),
            f => out.push(f),
        }
    }
    match out.len() {
        0 => Formula::False,
        1 => out.pop().unwrap(),
        _ => Formula::Or(out),
    }
}

pub fn not(f: Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Not(inner) => *inner,
        f => Formula::Not(Box::new(f)),
    }
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    match (&a, &b) {
        (Formula::False, _) | (_, Formula::True) => Formula::True,
        (Formula::True, _) => b,
        (_, Formula::False) => not(a),
        _ => Formula::Implies(Box::new(a), Box::new(b)),
    }
}

pub fn exists(vars: Vec<Var>, body: Formula) -> Formula {
    if vars.is_empty() || matches!(body, Formula::True | Formula::False) {
        return body;
    }
    Formula::Exists(vars, Box::new(body))
}

pub fn forall(vars: Vec<Var>, body: Formula) -> Formula {
    if vars.is_empty() || matches!(body, Formula::True | Formula::False) {
        return body;
    }
    Formula::Forall(vars, Box::new(body))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SizeConvention {
    /// one per monomial, constant, comparator, connective and bound variable
    Nodes,
    /// as `Nodes`, but every number `c` counts `|c| + 1`
    Unary,
}

impl Formula {
    pub fn evaluate(&self, a: &Assignment) -> Result<bool, PaError> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(at) => at.cmp.holds(at.expr.eval(a)?),
            Formula::Not(f) => !f.evaluate(a)?,
            Formula::And(fs) => {
                for f in fs {
                    if !f.evaluate(a)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.evaluate(a)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(x, y) => !x.evaluate(a)? || y.evaluate(a)?,
            Formula::Exists(..) | Formula::Forall(..) => return Err(PaError::Quantified),
        })
    }

    /// Rewrites every atom into the `e ≥ 0` form.
    pub fn canonical(&self) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(at) => {
                let e = at.expr.clone();
                let g = |e: LinExpr| {
                    Formula::Atom(Atom {
                        expr: e,
                        cmp: Cmp::Ge,
                    })
                };
                match at.cmp {
                    Cmp::Ge => g(e),
                    Cmp::Le => g(-e),
                    Cmp::Gt => g(e - 1.into()),
                    Cmp::Lt => g(-e - 1.into()),
                    Cmp::Eq => Formula::And(vec![g(e.clone()), g(-e)]),
                    Cmp::Ne => Formula::Or(vec![g(e.clone() - 1.into()), g(-e - 1.into())]),
                }
            }
            Formula::Not(f) => Formula::Not(Box::new(f.canonical())),
            Formula::And(fs) => Formula::And(fs.iter().map(Formula::canonical).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(Formula::canonical).collect()),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(a.canonical()), Box::new(b.canonical()))
            }
            Formula::Exists(vs, f) => Formula::Exists(vs.clone(), Box::new(f.canonical())),
            Formula::Forall(vs, f) => Formula::Forall(vs.clone(), Box::new(f.canonical())),
        }
    }

    pub fn size(&self, convention: SizeConvention) -> usize {
        let num = |c: i64| match convention {
            SizeConvention::Nodes => 1,
            SizeConvention::Unary => c.unsigned_abs() as usize + 1,
        };
        match self {
            Formula::True | Formula::False => 1,
            Formula::Atom(at) => {
                at.expr.terms.values().map(|&c| num(c)).sum::<usize>() + num(at.expr.constant) + 1
            }
            Formula::Not(f) => 1 + f.size(convention),
            Formula::And(fs) | Formula::Or(fs) => {
                1 + fs.iter().map(|f| f.size(convention)).sum::<usize>()
            }
            Formula::Implies(a, b) => 1 + a.size(convention) + b.size(convention),
            Formula::Exists(vs, f) | Formula::Forall(vs, f) => 1 + vs.len() + f.size(convention),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(at) => out.extend(
                at.expr
                    .terms
                    .keys()
                    .filter(|v| !bound.contains(&v.name))
                    .cloned(),
            ),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().for_each(|f| f.collect_free(bound, out))
            }
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(vs, f) | Formula::Forall(vs, f) => {
                let before = bound.len();
                bound.extend(vs.iter().map(|v| v.name.clone()));
                f.collect_free(bound, out);
                bound.truncate(before);
            }
        }
    }

    fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(at) => out.extend(at.expr.terms.keys().map(|v| v.name.clone())),
            Formula::Not(f) => f.all_names(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.all_names(out)),
            Formula::Implies(a, b) => {
                a.all_names(out);
                b.all_names(out);
            }
            Formula::Exists(vs, f) | Formula::Forall(vs, f) => {
                out.extend(vs.iter().map(|v| v.name.clone()));
                f.all_names(out);
            }
        }
    }

    /// Replaces free variables by constants.
    pub fn substitute(&self, values: &BTreeMap<String, i64>) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(at) => atom(at.expr.substitute(values), LinExpr::default(), at.cmp),
            Formula::Not(f) => not(f.substitute(values)),
            Formula::And(fs) => and(fs.iter().map(|f| f.substitute(values))),
            Formula::Or(fs) => or(fs.iter().map(|f| f.substitute(values))),
            Formula::Implies(a, b) => implies(a.substitute(values), b.substitute(values)),
            Formula::Exists(vs, f) | Formula::Forall(vs, f) => {
                let mut inner = values.clone();
                for v in vs {
                    inner.remove(&v.name);
                }
                let body = f.substitute(&inner);
                if matches!(self, Formula::Exists(..)) {
                    exists(vs.clone(), body)
                } else {
                    forall(vs.clone(), body)
                }
            }
        }
    }

    /// Renames free occurrences.
    pub fn rename(&self, map: &BTreeMap<String, String>) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(at) => Formula::Atom(Atom {
                expr: at.expr.rename(map),
                cmp: at.cmp,
            }),
            Formula::Not(f) => Formula::Not(Box::new(f.rename(map))),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.rename(map)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.rename(map)).collect()),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(a.rename(map)), Box::new(b.rename(map)))
            }
            Formula::Exists(vs, f) | Formula::Forall(vs, f) => {
                let mut inner = map.clone();
                for v in vs {
                    inner.remove(&v.name);
                }
                let body = Box::new(f.rename(&inner));
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(vs.clone(), body)
                } else {
                    Formula::Forall(vs.clone(), body)
                }
            }
        }
    }

    /// Prefixes every variable name, bound or free.
    pub fn prefix_names(&self, prefix: &str) -> Formula {
        let mut names = BTreeSet::new();
        self.all_names(&mut names);
        let map: BTreeMap<String, String> = names
            .into_iter()
            .map(|n| (n.clone(), format!("{prefix}{n}")))
            .collect();
        self.rename_all(&map)
    }

    fn rename_all(&self, map: &BTreeMap<String, String>) -> Formula {
        let rv = |v: &Var| Var {
            name: map[&v.name].clone(),
            sort: v.sort,
        };
        match self {
            Formula::Exists(vs, f) => {
                Formula::Exists(vs.iter().map(rv).collect(), Box::new(f.rename_all(map)))
            }
            Formula::Forall(vs, f) => {
                Formula::Forall(vs.iter().map(rv).collect(), Box::new(f.rename_all(map)))
            }
            Formula::Not(f) => Formula::Not(Box::new(f.rename_all(map))),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.rename_all(map)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.rename_all(map)).collect()),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(a.rename_all(map)), Box::new(b.rename_all(map)))
            }
            f => f.rename(map),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Implies(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// No `∀` in positive and no `∃` in negative position.
    pub fn is_existential(&self) -> bool {
        self.polarity_ok(true)
    }

    fn polarity_ok(&self, positive: bool) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => f.polarity_ok(!positive),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(|f| f.polarity_ok(positive)),
            Formula::Implies(a, b) => a.polarity_ok(!positive) && b.polarity_ok(positive),
            Formula::Exists(_, f) => positive && f.polarity_ok(positive),
            Formula::Forall(_, f) => !positive && f.polarity_ok(positive),
        }
    }

    /// Prenex `∀*∃*` with a quantifier-free matrix.
    pub fn is_prenex_pi2(&self) -> bool {
        let mut f = self;
        while let Formula::Forall(_, inner) = f {
            f = inner;
        }
        while let Formula::Exists(_, inner) = f {
            f = inner;
        }
        f.is_quantifier_free()
    }
}

/// Hoists every existential quantifier of an existential formula to the
/// front. Bound names that clash with other names are made fresh.
pub fn pull_exists(f: &Formula) -> Result<(Vec<Var>, Formula), PaError> {
    if !f.is_existential() {
        return Err(PaError::NotExistential);
    }
    let mut used = BTreeSet::new();
    f.all_names(&mut used);
    let mut taken: BTreeSet<String> = f.free_vars().into_iter().map(|v| v.name).collect();
    let mut vars = Vec::new();
    let body = hoist(f, &mut vars, &mut taken, &mut used);
    Ok((vars, body))
}

fn fresh(name: &str, used: &mut BTreeSet<String>) -> String {
    let mut i = 1;
    loop {
        let candidate = format!("{name}_{i}");
        if used.insert(candidate.clone()) {
            return candidate;
        }
        i += 1;
    }
}

fn hoist(
    f: &Formula,
    vars: &mut Vec<Var>,
    taken: &mut BTreeSet<String>,
    used: &mut BTreeSet<String>,
) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::Not(Box::new(hoist(g, vars, taken, used))),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| hoist(g, vars, taken, used)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| hoist(g, vars, taken, used)).collect()),
        Formula::Implies(a, b) => Formula::Implies(
            Box::new(hoist(a, vars, taken, used)),
            Box::new(hoist(b, vars, taken, used)),
        ),
        Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
            let mut map = BTreeMap::new();
            for v in vs {
                let name = if taken.contains(&v.name) {
                    let n = fresh(&v.name, used);
                    map.insert(v.name.clone(), n.clone());
                    n
                } else {
                    v.name.clone()
                };
                taken.insert(name.clone());
                vars.push(Var { name, sort: v.sort });
            }
            hoist(&g.rename(&map), vars, taken, used)
        }
    }
}

/// `¬(∃x. ψ_A ∧ ¬ψ_B)` with existential `ψ_A`, `ψ_B` becomes
/// `∀x ∀u ∃v. A → B`.
pub fn to_prenex_pi2(f: &Formula) -> Result<Formula, PaError> {
    let Formula::Not(inner) = f else {
        return Err(PaError::Shape("expected a negation at the root".into()));
    };
    let (xs, conj) = match inner.as_ref() {
        Formula::Exists(xs, g) => (xs.clone(), g.as_ref()),
        g => (Vec::new(), g),
    };
    let Formula::And(parts) = conj else {
        return Err(PaError::Shape("expected ψ_A ∧ ¬ψ_B".into()));
    };
    let [a, Formula::Not(b)] = &parts[..] else {
        return Err(PaError::Shape("expected ψ_A ∧ ¬ψ_B".into()));
    };
    let mut used = BTreeSet::new();
    f.all_names(&mut used);
    let outer: BTreeSet<String> = xs.iter().map(|v| v.name.clone()).collect();

    let (us, a_body) = pull_exists(a)?;
    let (vs, b_body) = pull_exists(b)?;
    let mut taken = outer.clone();
    taken.extend(f.free_vars().into_iter().map(|v| v.name));
    let mut rebind = |vars: Vec<Var>, body: Formula, taken: &mut BTreeSet<String>| {
        let mut map = BTreeMap::new();
        let mut out = Vec::new();
        for v in vars {
            let name = if taken.contains(&v.name) {
                let n = fresh(&v.name, &mut used);
                map.insert(v.name.clone(), n.clone());
                n
            } else {
                v.name.clone()
            };
            taken.insert(name.clone());
            out.push(Var { name, sort: v.sort });
        }
        (out, body.rename(&map))
    };
    let (us, a_body) = rebind(us, a_body, &mut taken);
    let (vs, b_body) = rebind(vs, b_body, &mut taken);
    let mut universal = xs;
    universal.extend(us);
    Ok(forall(universal, exists(vs, implies(a_body, b_body))))
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, &c) in &self.terms {
            let (sign, mag) = if c < 0 { ("-", -c) } else { ("+", c) };
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag != 1 {
                write!(f, "{mag}*")?;
            }
            f.write_str(&v.name)?;
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)?;
        } else if self.constant != 0 {
            let sign = if self.constant < 0 { "-" } else { "+" };
            write!(f, " {sign} {}", self.constant.abs())?;
        }
        Ok(())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut lhs = self.expr.clone();
        let rhs = -lhs.constant;
        lhs.constant = 0;
        write!(f, "{lhs} {} {rhs}", self.cmp.symbol())
    }
}

fn write_vars(f: &mut fmt::Formatter<'_>, vs: &[Var]) -> fmt::Result {
    let names: Vec<String> = vs
        .iter()
        .map(|v| match v.sort {
            Sort::Natural => v.name.clone(),
            Sort::Integer => format!("{}:int", v.name),
        })
        .collect();
    f.write_str(&names.join(" "))
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, fs: &[Formula], op: &str| {
            f.write_str("(")?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{g}")?;
            }
            f.write_str(")")
        };
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => write!(f, "({a})"),
            Formula::Not(g) => write!(f, "!{g}"),
            Formula::And(fs) => join(f, fs, "&"),
            Formula::Or(fs) => join(f, fs, "|"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Exists(vs, g) => {
                f.write_str("(exists ")?;
                write_vars(f, vs)?;
                write!(f, ". {g})")
            }
            Formula::Forall(vs, g) => {
                f.write_str("(forall ")?;
                write_vars(f, vs)?;
                write!(f, ". {g})")
            }
        }
    }
}
