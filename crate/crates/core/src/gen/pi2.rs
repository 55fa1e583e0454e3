use rand::Rng;

use crate::model::{Configuration, Machine, MachineClass, StateId, Transform, Vector};
use crate::pa::{and, exists, forall, ge, or, Formula, LinExpr, Var};

use super::{GenError, InclusionInstance};

/// `a·x + z ≥ b·y`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi2Term {
    pub a: Vec<i64>,
    pub z: i64,
    pub b: Vec<i64>,
}

/// Positive Boolean combination of term indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PosBool {
    Term(usize),
    And(Vec<PosBool>),
    Or(Vec<PosBool>),
}

const MAX_CNF_CLAUSES: usize = 256;

impl PosBool {
    /// Clauses of term indices, by distribution.
    pub fn to_cnf(&self) -> Result<Vec<Vec<usize>>, GenError> {
        let cnf = match self {
            PosBool::Term(t) => vec![vec![*t]],
            PosBool::And(fs) => {
                let mut out = Vec::new();
                for f in fs {
                    out.extend(f.to_cnf()?);
                }
                out
            }
            PosBool::Or(fs) => {
                let mut acc: Vec<Vec<usize>> = vec![vec![]];
                for f in fs {
                    let cs = f.to_cnf()?;
                    if acc.len() * cs.len() > MAX_CNF_CLAUSES {
                        return Err(GenError::Shape("CNF too large".into()));
                    }
                    acc = acc
                        .iter()
                        .flat_map(|a| cs.iter().map(move |c| a.iter().chain(c).copied().collect()))
                        .collect();
                }
                acc
            }
        };
        if cnf.len() > MAX_CNF_CLAUSES {
            return Err(GenError::Shape("CNF too large".into()));
        }
        Ok(cnf)
    }

    fn eval(&self, terms: &[bool]) -> bool {
        match self {
            PosBool::Term(t) => terms[*t],
            PosBool::And(fs) => fs.iter().all(|f| f.eval(terms)),
            PosBool::Or(fs) => fs.iter().any(|f| f.eval(terms)),
        }
    }
}

/// `∀x ∃y. φ` over naturals, `φ` a positive combination of terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi2Formula {
    pub xs: usize,
    pub ys: usize,
    pub terms: Vec<Pi2Term>,
    pub matrix: PosBool,
}

fn dot(c: &[i64], v: &[i64]) -> i64 {
    c.iter().zip(v).map(|(a, b)| a * b).sum()
}

impl Pi2Formula {
    fn check(&self) -> Result<(), GenError> {
        if self.terms.is_empty() {
            return Err(GenError::Shape("no terms".into()));
        }
        for (i, t) in self.terms.iter().enumerate() {
            if t.a.len() != self.xs || t.b.len() != self.ys {
                return Err(GenError::Shape(format!(
                    "term {} has the wrong arity",
                    i + 1
                )));
            }
        }
        let mut bad = None;
        fn walk(f: &PosBool, n: usize, bad: &mut Option<usize>) {
            match f {
                PosBool::Term(t) if *t >= n => *bad = Some(*t),
                PosBool::Term(_) => {}
                PosBool::And(fs) | PosBool::Or(fs) => fs.iter().for_each(|g| walk(g, n, bad)),
            }
        }
        walk(&self.matrix, self.terms.len(), &mut bad);
        match bad {
            Some(t) => Err(GenError::Shape(format!("unknown term {t}"))),
            None => Ok(()),
        }
    }

    pub fn x_var(j: usize) -> Var {
        Var::nat(format!("x{}", j + 1))
    }

    pub fn y_var(j: usize) -> Var {
        Var::nat(format!("y{}", j + 1))
    }

    pub fn to_formula(&self) -> Result<Formula, GenError> {
        self.check()?;
        let atoms: Vec<Formula> = self
            .terms
            .iter()
            .map(|t| {
                let lhs = LinExpr::sum(
                    t.a.iter()
                        .enumerate()
                        .map(|(j, &c)| LinExpr::term(c, Pi2Formula::x_var(j))),
                ) + LinExpr::constant(t.z);
                let rhs = LinExpr::sum(
                    t.b.iter()
                        .enumerate()
                        .map(|(j, &c)| LinExpr::term(c, Pi2Formula::y_var(j))),
                );
                ge(lhs, rhs)
            })
            .collect();
        fn build(f: &PosBool, atoms: &[Formula]) -> Formula {
            match f {
                PosBool::Term(t) => atoms[*t].clone(),
                PosBool::And(fs) => and(fs.iter().map(|g| build(g, atoms))),
                PosBool::Or(fs) => or(fs.iter().map(|g| build(g, atoms))),
            }
        }
        let body = build(&self.matrix, &atoms);
        Ok(forall(
            (0..self.xs).map(Pi2Formula::x_var).collect(),
            exists((0..self.ys).map(Pi2Formula::y_var).collect(), body),
        ))
    }

    /// Bounded check: every `x ≤ x_bound` has some `y ≤ y_bound`. Exact
    /// only when the bounds are large enough for the instance.
    pub fn brute_force(&self, x_bound: i64, y_bound: i64) -> bool {
        let tuples = |n: usize, bound: i64| -> Vec<Vec<i64>> {
            let mut out = vec![vec![]];
            for _ in 0..n {
                out = out
                    .into_iter()
                    .flat_map(|v| (0..=bound).map(move |c| [v.clone(), vec![c]].concat()))
                    .collect();
            }
            out
        };
        let ys = tuples(self.ys, y_bound);
        tuples(self.xs, x_bound).iter().all(|x| {
            ys.iter().any(|y| {
                let truth: Vec<bool> = self
                    .terms
                    .iter()
                    .map(|t| dot(&t.a, x) + t.z >= dot(&t.b, y))
                    .collect();
                self.matrix.eval(&truth)
            })
        })
    }
}

pub fn random_pi2(rng: &mut impl Rng, max_terms: usize, max_abs: i64) -> Pi2Formula {
    let xs = 1;
    let ys = rng.gen_range(1..=2);
    let n = rng.gen_range(1..=max_terms);
    let mut coef = || rng.gen_range(-max_abs..=max_abs);
    let terms: Vec<Pi2Term> = (0..n)
        .map(|_| Pi2Term {
            a: (0..xs).map(|_| coef()).collect(),
            z: coef(),
            b: (0..ys).map(|_| coef()).collect(),
        })
        .collect();
    let mut ids: Vec<usize> = (0..n).collect();
    let matrix = match (n, rng.gen_range(0..3)) {
        (1, _) => PosBool::Term(0),
        (_, 0) => PosBool::And(ids.drain(..).map(PosBool::Term).collect()),
        (_, 1) => PosBool::Or(ids.drain(..).map(PosBool::Term).collect()),
        _ => {
            let last = ids.pop().unwrap();
            PosBool::And(vec![
                PosBool::Or(ids.into_iter().map(PosBool::Term).collect()),
                PosBool::Term(last),
            ])
        }
    };
    Pi2Formula {
        xs,
        ys,
        terms,
        matrix,
    }
}

/// The two machines of the validity-to-inclusion reduction. Every
/// occurrence of a term in the CNF gets its own counter.
///
/// `A`: `q --z--> q'`, then loops `l_j` adding column `j` of the left-hand
/// sides. `B`: loops `r_j` at `p` adding the right-hand sides, one gadget per
/// clause that keeps one chosen occurrence and lets the others decrease,
/// and `inc` loops at `p_f`.
pub fn pi2pa_to_inclusion(f: &Pi2Formula) -> Result<InclusionInstance, GenError> {
    f.check()?;
    let cnf = f.matrix.to_cnf()?;
    let occ: Vec<usize> = cnf.iter().flatten().copied().collect();
    let k = occ.len();
    let term = |o: usize| &f.terms[occ[o]];

    let z = Vector((0..k).map(|o| term(o).z).collect());
    let mut a = Machine::builder("A", MachineClass::Zvass, k)
        .states(["q", "q1"])
        .letter("z", Transform::Add(z));
    a = a.transition("q", "z", "q1");
    for j in 0..f.xs {
        let l = format!("l{}", j + 1);
        a = a.letter(
            l.clone(),
            Transform::Add(Vector((0..k).map(|o| term(o).a[j]).collect())),
        );
        a = a.transition("q1", &l, "q1");
    }

    let mut states = vec!["p".to_string()];
    for (c, clause) in cnf.iter().enumerate() {
        states.extend((0..clause.len()).map(|i| format!("c{}_{}", c + 1, i + 1)));
        states.push(format!("j{}", c + 1));
    }
    let join = |c: usize| {
        if c == 0 {
            "p".to_string()
        } else {
            format!("j{c}")
        }
    };
    let fin = join(cnf.len());
    let mut b = Machine::builder("B", MachineClass::Zvass, k).states(states);
    b = b.letter("skip", Transform::Add(Vector::zeros(k)));
    for j in 0..f.ys {
        let r = format!("r{}", j + 1);
        b = b.letter(
            r.clone(),
            Transform::Add(Vector((0..k).map(|o| term(o).b[j]).collect())),
        );
        b = b.transition("p", &r, "p");
    }
    for o in 0..k {
        b = b.letter(
            format!("dec{}", o + 1),
            Transform::Add(Vector::unit(k, o + 1).neg()),
        );
        b = b.letter(
            format!("inc{}", o + 1),
            Transform::Add(Vector::unit(k, o + 1)),
        );
        b = b.transition(&fin, &format!("inc{}", o + 1), &fin);
    }
    let mut base = 0;
    for (c, clause) in cnf.iter().enumerate() {
        for chosen in 0..clause.len() {
            let st = format!("c{}_{}", c + 1, chosen + 1);
            b = b
                .transition(&join(c), "skip", &st)
                .transition(&st, "skip", &join(c + 1));
            for other in (0..clause.len()).filter(|&i| i != chosen) {
                b = b.transition(&st, &format!("dec{}", base + other + 1), &st);
            }
        }
        base += clause.len();
    }
    Ok(InclusionInstance {
        a: a.build()?,
        src_a: Configuration::new(StateId(1), vec![0; k]),
        b: b.build()?,
        src_b: Configuration::new(StateId(1), vec![0; k]),
    })
}
