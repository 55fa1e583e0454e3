//! Bounded model search: interval propagation over linear atoms with
//! first-fail branching. Natural variables range over `[0, bound]`, integer
//! variables over `[-bound, bound]`.

use std::collections::BTreeSet;

use super::{pull_exists, Assignment, Cmp, Formula, PaError, Sort, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundedSat {
    Found(Assignment),
    /// Nothing inside the box. Says nothing about larger values.
    NoneWithinBound,
}

impl BoundedSat {
    pub fn is_found(&self) -> bool {
        matches!(self, BoundedSat::Found(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedEnumeration {
    pub projection: Vec<Var>,
    /// values in the order of `projection`
    pub solutions: BTreeSet<Vec<i64>>,
    /// the limit was hit before the box was exhausted
    pub truncated: bool,
}

/// Searches for a model of an existential formula inside the bound box.
/// The returned assignment covers free and hoisted variables.
pub fn sat_bounded(f: &Formula, bound: u64) -> Result<BoundedSat, PaError> {
    let (_, body) = pull_exists(f)?;
    let mut p = Problem::compile(&body, bound, &[]);
    Ok(match p.first_solution() {
        Some(values) => {
            let a = p.assignment(&values);
            debug_assert_eq!(body.evaluate(&a), Ok(true));
            BoundedSat::Found(a)
        }
        None => BoundedSat::NoneWithinBound,
    })
}

/// All values of `projection` that extend to a model inside the bound box,
/// stopping after `limit` distinct projections.
pub fn enumerate_bounded(
    f: &Formula,
    bound: u64,
    projection: &[Var],
    limit: usize,
) -> Result<BoundedEnumeration, PaError> {
    let (_, body) = pull_exists(f)?;
    let mut p = Problem::compile(&body, bound, projection);
    let (solutions, truncated) = p.project_all(limit);
    Ok(BoundedEnumeration {
        projection: projection.to_vec(),
        solutions,
        truncated,
    })
}

/// `Σ cᵢxᵢ + c ≥ 0`
struct Lin {
    terms: Vec<(usize, i64)>,
    constant: i64,
}

#[derive(Clone, Copy)]
enum Node {
    Const(bool),
    Atom(usize),
    /// children are `kids[start..end]`
    And(usize, usize),
    Or(usize, usize),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tri {
    True,
    False,
    Unknown,
}

struct Conflict;

struct Problem {
    vars: Vec<Var>,
    atoms: Vec<Lin>,
    nodes: Vec<Node>,
    kids: Vec<usize>,
    root: usize,
    lo: Vec<i64>,
    hi: Vec<i64>,
    trail: Vec<(usize, i64, i64)>,
    /// indices of projected variables
    projected: Vec<usize>,
}

impl Problem {
    fn compile(body: &Formula, bound: u64, projection: &[Var]) -> Problem {
        let mut vars: Vec<Var> = body.free_vars().into_iter().collect();
        for v in projection {
            if !vars.iter().any(|w| w.name == v.name) {
                vars.push(v.clone());
            }
        }
        let b = bound as i64;
        let lo = vars
            .iter()
            .map(|v| if v.sort == Sort::Natural { 0 } else { -b })
            .collect();
        let hi = vec![b; vars.len()];
        let projected = projection
            .iter()
            .map(|v| vars.iter().position(|w| w.name == v.name).unwrap())
            .collect();
        let mut p = Problem {
            vars,
            atoms: Vec::new(),
            nodes: Vec::new(),
            kids: Vec::new(),
            root: 0,
            lo,
            hi,
            trail: Vec::new(),
            projected,
        };
        let canonical = body.canonical();
        p.root = p.nnf(&canonical, true);
        p
    }

    fn index(&self, v: &Var) -> usize {
        self.vars
            .iter()
            .position(|w| w.name == v.name)
            .expect("free variable collected")
    }

    fn push(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn group(&mut self, conjunction: bool, kids: Vec<usize>) -> usize {
        let start = self.kids.len();
        self.kids.extend(kids);
        let end = self.kids.len();
        self.push(if conjunction {
            Node::And(start, end)
        } else {
            Node::Or(start, end)
        })
    }

    fn nnf(&mut self, f: &Formula, positive: bool) -> usize {
        match f {
            Formula::True => self.push(Node::Const(positive)),
            Formula::False => self.push(Node::Const(!positive)),
            Formula::Atom(a) => {
                debug_assert_eq!(a.cmp, Cmp::Ge);
                let mut terms: Vec<(usize, i64)> = a
                    .expr
                    .terms
                    .iter()
                    .map(|(v, &c)| (self.index(v), c))
                    .collect();
                let mut constant = a.expr.constant;
                if !positive {
                    terms.iter_mut().for_each(|t| t.1 = -t.1);
                    constant = -constant - 1;
                }
                self.atoms.push(Lin { terms, constant });
                let id = self.atoms.len() - 1;
                self.push(Node::Atom(id))
            }
            Formula::Not(g) => self.nnf(g, !positive),
            Formula::And(fs) | Formula::Or(fs) => {
                let kids: Vec<usize> = fs.iter().map(|g| self.nnf(g, positive)).collect();
                self.group(matches!(f, Formula::And(_)) == positive, kids)
            }
            Formula::Implies(a, b) => {
                let x = self.nnf(a, !positive);
                let y = self.nnf(b, positive);
                self.group(!positive, vec![x, y])
            }
            Formula::Exists(..) | Formula::Forall(..) => unreachable!("body is quantifier-free"),
        }
    }

    fn range(&self, atom: usize) -> (i128, i128) {
        let a = &self.atoms[atom];
        let (mut min, mut max) = (a.constant as i128, a.constant as i128);
        for &(v, c) in &a.terms {
            let (x, y) = (
                c as i128 * self.lo[v] as i128,
                c as i128 * self.hi[v] as i128,
            );
            min += x.min(y);
            max += x.max(y);
        }
        (min, max)
    }

    fn status(&self, node: usize) -> Tri {
        match self.nodes[node] {
            Node::Const(b) => {
                if b {
                    Tri::True
                } else {
                    Tri::False
                }
            }
            Node::Atom(a) => {
                let (min, max) = self.range(a);
                if min >= 0 {
                    Tri::True
                } else if max < 0 {
                    Tri::False
                } else {
                    Tri::Unknown
                }
            }
            Node::And(s, e) => {
                let mut all = true;
                for &k in &self.kids[s..e] {
                    match self.status(k) {
                        Tri::False => return Tri::False,
                        Tri::Unknown => all = false,
                        Tri::True => {}
                    }
                }
                if all {
                    Tri::True
                } else {
                    Tri::Unknown
                }
            }
            Node::Or(s, e) => {
                let mut none = true;
                for &k in &self.kids[s..e] {
                    match self.status(k) {
                        Tri::True => return Tri::True,
                        Tri::Unknown => none = false,
                        Tri::False => {}
                    }
                }
                if none {
                    Tri::False
                } else {
                    Tri::Unknown
                }
            }
        }
    }

    fn tighten(&mut self, v: usize, lo: i64, hi: i64, changed: &mut bool) -> Result<(), Conflict> {
        let (nl, nh) = (self.lo[v].max(lo), self.hi[v].min(hi));
        if nl > nh {
            return Err(Conflict);
        }
        if nl != self.lo[v] || nh != self.hi[v] {
            self.trail.push((v, self.lo[v], self.hi[v]));
            self.lo[v] = nl;
            self.hi[v] = nh;
            *changed = true;
        }
        Ok(())
    }

    fn propagate_atom(&mut self, atom: usize, changed: &mut bool) -> Result<(), Conflict> {
        let (min, max) = self.range(atom);
        if max < 0 {
            return Err(Conflict);
        }
        if min >= 0 {
            return Ok(());
        }
        for i in 0..self.atoms[atom].terms.len() {
            let (v, c) = self.atoms[atom].terms[i];
            let (x, y) = (
                c as i128 * self.lo[v] as i128,
                c as i128 * self.hi[v] as i128,
            );
            let rest = max - x.max(y);
            // c·v ≥ -rest
            let c = c as i128;
            if c > 0 {
                let need = div_ceil(-rest, c);
                if need > self.lo[v] as i128 {
                    let need = need.min(i64::MAX as i128) as i64;
                    self.tighten(v, need, i64::MAX, changed)?;
                }
            } else {
                let cap = div_floor(rest, -c);
                if cap < self.hi[v] as i128 {
                    let cap = cap.max(i64::MIN as i128) as i64;
                    self.tighten(v, i64::MIN, cap, changed)?;
                }
            }
        }
        Ok(())
    }

    fn propagate_node(&mut self, node: usize, changed: &mut bool) -> Result<(), Conflict> {
        match self.nodes[node] {
            Node::Const(true) => Ok(()),
            Node::Const(false) => Err(Conflict),
            Node::Atom(a) => self.propagate_atom(a, changed),
            Node::And(s, e) => {
                for i in s..e {
                    self.propagate_node(self.kids[i], changed)?;
                }
                Ok(())
            }
            Node::Or(s, e) => {
                let mut open = None;
                for &k in &self.kids[s..e] {
                    match self.status(k) {
                        Tri::True => return Ok(()),
                        Tri::False => {}
                        Tri::Unknown => {
                            if open.is_some() {
                                return Ok(());
                            }
                            open = Some(k);
                        }
                    }
                }
                match open {
                    Some(k) => self.propagate_node(k, changed),
                    None => Err(Conflict),
                }
            }
        }
    }

    fn propagate(&mut self) -> Result<(), Conflict> {
        loop {
            let mut changed = false;
            self.propagate_node(self.root, &mut changed)?;
            if !changed {
                return Ok(());
            }
        }
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, l, h) = self.trail.pop().unwrap();
            self.lo[v] = l;
            self.hi[v] = h;
        }
    }

    fn pick(&self) -> Option<usize> {
        (0..self.vars.len())
            .filter(|&v| self.lo[v] < self.hi[v])
            .min_by_key(|&v| (self.hi[v] as i128 - self.lo[v] as i128, v))
    }

    /// Domain splits for `v`: single values for small domains, halves otherwise.
    fn branches(&self, v: usize) -> Vec<(i64, i64)> {
        let (lo, hi) = (self.lo[v], self.hi[v]);
        if (hi as i128 - lo as i128) < 16 {
            (lo..=hi).map(|x| (x, x)).collect()
        } else {
            let mid = ((lo as i128 + hi as i128).div_euclid(2)) as i64;
            vec![(lo, mid), (mid + 1, hi)]
        }
    }

    fn solve(&mut self) -> Option<Vec<i64>> {
        let mark = self.trail.len();
        if self.propagate().is_err() {
            self.undo(mark);
            return None;
        }
        let Some(v) = self.pick() else {
            let found = (self.status(self.root) == Tri::True).then(|| self.lo.clone());
            self.undo(mark);
            return found;
        };
        for (l, h) in self.branches(v) {
            let inner = self.trail.len();
            let mut changed = false;
            if self.tighten(v, l, h, &mut changed).is_ok() {
                if let Some(sol) = self.solve() {
                    self.undo(mark);
                    return Some(sol);
                }
            }
            self.undo(inner);
        }
        self.undo(mark);
        None
    }

    fn first_solution(&mut self) -> Option<Vec<i64>> {
        self.solve()
    }

    fn project_all(&mut self, limit: usize) -> (BTreeSet<Vec<i64>>, bool) {
        let mut out = BTreeSet::new();
        let truncated = self.project(&mut out, limit);
        (out, truncated)
    }

    /// Branches first-fail on all variables; once the projected ones are
    /// fixed, checks that the rest extends and prunes repeats. Returns `true` when the limit stopped it.
    fn project(&mut self, out: &mut BTreeSet<Vec<i64>>, limit: usize) -> bool {
        let mark = self.trail.len();
        if self.propagate().is_err() {
            self.undo(mark);
            return false;
        }
        if self.projected.iter().all(|&v| self.lo[v] == self.hi[v]) {
            let key: Vec<i64> = self.projected.iter().map(|&v| self.lo[v]).collect();
            if !out.contains(&key) && self.solve().is_some() {
                out.insert(key);
            }
            self.undo(mark);
            return out.len() >= limit;
        }
        let v = self.pick().expect("some projected variable is open");
        for (l, h) in self.branches(v) {
            let inner = self.trail.len();
            let mut changed = false;
            if self.tighten(v, l, h, &mut changed).is_ok() && self.project(out, limit) {
                self.undo(mark);
                return true;
            }
            self.undo(inner);
        }
        self.undo(mark);
        false
    }

    fn assignment(&self, values: &[i64]) -> Assignment {
        self.vars
            .iter()
            .zip(values)
            .map(|(v, &x)| (v.name.clone(), x))
            .collect()
    }
}

fn div_floor(a: i128, b: i128) -> i128 {
    a.div_euclid(b)
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -((-a).div_euclid(b))
}
