use rand::Rng;

use crate::model::{Configuration, Machine, MachineClass, StateId, Transform, Vector};
use crate::pa::{and, eq, exists, forall, ne, or, Formula, LinExpr, Var};

use super::{GenError, InclusionInstance, QsosInstance, ReachInstance};

/// `A x = b` over `x ≥ 0`, with `A` given by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub a: Vec<Vec<i64>>,
    pub b: Vec<i64>,
}

impl LinearSystem {
    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn cols(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.a.iter().map(|row| row[j]).collect()
    }

    fn check(&self) -> Result<(), GenError> {
        if self.a.is_empty() || self.b.len() != self.a.len() {
            return Err(GenError::Shape("need one right-hand side per row".into()));
        }
        if self.a.iter().any(|r| r.len() != self.cols()) || self.cols() == 0 {
            return Err(GenError::Shape("ragged or empty matrix".into()));
        }
        Ok(())
    }

    /// The least solution (lexicographically) with every `x_j ≤ bound`.
    pub fn brute_force(&self, bound: u64) -> Option<Vec<u64>> {
        let n = self.cols();
        let mut x = vec![0u64; n];
        loop {
            let ok =
                self.a.iter().zip(&self.b).all(|(row, &b)| {
                    row.iter().zip(&x).map(|(&c, &v)| c * v as i64).sum::<i64>() == b
                });
            if ok {
                return Some(x);
            }
            let mut j = n;
            loop {
                if j == 0 {
                    return None;
                }
                j -= 1;
                if x[j] < bound {
                    x[j] += 1;
                    break;
                }
                x[j] = 0;
            }
        }
    }
}

pub fn random_linear_system(
    rng: &mut impl Rng,
    max_rows: usize,
    max_cols: usize,
    max_abs: i64,
) -> LinearSystem {
    let m = rng.gen_range(1..=max_rows);
    let n = rng.gen_range(1..=max_cols);
    let a = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(-max_abs..=max_abs)).collect())
        .collect();
    let b = (0..m).map(|_| rng.gen_range(-max_abs..=max_abs)).collect();
    LinearSystem { a, b }
}

fn vas(name: &str, state: &str, columns: Vec<Vec<i64>>, letter: &str) -> Result<Machine, GenError> {
    let dim = columns.first().map_or(1, Vec::len);
    let mut b = Machine::builder(name, MachineClass::Zvas, dim).state(state);
    for (j, col) in columns.into_iter().enumerate() {
        let l = format!("{letter}{}", j + 1);
        b = b
            .letter(l.clone(), Transform::Add(Vector(col)))
            .transition(state, &l, state);
    }
    Ok(b.build()?)
}

/// One state with a self-loop adding each column: `q(0) →* q(b)` iff the
/// system has a solution.
pub fn diophantine_to_zvas(s: &LinearSystem) -> Result<ReachInstance, GenError> {
    s.check()?;
    let cols = (0..s.cols()).map(|j| s.column(j)).collect();
    let machine = vas("diophantine", "q", cols, "a")?;
    Ok(ReachInstance {
        src: Configuration::new(StateId(1), vec![0; s.rows()]),
        dst: Configuration::new(StateId(1), s.b.clone()),
        machine,
    })
}

/// `∀x₁ ∃x₂ ⋯ Q_k x_k. A₁x₁ + ⋯ + A_k x_k ∼ c` over naturals, where `∼`
/// is `=` for even `k` and `≠` for odd `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qslde {
    /// `A_i` by rows; all share the row count of `c`
    pub blocks: Vec<Vec<Vec<i64>>>,
    pub c: Vec<i64>,
}

impl Qslde {
    pub fn var(block: usize, col: usize) -> Var {
        Var::nat(format!("x{}_{}", block + 1, col + 1))
    }

    fn block_cols(&self, i: usize) -> usize {
        self.blocks[i].first().map_or(0, Vec::len)
    }

    fn check(&self) -> Result<(), GenError> {
        for (i, blk) in self.blocks.iter().enumerate() {
            if blk.len() != self.c.len() || blk.iter().any(|r| r.len() != self.block_cols(i)) {
                return Err(GenError::Shape(format!("block {} does not match c", i + 1)));
            }
        }
        if self.blocks.is_empty() {
            return Err(GenError::Shape("no quantifier blocks".into()));
        }
        Ok(())
    }

    pub fn to_formula(&self) -> Result<Formula, GenError> {
        self.check()?;
        let k = self.blocks.len();
        let rows: Vec<(LinExpr, i64)> = (0..self.c.len())
            .map(|r| {
                let e = LinExpr::sum((0..k).flat_map(|i| {
                    (0..self.block_cols(i))
                        .map(move |j| LinExpr::term(self.blocks[i][r][j], Qslde::var(i, j)))
                }));
                (e, self.c[r])
            })
            .collect();
        let mut f = if k.is_multiple_of(2) {
            and(rows.into_iter().map(|(e, c)| eq(e, c)))
        } else {
            or(rows.into_iter().map(|(e, c)| ne(e, c)))
        };
        for i in (0..k).rev() {
            let vs: Vec<Var> = (0..self.block_cols(i)).map(|j| Qslde::var(i, j)).collect();
            f = if i % 2 == 0 {
                forall(vs, f)
            } else {
                exists(vs, f)
            };
        }
        Ok(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    Binary,
    Unary,
}

/// Column-wise builder for a two-block system.
struct Columns {
    rows: usize,
    cols: Vec<Vec<i64>>,
}

impl Columns {
    fn new(rows: usize) -> Self {
        Columns {
            rows,
            cols: Vec::new(),
        }
    }

    fn push(&mut self, entries: &[(usize, i64)]) {
        let mut col = vec![0; self.rows];
        for &(r, v) in entries {
            col[r] += v;
        }
        self.cols.push(col);
    }

    fn into_rows(self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|r| self.cols.iter().map(|c| c[r]).collect())
            .collect()
    }
}

/// Selector `x`, complement `x̄` and digit variables `x_0..x_q` with
/// `x_j − 2x_{j+1} − digit(j)·x = 0`; `x_0` lands in the value row.
fn digit_chain(
    b: &mut Columns,
    digit: impl Fn(usize) -> i64,
    bits: usize,
    compl: usize,
    first: usize,
    extra: &[(usize, i64)],
) {
    let mut sel = vec![(compl, 1)];
    sel.extend_from_slice(extra);
    sel.extend((0..bits).map(|j| (first + j, -digit(j))));
    b.push(&sel);
    b.push(&[(compl, 1)]);
    for j in 0..bits {
        let mut col = vec![(first + j, 1)];
        col.push(if j == 0 { (0, 1) } else { (first + j - 1, -2) });
        b.push(&col);
    }
}

fn as_i64(v: u64) -> Result<i64, GenError> {
    i64::try_from(v).map_err(|_| GenError::Overflow)
}

/// A `Π₂` system valid iff the QSOS₂ instance is true. The universal
/// variables only contribute their parity, which makes the reduction
/// correct over all of `ℕ`.
pub fn qsos2_to_qslde(q: &QsosInstance, encoding: Encoding) -> Result<Qslde, GenError> {
    if q.sets.len() != 2 {
        return Err(GenError::Shape("QSOS₂ needs exactly two sets".into()));
    }
    let (ms, ns) = (&q.sets[0], &q.sets[1]);
    let (p, r) = (ms.len(), ns.len());
    let t = as_i64(q.target)?;
    match encoding {
        Encoding::Binary => {
            // rows: value, parity(p), complement(p), complement(r)
            let rows = 1 + 2 * p + r;
            let (par, cx, cy) = (1, 1 + p, 1 + 2 * p);
            let mut a = Columns::new(rows);
            let mut b = Columns::new(rows);
            for (i, &m) in ms.iter().enumerate() {
                let m = as_i64(m)?;
                a.push(&[(0, m), (par + i, 1)]);
                b.push(&[(0, -2 * m), (par + i, -2)]);
                b.push(&[(par + i, -1), (cx + i, 1)]);
                b.push(&[(cx + i, 1)]);
            }
            for (j, &n) in ns.iter().enumerate() {
                b.push(&[(0, as_i64(n)?), (cy + j, 1)]);
                b.push(&[(cy + j, 1)]);
            }
            let mut c = vec![0; rows];
            c[0] = t;
            c[cx..].iter_mut().for_each(|v| *v = 1);
            Ok(Qslde {
                blocks: vec![a.into_rows(), b.into_rows()],
                c,
            })
        }
        Encoding::Unary => {
            let max = ms.iter().chain(ns).copied().max().unwrap_or(0);
            let q1 = (64 - max.leading_zeros()).max(1) as usize;
            let bit = |v: u64, j: usize| ((v >> j) & 1) as i64;
            // rows: value; per universal element: parity, complement, q1 digit rows;
            // per existential element: complement, q1 digit rows
            let rows = 1 + p * (q1 + 2) + r * (q1 + 1);
            let mut a = Columns::new(rows);
            let mut b = Columns::new(rows);
            let mut row = 1;
            for &m in ms {
                let (parity, compl) = (row, row + 1);
                a.push(&[(parity, 1)]);
                b.push(&[(parity, -2)]);
                digit_chain(&mut b, |j| bit(m, j), q1, compl, row + 2, &[(parity, -1)]);
                row += 2 + q1;
            }
            for &n in ns {
                digit_chain(&mut b, |j| bit(n, j), q1, row, row + 1, &[]);
                row += 1 + q1;
            }
            debug_assert_eq!(row, rows);
            let mut c = vec![0; rows];
            c[0] = t;
            let mut r0 = 1;
            for _ in 0..p {
                c[r0 + 1] = 1;
                r0 += 2 + q1;
            }
            for _ in 0..r {
                c[r0] = 1;
                r0 += 1 + q1;
            }
            Ok(Qslde {
                blocks: vec![a.into_rows(), b.into_rows()],
                c,
            })
        }
    }
}

/// The binary construction exactly as printed: `A = [m; I_p; 0]`,
/// `B = [n 0 0; 0 I_p 0; I_r 0 I_r]`, `c = (T, 1, …, 1)`.
pub fn qsos2_to_qslde_printed(q: &QsosInstance) -> Result<Qslde, GenError> {
    if q.sets.len() != 2 {
        return Err(GenError::Shape("QSOS₂ needs exactly two sets".into()));
    }
    let (ms, ns) = (&q.sets[0], &q.sets[1]);
    let (p, r) = (ms.len(), ns.len());
    let rows = 1 + p + r;
    let mut a = Columns::new(rows);
    for (i, &m) in ms.iter().enumerate() {
        a.push(&[(0, as_i64(m)?), (1 + i, 1)]);
    }
    let mut b = Columns::new(rows);
    for (j, &n) in ns.iter().enumerate() {
        b.push(&[(0, as_i64(n)?), (1 + p + j, 1)]);
    }
    for i in 0..p {
        b.push(&[(1 + i, 1)]);
    }
    for j in 0..r {
        b.push(&[(1 + p + j, 1)]);
    }
    let mut c = vec![1; rows];
    c[0] = as_i64(q.target)?;
    Ok(Qslde {
        blocks: vec![a.into_rows(), b.into_rows()],
        c,
    })
}

/// `A` loops on `−a_j` from `q(c)`, `B` loops on `b_j` from `p(0)`:
/// `reach(A) = {c − A₁x}` is contained in `reach(B) = {A₂y}` iff the system
/// is valid.
pub fn qslde_to_zvas_inclusion(s: &Qslde) -> Result<InclusionInstance, GenError> {
    s.check()?;
    if s.blocks.len() != 2 {
        return Err(GenError::Shape("inclusion needs a two-block system".into()));
    }
    let d = s.c.len();
    let neg_cols: Vec<Vec<i64>> = (0..s.block_cols(0))
        .map(|j| s.blocks[0].iter().map(|row| -row[j]).collect())
        .collect();
    let cols: Vec<Vec<i64>> = (0..s.block_cols(1))
        .map(|j| s.blocks[1].iter().map(|row| row[j]).collect())
        .collect();
    let with_dim = |cols: Vec<Vec<i64>>| {
        if cols.is_empty() {
            vec![vec![0; d]]
        } else {
            cols
        }
    };
    Ok(InclusionInstance {
        a: vas("A", "q", with_dim(neg_cols), "a")?,
        src_a: Configuration::new(StateId(1), s.c.clone()),
        b: vas("B", "p", with_dim(cols), "b")?,
        src_b: Configuration::new(StateId(1), vec![0; d]),
    })
}
