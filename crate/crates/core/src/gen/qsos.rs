use rand::Rng;

use super::GenError;

/// `∀M'₁ ⊆ M₁ ∃M'₂ ⊆ M₂ ⋯ Q_k M'_k ⊆ M_k. Σ ∼ T`, with `=` for even `k`
/// and `≠` for odd `k`. Sets are lists: equal numbers at different
/// positions are different elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QsosInstance {
    pub sets: Vec<Vec<u64>>,
    pub target: u64,
}

impl QsosInstance {
    /// Exhaustive evaluation over all subset choices.
    pub fn brute_force(&self) -> bool {
        fn go(q: &QsosInstance, level: usize, acc: u64) -> bool {
            let k = q.sets.len();
            if level == k {
                return if k.is_multiple_of(2) {
                    acc == q.target
                } else {
                    acc != q.target
                };
            }
            let set = &q.sets[level];
            let mut sums = (0u64..1 << set.len()).map(|mask| {
                let s: u64 = set
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v)
                    .sum();
                go(q, level + 1, acc + s)
            });
            if level.is_multiple_of(2) {
                sums.all(|b| b)
            } else {
                sums.any(|b| b)
            }
        }
        go(self, 0, 0)
    }
}

pub fn random_qsos2(rng: &mut impl Rng, max_size: usize, max_value: u64) -> QsosInstance {
    let mut set = || {
        (0..rng.gen_range(0..=max_size))
            .map(|_| rng.gen_range(0..=max_value))
            .collect::<Vec<_>>()
    };
    let (first, mut second) = (set(), set());
    if rng.gen_bool(0.3) {
        // M₂ ⊇ M₁ and T = ΣM₁ + s for a subset sum s of the rest: always true
        let s: u64 = second.iter().filter(|_| rng.gen_bool(0.5)).sum();
        second.extend(&first);
        let target = first.iter().sum::<u64>() + s;
        return QsosInstance {
            sets: vec![first, second],
            target,
        };
    }
    let sets = vec![first, second];
    let total: u64 = sets.iter().flatten().sum();
    let target = rng.gen_range(0..=total.max(1));
    QsosInstance { sets, target }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Literal {
    /// global variable index
    pub var: usize,
    pub positive: bool,
}

/// A prenex QBF in CNF. Blocks alternate starting with `∀` when the number
/// of blocks is even and with `∃` when it is odd, so the innermost block is
/// always existential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qbf {
    /// variables of each block, by global index `0..vars`
    pub blocks: Vec<Vec<usize>>,
    pub clauses: Vec<Vec<Literal>>,
}

impl Qbf {
    pub fn vars(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    fn universal(&self, block: usize) -> bool {
        (block + self.blocks.len()).is_multiple_of(2)
    }

    pub fn brute_force(&self) -> bool {
        fn go(f: &Qbf, block: usize, val: &mut Vec<bool>) -> bool {
            if block == f.blocks.len() {
                return f
                    .clauses
                    .iter()
                    .all(|c| c.iter().any(|l| val[l.var] == l.positive));
            }
            let vars = &f.blocks[block];
            let mut results = (0u64..1 << vars.len()).map(|mask| {
                for (i, &v) in vars.iter().enumerate() {
                    val[v] = mask >> i & 1 == 1;
                }
                go(f, block + 1, val)
            });
            if f.universal(block) {
                results.all(|b| b)
            } else {
                results.any(|b| b)
            }
        }
        let mut val = vec![false; self.vars()];
        go(self, 0, &mut val)
    }
}

/// Digit-encoded QSOS instance, base 10. Each number has one digit per
/// clause followed by one digit per variable.
///
/// With an even number of blocks the instance is true iff `φ` is; with an
/// odd number it is true iff `φ` is false.
pub fn qbf_to_qsos(f: &Qbf) -> Result<QsosInstance, GenError> {
    for (i, c) in f.clauses.iter().enumerate() {
        if c.len() != 3 {
            return Err(GenError::Arity(i + 1, c.len()));
        }
    }
    if f.blocks.is_empty() {
        return Err(GenError::Shape("no quantifier blocks".into()));
    }
    let n = f.vars();
    let mut seen = vec![false; n];
    for &v in f.blocks.iter().flatten() {
        if v >= n || seen[v] {
            return Err(GenError::Shape(format!(
                "variable {v} is not in exactly one block"
            )));
        }
        seen[v] = true;
    }
    let m = f.clauses.len();
    if m + n > 19 {
        return Err(GenError::Overflow);
    }
    // digit positions, most significant first: clauses 0..m, then variables
    let number = |digits: &[u64]| digits.iter().fold(0u64, |acc, &d| acc * 10 + d);
    let literal = |var: usize, positive: bool| {
        let mut digits = vec![0u64; m + n];
        for (l, c) in f.clauses.iter().enumerate() {
            digits[l] = c
                .iter()
                .filter(|lit| lit.var == var && lit.positive == positive)
                .count() as u64;
        }
        digits[m + var] = 1;
        number(&digits)
    };
    let mut sets: Vec<Vec<u64>> = f
        .blocks
        .iter()
        .map(|b| b.iter().map(|&v| literal(v, true)).collect())
        .collect();
    let last = sets.len() - 1;
    for v in 0..n {
        sets[last].push(literal(v, false));
    }
    for l in 0..m {
        for d in [1, 2] {
            let mut digits = vec![0u64; m + n];
            digits[l] = d;
            sets[last].push(number(&digits));
        }
    }
    let mut t = vec![4u64; m];
    t.extend(std::iter::repeat_n(1, n));
    Ok(QsosInstance {
        sets,
        target: number(&t),
    })
}
