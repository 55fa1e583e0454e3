//! Generalized Parikh images over a monitored alphabet `Σ ⊎ R`.
//!
//! A word is cut at the last occurrence of each monitored letter. The image
//! records the Parikh vector (over `Σ`) of every piece and the order `σ` in
//! which those last occurrences appear; monitored letters that never occur
//! are "dummies" and fill the first `p` positions of `σ`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{LetterId, Machine, Vector};

/// Largest `k` for which [`gpi_set`] enumerates dummy permutations.
pub const DEFAULT_MAX_MONITORED: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParikhError {
    #[error("{k} monitored letters exceed the enumeration bound {bound}")]
    BoundExceeded { k: usize, bound: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("symbol outside the alphabet: {0}")]
    BadSymbol(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    /// `a_i`, 1-based
    Plain(usize),
    /// `r_i`, 1-based
    Monitored(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonitoredWord {
    n: usize,
    k: usize,
    symbols: Vec<Symbol>,
}

impl MonitoredWord {
    pub fn new(n: usize, k: usize, symbols: Vec<Symbol>) -> Result<Self, ParikhError> {
        for s in &symbols {
            let ok = match *s {
                Symbol::Plain(i) => (1..=n).contains(&i),
                Symbol::Monitored(i) => (1..=k).contains(&i),
            };
            if !ok {
                return Err(ParikhError::BadSymbol(format!("{s:?} with n={n}, k={k}")));
            }
        }
        Ok(MonitoredWord { n, k, symbols })
    }

    /// A machine word: letters `1..=n` are plain, `n+1..=n+k` monitored.
    pub fn from_letters(m: &Machine, word: &[LetterId]) -> Result<Self, ParikhError> {
        let n = m.num_plain();
        let symbols = word
            .iter()
            .map(|a| {
                let a = a.0 as usize;
                if a <= n {
                    Symbol::Plain(a)
                } else {
                    Symbol::Monitored(a - n)
                }
            })
            .collect();
        Self::new(n, m.num_monitored(), symbols)
    }

    /// Parses whitespace-separated tokens: `a`.. as plain letters in
    /// alphabetical order, `r1`.. as monitored letters.
    pub fn parse(n: usize, k: usize, text: &str) -> Result<Self, ParikhError> {
        let mut symbols = Vec::new();
        for tok in text.split_whitespace() {
            if let Some(i) = tok.strip_prefix('r').and_then(|d| d.parse::<usize>().ok()) {
                symbols.push(Symbol::Monitored(i));
            } else if tok.len() == 1 && tok.as_bytes()[0].is_ascii_lowercase() {
                symbols.push(Symbol::Plain((tok.as_bytes()[0] - b'a') as usize + 1));
            } else {
                return Err(ParikhError::BadSymbol(tok.to_string()));
            }
        }
        Self::new(n, k, symbols)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `π_Σ` of a slice.
    fn parikh(&self, part: &[Symbol]) -> Vec<u64> {
        let mut v = vec![0; self.n];
        for s in part {
            if let Symbol::Plain(i) = s {
                v[i - 1] += 1;
            }
        }
        v
    }

    /// Positions of the last occurrence of each occurring monitored letter,
    /// ordered by position: `(position, letter)`.
    fn last_occurrences(&self) -> Vec<(usize, usize)> {
        let mut last = vec![None; self.k];
        for (pos, s) in self.symbols.iter().enumerate() {
            if let Symbol::Monitored(i) = s {
                last[i - 1] = Some(pos);
            }
        }
        let mut out: Vec<(usize, usize)> = last
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (p, i + 1)))
            .collect();
        out.sort_unstable();
        out
    }
}

impl fmt::Display for MonitoredWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.symbols.is_empty() {
            return f.write_str("ε");
        }
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match s {
                Symbol::Plain(a) if *a <= 26 => write!(f, "{}", (b'a' + *a as u8 - 1) as char)?,
                Symbol::Plain(a) => write!(f, "a{a}")?,
                Symbol::Monitored(r) => write!(f, "r{r}")?,
            }
        }
        Ok(())
    }
}

/// `γ = γ_p r_σ(p+1) γ_{p+1} ⋯ r_σ(k) γ_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub p: usize,
    /// `sigma[i-1] = σ(i)`
    pub sigma: Vec<usize>,
    /// `segments[i] = γ_i`; empty for `i < p`
    pub segments: Vec<Vec<Symbol>>,
}

/// `(α_0, …, α_k, σ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneralizedParikhImage {
    /// `alpha[i]` is `α_i ∈ ℕⁿ`
    pub alpha: Vec<Vec<u64>>,
    /// `sigma[i-1] = σ(i)`
    pub sigma: Vec<usize>,
}

impl GeneralizedParikhImage {
    pub fn k(&self) -> usize {
        self.sigma.len()
    }
}

/// The canonical decomposition: dummies take positions `1..=p` in
/// ascending letter order.
pub fn decompose(word: &MonitoredWord) -> Decomposition {
    let k = word.k;
    let lasts = word.last_occurrences();
    let p = k - lasts.len();
    let occurring: BTreeSet<usize> = lasts.iter().map(|&(_, r)| r).collect();
    let mut sigma: Vec<usize> = (1..=k).filter(|r| !occurring.contains(r)).collect();
    sigma.extend(lasts.iter().map(|&(_, r)| r));

    let mut segments = vec![Vec::new(); k + 1];
    let mut start = 0;
    for (j, &(pos, _)) in lasts.iter().enumerate() {
        segments[p + j] = word.symbols[start..pos].to_vec();
        start = pos + 1;
    }
    segments[k] = word.symbols[start..].to_vec();
    Decomposition { p, sigma, segments }
}

impl Decomposition {
    pub fn image(&self, word: &MonitoredWord) -> GeneralizedParikhImage {
        GeneralizedParikhImage {
            alpha: self.segments.iter().map(|s| word.parikh(s)).collect(),
            sigma: self.sigma.clone(),
        }
    }
}

/// All generalized Parikh images of `word`. Members differ only in the order
/// of the dummy letters, so there are exactly `p!` of them.
pub fn gpi_set(
    word: &MonitoredWord,
    max_k: usize,
) -> Result<BTreeSet<GeneralizedParikhImage>, ParikhError> {
    if word.k > max_k {
        return Err(ParikhError::BoundExceeded {
            k: word.k,
            bound: max_k,
        });
    }
    let canonical = decompose(word).image(word);
    let p = canonical.k() - word.last_occurrences().len();
    let mut out = BTreeSet::new();
    for perm in permutations(&canonical.sigma[..p]) {
        let mut g = canonical.clone();
        g.sigma[..p].copy_from_slice(&perm);
        out.insert(g);
    }
    Ok(out)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Whether `g` is a generalized Parikh image of `word`.
///
/// For a given `p` and `σ` the decomposition is forced: the separators must
/// be the last occurrences of `r_σ(p+1), …, r_σ(k)` in that order and the
/// letters `r_σ(1), …, r_σ(p)` must not occur at all.
pub fn is_gpi(word: &MonitoredWord, g: &GeneralizedParikhImage) -> bool {
    let k = word.k;
    if g.sigma.len() != k || g.alpha.len() != k + 1 || g.alpha.iter().any(|a| a.len() != word.n) {
        return false;
    }
    let mut seen = vec![false; k];
    for &s in &g.sigma {
        if s == 0 || s > k || std::mem::replace(&mut seen[s - 1], true) {
            return false;
        }
    }
    let lasts = word.last_occurrences();
    let p = k - lasts.len();
    if g.sigma[p..].iter().zip(&lasts).any(|(&s, &(_, r))| s != r) {
        return false;
    }
    let d = Decomposition {
        p,
        sigma: g.sigma.clone(),
        segments: decompose(word).segments,
    };
    d.image(word) == *g
}

/// `B ∈ ℤ^{d×n}`: column `i` is the addition vector of plain letter `a_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectMatrix {
    rows: usize,
    /// column-major: `columns[a]` has length `rows`
    columns: Vec<Vec<i64>>,
}

impl EffectMatrix {
    pub fn from_columns(rows: usize, columns: Vec<Vec<i64>>) -> Result<Self, ParikhError> {
        if columns.iter().any(|c| c.len() != rows) {
            return Err(ParikhError::DimensionMismatch(
                "column length differs from rows".into(),
            ));
        }
        Ok(EffectMatrix { rows, columns })
    }

    /// The matrix of a normal-form machine.
    pub fn from_machine(m: &Machine) -> Result<Self, ParikhError> {
        let mut columns = Vec::new();
        for a in m.letters().filter(|&a| !m.is_monitored(a)) {
            match m.effect(a) {
                crate::model::Transform::Add(b) => columns.push(b.0.clone()),
                _ => {
                    return Err(ParikhError::DimensionMismatch(format!(
                        "letter `{}` is not a pure addition",
                        m.letter(a).name
                    )))
                }
            }
        }
        Ok(EffectMatrix {
            rows: m.dim(),
            columns,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    /// `B[i][a]`, 1-based.
    pub fn entry(&self, i: usize, a: usize) -> i64 {
        self.columns[a - 1][i - 1]
    }

    /// `Bα`
    pub fn mul(&self, alpha: &[u64]) -> Vec<i64> {
        let mut out = vec![0; self.rows];
        for (col, &x) in self.columns.iter().zip(alpha) {
            for (o, b) in out.iter_mut().zip(col) {
                *o += b * x as i64;
            }
        }
        out
    }
}

/// `τ(γ)(0) = Σ_{1≤i≤d} (Bα_{i−1})|{σ(i),…,σ(d)} + Bα_d` for `k = d`.
pub fn effect(g: &GeneralizedParikhImage, b: &EffectMatrix) -> Result<Vector, ParikhError> {
    let d = b.rows();
    if g.k() != d {
        return Err(ParikhError::DimensionMismatch(format!(
            "k = {} but d = {d}",
            g.k()
        )));
    }
    if g.alpha.iter().any(|a| a.len() != b.cols()) {
        return Err(ParikhError::DimensionMismatch(
            "α length differs from n".into(),
        ));
    }
    let mut total = Vector(b.mul(&g.alpha[d]));
    for i in 1..=d {
        let part = Vector(b.mul(&g.alpha[i - 1])).reset(g.sigma[i - 1..].iter().copied());
        total = total.checked_add(&part).expect("same dimension");
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Configuration, MachineClass, StateId, Transform};
    use proptest::prelude::*;

    fn sample_word() -> MonitoredWord {
        MonitoredWord::parse(2, 4, "a a b r1 b r3 a b r3 a r1").unwrap()
    }

    #[test]
    fn decompose_running_example() {
        let w = sample_word();
        let d = decompose(&w);
        assert_eq!(d.p, 2);
        assert_eq!(d.sigma[2], 3);
        assert_eq!(d.sigma[3], 1);
        let show = |s: &Vec<Symbol>| MonitoredWord::new(2, 4, s.clone()).unwrap().to_string();
        assert_eq!(show(&d.segments[2]), "a a b r1 b r3 a b");
        assert_eq!(show(&d.segments[3]), "a");
        assert_eq!(show(&d.segments[4]), "ε");
    }

    #[test]
    fn decompose_trivial_words() {
        let d = decompose(&MonitoredWord::parse(1, 2, "").unwrap());
        assert_eq!(d.p, 2);
        assert!(d.segments.iter().all(Vec::is_empty));
        let d = decompose(&MonitoredWord::parse(1, 1, "r1").unwrap());
        assert_eq!((d.p, d.sigma.clone()), (0, vec![1]));
        assert!(d.segments[0].is_empty() && d.segments[1].is_empty());
    }

    #[test]
    fn running_example_has_two_images() {
        let w = sample_word();
        let set = gpi_set(&w, DEFAULT_MAX_MONITORED).unwrap();
        assert_eq!(set.len(), 2);
        for g in &set {
            assert_eq!(
                g.alpha,
                vec![vec![0, 0], vec![0, 0], vec![3, 3], vec![1, 0], vec![0, 0]]
            );
            assert_eq!((g.sigma[2], g.sigma[3]), (3, 1));
            assert!(is_gpi(&w, g));
        }
        let dummies: BTreeSet<Vec<usize>> = set.iter().map(|g| g.sigma[..2].to_vec()).collect();
        assert_eq!(dummies, BTreeSet::from([vec![2, 4], vec![4, 2]]));

        let mut swapped = set.iter().next().unwrap().clone();
        swapped.alpha.swap(2, 3);
        assert!(!is_gpi(&w, &swapped));
    }

    #[test]
    fn plain_parikh_image_when_k_is_zero() {
        let w = MonitoredWord::parse(2, 0, "a b").unwrap();
        let set = gpi_set(&w, DEFAULT_MAX_MONITORED).unwrap();
        assert_eq!(
            set.into_iter().collect::<Vec<_>>(),
            vec![GeneralizedParikhImage {
                alpha: vec![vec![1, 1]],
                sigma: vec![]
            }]
        );
    }

    #[test]
    fn empty_word_accepts_any_permutation() {
        let w = MonitoredWord::parse(1, 2, "").unwrap();
        for sigma in [vec![1, 2], vec![2, 1]] {
            let g = GeneralizedParikhImage {
                alpha: vec![vec![0]; 3],
                sigma,
            };
            assert!(is_gpi(&w, &g));
        }
    }

    #[test]
    fn bound_is_enforced() {
        let w = MonitoredWord::parse(1, 7, "").unwrap();
        assert!(matches!(
            gpi_set(&w, 6),
            Err(ParikhError::BoundExceeded { .. })
        ));
    }

    #[test]
    fn effect_examples() {
        // d = k = 1, B = [1], γ = a r1 a
        let b = EffectMatrix::from_columns(1, vec![vec![1]]).unwrap();
        let g = GeneralizedParikhImage {
            alpha: vec![vec![1], vec![1]],
            sigma: vec![1],
        };
        assert_eq!(effect(&g, &b).unwrap(), Vector(vec![1]));
        let zero = GeneralizedParikhImage {
            alpha: vec![vec![0], vec![0]],
            sigma: vec![1],
        };
        assert_eq!(effect(&zero, &b).unwrap(), Vector(vec![0]));

        // d = k = 2, B = I, γ = a b r1 a
        let b = EffectMatrix::from_columns(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let w = MonitoredWord::parse(2, 2, "a b r1 a").unwrap();
        let set = gpi_set(&w, 6).unwrap();
        assert_eq!(set.len(), 1);
        let g = set.into_iter().next().unwrap();
        assert_eq!(g.alpha, vec![vec![0, 0], vec![1, 1], vec![1, 0]]);
        assert_eq!(g.sigma, vec![2, 1]);
        assert_eq!(effect(&g, &b).unwrap(), Vector(vec![1, 1]));
        let m = Machine::builder("m", MachineClass::Zvassr, 2)
            .state("q")
            .letter("a", Transform::Add(Vector(vec![1, 0])))
            .letter("b", Transform::Add(Vector(vec![0, 1])))
            .build()
            .unwrap();
        let word = crate::model::parse_word(&m, "a b r1 a").unwrap();
        assert_eq!(
            m.word_effect(&word, &Vector::zeros(2)).unwrap(),
            Vector(vec![1, 1])
        );

        let bad = GeneralizedParikhImage {
            alpha: vec![vec![0, 0]; 2],
            sigma: vec![1],
        };
        assert!(effect(&bad, &b).is_err());
    }

    fn word_strategy(n: usize, k: usize, max_len: usize) -> impl Strategy<Value = MonitoredWord> {
        let sym = prop_oneof![
            (1..=n).prop_map(Symbol::Plain),
            (1..=k.max(1)).prop_map(move |i| if k == 0 {
                Symbol::Plain(1)
            } else {
                Symbol::Monitored(i)
            }),
        ];
        proptest::collection::vec(sym, 0..=max_len)
            .prop_map(move |s| MonitoredWord::new(n, k, s).unwrap())
    }

    fn all_alphas(n: usize, k: usize, max: u64) -> Vec<Vec<Vec<u64>>> {
        let flat = n * (k + 1);
        let mut out = Vec::new();
        let mut cur = vec![0u64; flat];
        loop {
            out.push(cur.chunks(n).map(|c| c.to_vec()).collect());
            let mut i = 0;
            while i < flat && cur[i] == max {
                cur[i] = 0;
                i += 1;
            }
            if i == flat {
                return out;
            }
            cur[i] += 1;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn gpi_set_matches_exhaustive_is_gpi(w in (0usize..=2, 0usize..=2).prop_flat_map(|(n, k)| word_strategy(n.max(1), k, 4))) {
            let set = gpi_set(&w, 6).unwrap();
            let perms = permutations(&(1..=w.k()).collect::<Vec<_>>());
            let mut found = BTreeSet::new();
            for alpha in all_alphas(w.n(), w.k(), w.len() as u64) {
                for sigma in &perms {
                    let g = GeneralizedParikhImage { alpha: alpha.clone(), sigma: sigma.clone() };
                    if is_gpi(&w, &g) {
                        found.insert(g);
                    }
                }
            }
            prop_assert_eq!(set, found);
        }

        #[test]
        fn canonical_decomposition_is_an_image(w in word_strategy(2, 3, 8)) {
            let d = decompose(&w);
            prop_assert!(is_gpi(&w, &d.image(&w)));
            let set = gpi_set(&w, 6).unwrap();
            let fact: usize = (1..=d.p).product();
            prop_assert_eq!(set.len(), fact);
        }

        #[test]
        fn effect_agrees_with_simulation(
            d in 1usize..=3,
            cols in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 3), 1..=3),
            raw in proptest::collection::vec((0usize..6, 0usize..3), 0..=10),
        ) {
            let n = cols.len();
            let mut b = Machine::builder("m", MachineClass::Zvassr, d).state("q");
            for (i, c) in cols.iter().enumerate() {
                b = b.letter(format!("a{i}"), Transform::Add(Vector(c[..d].to_vec())));
            }
            let m = b.build().unwrap();
            let word: Vec<LetterId> = raw
                .iter()
                .map(|&(kind, x)| if kind < 2 { LetterId((n + 1 + x % d) as u32) } else { LetterId((1 + x % n) as u32) })
                .collect();
            let start = Configuration::new(StateId(1), Vector::zeros(d));
            let simulated = m.word_effect(&word, &start.counters).unwrap();
            let mw = MonitoredWord::from_letters(&m, &word).unwrap();
            let bm = EffectMatrix::from_machine(&m).unwrap();
            for g in gpi_set(&mw, 6).unwrap() {
                prop_assert_eq!(&effect(&g, &bm).unwrap(), &simulated);
            }
        }
    }
}
