//! Bounded brute force: breadth-first search over configurations.
//!
//! Frontiers are kept in lexicographic order of their paths and expanded in
//! transition order, so the first time a configuration is seen it is seen
//! along its lexicographically least shortest path.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::encode::Mode;
use crate::model::{Configuration, Machine, ModelError, Run, Vector};
use crate::par::{self, Parallelism};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedAnswer<T = Run> {
    /// `None` means nothing within the bound, not "no"
    pub found: Option<T>,
    pub explored: usize,
    pub max_len: usize,
}

impl<T> BoundedAnswer<T> {
    pub fn is_found(&self) -> bool {
        self.found.is_some()
    }
}

fn matches(c: &Configuration, dst: &Configuration, mode: Mode) -> bool {
    c.state == dst.state
        && match mode {
            Mode::Reach => c.counters == dst.counters,
            Mode::Cover => c.counters.dominates(&dst.counters),
        }
}

struct Layers {
    configs: Vec<Configuration>,
    /// (parent index, transition) per config, `None` for the root
    parent: Vec<Option<(usize, usize)>>,
    seen: HashMap<Configuration, usize>,
}

impl Layers {
    fn new(src: &Configuration) -> Self {
        Layers {
            configs: vec![src.clone()],
            parent: vec![None],
            seen: HashMap::from([(src.clone(), 0)]),
        }
    }

    /// Adds the next layer; returns its index range.
    fn expand(
        &mut self,
        m: &Machine,
        layer: std::ops::Range<usize>,
        par: Parallelism,
    ) -> Result<std::ops::Range<usize>, ModelError> {
        let ids: Vec<usize> = layer.collect();
        let succ = par::map(par, &ids, |&i| m.successors(&self.configs[i]));
        let start = self.configs.len();
        for (&i, s) in ids.iter().zip(succ) {
            for (t, c) in s? {
                if !self.seen.contains_key(&c) {
                    self.seen.insert(c.clone(), self.configs.len());
                    self.configs.push(c);
                    self.parent.push(Some((i, t)));
                }
            }
        }
        Ok(start..self.configs.len())
    }

    fn path_to(&self, mut i: usize) -> Vec<usize> {
        let mut path = Vec::new();
        while let Some((p, t)) = self.parent[i] {
            path.push(t);
            i = p;
        }
        path.reverse();
        path
    }
}

/// Shortest run from `src` to `dst` (or to something covering `dst`) of
/// length at most `max_len`.
pub fn bfs(
    m: &Machine,
    src: &Configuration,
    dst: &Configuration,
    mode: Mode,
    max_len: usize,
) -> Result<BoundedAnswer, ModelError> {
    bfs_with(m, src, dst, mode, max_len, Parallelism::default())
}

pub fn bfs_with(
    m: &Machine,
    src: &Configuration,
    dst: &Configuration,
    mode: Mode,
    max_len: usize,
    par: Parallelism,
) -> Result<BoundedAnswer, ModelError> {
    let mut layers = Layers::new(src);
    let mut layer = 0..1;
    for depth in 0..=max_len {
        if let Some(i) = layer
            .clone()
            .find(|&i| matches(&layers.configs[i], dst, mode))
        {
            let run = m.replay(src, &layers.path_to(i))?;
            run.validate(m)?;
            assert!(
                matches(run.end(), dst, mode),
                "oracle witness does not reach the target"
            );
            return Ok(BoundedAnswer {
                found: Some(run),
                explored: layers.configs.len(),
                max_len,
            });
        }
        if depth == max_len || layer.is_empty() {
            break;
        }
        layer = layers.expand(m, layer, par)?;
    }
    Ok(BoundedAnswer {
        found: None,
        explored: layers.configs.len(),
        max_len,
    })
}

/// Every configuration reachable in at most `max_len` steps.
pub fn reach_set_bounded(
    m: &Machine,
    src: &Configuration,
    max_len: usize,
) -> Result<BTreeSet<Configuration>, ModelError> {
    reach_set_bounded_with(m, src, max_len, Parallelism::default())
}

pub fn reach_set_bounded_with(
    m: &Machine,
    src: &Configuration,
    max_len: usize,
    par: Parallelism,
) -> Result<BTreeSet<Configuration>, ModelError> {
    let mut layers = Layers::new(src);
    let mut layer = 0..1;
    for _ in 0..max_len {
        if layer.is_empty() {
            break;
        }
        layer = layers.expand(m, layer, par)?;
    }
    Ok(layers.configs.into_iter().collect())
}

/// The least counter vector reached by `a` within `max_len_a` steps but not
/// by `b` within `max_len_b` steps. Only a candidate: `b` may reach it with
/// a longer run.
pub fn incl_counterexample_bounded(
    a: &Machine,
    src_a: &Configuration,
    b: &Machine,
    src_b: &Configuration,
    max_len_a: usize,
    max_len_b: usize,
) -> Result<BoundedAnswer<Vector>, ModelError> {
    let ra = reach_set_bounded(a, src_a, max_len_a)?;
    let rb = reach_set_bounded(b, src_b, max_len_b)?;
    let explored = ra.len() + rb.len();
    let vb: BTreeSet<&Vector> = rb.iter().map(|c| &c.counters).collect();
    let va: BTreeSet<&Vector> = ra.iter().map(|c| &c.counters).collect();
    let found = va.into_iter().find(|v| !vb.contains(v)).cloned();
    Ok(BoundedAnswer {
        found,
        explored,
        max_len: max_len_a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::{reduce, Direction};
    use crate::model::{MachineClass, StateId, Transform};

    fn at(q: u32, v: &[i64]) -> Configuration {
        Configuration::new(StateId(q), v.to_vec())
    }

    fn one_counter(effects: &[i64]) -> Machine {
        let mut b = Machine::builder("m", MachineClass::Zvass, 1).state("q");
        for (i, &e) in effects.iter().enumerate() {
            let name = format!("a{i}");
            b = b
                .letter(name.clone(), Transform::Add(Vector(vec![e])))
                .transition("q", &name, "q");
        }
        b.build().unwrap()
    }

    #[test]
    fn bfs_examples() {
        let m = one_counter(&[2]);
        let r = bfs(&m, &at(1, &[0]), &at(1, &[0]), Mode::Reach, 0).unwrap();
        assert!(r.found.unwrap().is_empty());
        let r = bfs(&m, &at(1, &[0]), &at(1, &[3]), Mode::Reach, 10).unwrap();
        assert!(r.found.is_none());
        assert_eq!(r.explored, 11);
        let r = bfs(&m, &at(1, &[0]), &at(1, &[3]), Mode::Cover, 2).unwrap();
        assert_eq!(r.found.unwrap().end(), &at(1, &[4]));
        assert!(!bfs(&m, &at(1, &[0]), &at(1, &[3]), Mode::Cover, 1)
            .unwrap()
            .is_found());
    }

    #[test]
    fn bfs_prefers_lower_transitions() {
        let m = one_counter(&[1, 1]);
        let r = bfs(&m, &at(1, &[0]), &at(1, &[2]), Mode::Reach, 5).unwrap();
        assert_eq!(r.found.unwrap().transition_path(), vec![0, 0]);
    }

    #[test]
    fn reach_set_examples() {
        let m = one_counter(&[1]);
        assert_eq!(
            reach_set_bounded(&m, &at(1, &[0]), 0).unwrap(),
            BTreeSet::from([at(1, &[0])])
        );
        let vs: Vec<i64> = reach_set_bounded(&m, &at(1, &[0]), 3)
            .unwrap()
            .iter()
            .map(|c| c.counters.get(1))
            .collect();
        assert_eq!(vs, vec![0, 1, 2, 3]);
    }

    #[test]
    fn doubled_machine_keeps_mirrored_counters() {
        let m = Machine::builder("m", MachineClass::Zvassr, 2)
            .states(["p", "q"])
            .letter("a", Transform::Add(Vector(vec![1, -2])))
            .letter("b", Transform::Add(Vector(vec![0, 3])))
            .transition("p", "a", "q")
            .transition("q", "b", "p")
            .transition("q", "r1", "q")
            .transition("p", "r2", "p")
            .build()
            .unwrap();
        let red = reduce(
            &m,
            &at(1, &[1, 1]),
            &at(1, &[0, 0]),
            Direction::ReachToCover,
        )
        .unwrap();
        for c in reach_set_bounded(&red.machine, &red.src, 6).unwrap() {
            for j in 1..=2 {
                assert_eq!(c.counters.get(j), -c.counters.get(j + 2));
            }
        }
    }

    #[test]
    fn inclusion_candidates() {
        let a = one_counter(&[1]);
        let b = one_counter(&[2]);
        let r = incl_counterexample_bounded(&a, &at(1, &[0]), &a, &at(1, &[0]), 3, 3).unwrap();
        assert!(r.found.is_none());
        let r = incl_counterexample_bounded(&a, &at(1, &[0]), &b, &at(1, &[0]), 3, 6).unwrap();
        assert_eq!(r.found, Some(Vector(vec![1])));
        let r = incl_counterexample_bounded(&b, &at(1, &[0]), &a, &at(1, &[0]), 4, 8).unwrap();
        assert!(r.found.is_none());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let m = one_counter(&[3, -2, 1]);
        for target in [-4, 0, 5, 7] {
            let a = bfs_with(
                &m,
                &at(1, &[0]),
                &at(1, &[target]),
                Mode::Reach,
                5,
                Parallelism::Sequential,
            )
            .unwrap();
            let b = bfs_with(
                &m,
                &at(1, &[0]),
                &at(1, &[target]),
                Mode::Reach,
                5,
                Parallelism::Parallel,
            )
            .unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn bfs_is_monotone_in_the_bound() {
        let m = one_counter(&[3, -2]);
        let mut seen = false;
        for len in 0..8 {
            let f = bfs(&m, &at(1, &[0]), &at(1, &[5]), Mode::Reach, len)
                .unwrap()
                .is_found();
            assert!(!seen || f);
            seen |= f;
        }
        assert!(seen);
    }
}
