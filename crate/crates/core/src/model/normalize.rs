use super::{Machine, MachineClass, ModelError, Run, StateId, Transform, Transition};

/// Where a transition of a normalized machine came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransitionOrigin {
    /// index of the original transition
    pub original: usize,
    /// position inside the chain that replaces it
    pub position: usize,
    pub chain_len: usize,
}

/// A reset machine in normal form together with the provenance of its
/// transitions. Original states keep their ids; fresh states follow them.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub machine: Machine,
    pub origin: Vec<TransitionOrigin>,
    pub original_states: usize,
}

/// Splits every mixed transition `v ↦ diag(λ)v + b` into one `r_i` per reset
/// coordinate followed by a pure addition, through fresh intermediate states.
///
/// Resets come first: the map resets and then adds `b`, so a coordinate that
/// is both reset and incremented ends at `b(i)`.
pub fn normalize(m: &Machine) -> Result<NormalForm, ModelError> {
    if m.class() != MachineClass::Zvassr {
        return Err(ModelError::ClassViolation(format!(
            "normalize expects a zvassr machine, got {}",
            m.class().keyword()
        )));
    }
    let d = m.dim();
    let mut b = Machine::builder(m.name(), MachineClass::Zvassr, d);
    let mut names: Vec<String> = m.states().map(|q| m.state_name(q).to_string()).collect();
    let mut adds = Vec::new();
    for a in m.letters().filter(|&a| !m.is_monitored(a)) {
        let l = m.letter(a);
        let (resets, offset) = l
            .effect
            .as_resets_then_add(d)
            .ok_or_else(|| ModelError::ClassViolation(format!("letter `{}` is affine", l.name)))?;
        adds.push((resets, offset.clone()));
        b = b.letter(l.name.clone(), Transform::Add(offset));
    }

    let mut transitions = Vec::new();
    let mut origin = Vec::new();
    for (idx, t) in m.transitions().iter().enumerate() {
        let mut letters = Vec::new();
        if m.is_monitored(t.letter) {
            letters.push(t.letter);
        } else {
            let (resets, offset) = &adds[t.letter.0 as usize - 1];
            letters.extend(resets.iter().map(|&i| m.reset_letter(i)));
            if resets.is_empty() || !offset.is_zero() {
                letters.push(t.letter);
            }
        }
        let len = letters.len();
        let mut from = t.from;
        for (pos, &a) in letters.iter().enumerate() {
            let to = if pos + 1 == len {
                t.to
            } else {
                let mut name = format!("{}_t{}_{}", m.state_name(t.from), idx, pos + 1);
                while names.contains(&name) {
                    name.push('\'');
                }
                names.push(name);
                StateId(names.len() as u32)
            };
            transitions.push(Transition {
                from,
                letter: a,
                to,
            });
            origin.push(TransitionOrigin {
                original: idx,
                position: pos,
                chain_len: len,
            });
            from = to;
        }
    }
    b = b.states(names);
    for t in transitions {
        b = b.transition_ids(t.from, t.letter, t.to);
    }
    Ok(NormalForm {
        machine: b.build()?,
        origin,
        original_states: m.num_states(),
    })
}

impl NormalForm {
    /// Maps a run of the normalized machine back onto the original machine.
    /// The run must start and end in original states.
    pub fn lift_run(&self, original: &Machine, run: &Run) -> Result<Run, ModelError> {
        if run.start.state.0 as usize > self.original_states {
            return Err(ModelError::InvalidRun(
                "run starts in an intermediate state".into(),
            ));
        }
        let mut path = Vec::new();
        let mut expected = 0;
        for step in &run.steps {
            let o = self.origin[step.transition];
            if o.position != expected {
                return Err(ModelError::InvalidRun(
                    "run leaves a split transition midway".into(),
                ));
            }
            expected += 1;
            if expected == o.chain_len {
                path.push(o.original);
                expected = 0;
            }
        }
        if expected != 0 {
            return Err(ModelError::InvalidRun(
                "run ends inside a split transition".into(),
            ));
        }
        original.replay(&run.start, &path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Configuration, Vector};

    fn reach_set(m: &Machine, from: &Configuration, len: usize) -> Vec<Configuration> {
        let mut all = std::collections::BTreeSet::from([from.clone()]);
        let mut frontier = vec![from.clone()];
        for _ in 0..len {
            let mut next = Vec::new();
            for c in &frontier {
                for (_, s) in m.successors(c).unwrap() {
                    if all.insert(s.clone()) {
                        next.push(s);
                    }
                }
            }
            frontier = next;
        }
        all.into_iter().collect()
    }

    #[test]
    fn normal_machine_is_unchanged() {
        let m = Machine::builder("m", MachineClass::Zvassr, 2)
            .states(["p", "q"])
            .letter("a", Transform::Add(Vector(vec![1, 2])))
            .transition("p", "a", "q")
            .transition("q", "r1", "p")
            .build()
            .unwrap();
        let nf = normalize(&m).unwrap();
        assert_eq!(nf.machine, m);
    }

    #[test]
    fn splits_double_reset_through_two_fresh_states() {
        let matrix = vec![vec![0, 0, 0], vec![0, 0, 0], vec![0, 0, 1]];
        let m = Machine::builder("m", MachineClass::Zvassr, 3)
            .states(["p", "q"])
            .letter(
                "a",
                Transform::Affine {
                    matrix,
                    offset: Vector(vec![0, 0, 5]),
                },
            )
            .transition("p", "a", "q")
            .build()
            .unwrap();
        let nf = normalize(&m).unwrap();
        assert!(nf.machine.is_normal_form());
        assert_eq!(nf.machine.num_states(), 4);
        let names: Vec<_> = nf
            .machine
            .transitions()
            .iter()
            .map(|t| nf.machine.letter(t.letter).name.clone())
            .collect();
        assert_eq!(names, ["r1", "r2", "a"]);
        // same reachable original configurations
        for start in [vec![3, 4, 5], vec![-1, 0, 2]] {
            let c = Configuration::new(StateId(1), start);
            let orig: Vec<_> = reach_set(&m, &c, 1);
            let norm: Vec<_> = reach_set(&nf.machine, &c, 3)
                .into_iter()
                .filter(|c| c.state.0 <= 2)
                .collect();
            assert_eq!(orig, norm);
        }
    }

    #[test]
    fn reset_then_add_order() {
        // λ1 = 0, λ2 = 1, b = (2,3): (x,y) ↦ (2, y+3)
        let matrix = vec![vec![0, 0], vec![0, 1]];
        let m = Machine::builder("m", MachineClass::Zvassr, 2)
            .states(["p", "q"])
            .letter(
                "a",
                Transform::Affine {
                    matrix,
                    offset: Vector(vec![2, 3]),
                },
            )
            .transition("p", "a", "q")
            .build()
            .unwrap();
        let nf = normalize(&m).unwrap();
        let start = Configuration::new(StateId(1), vec![7, 1]);
        let direct = m.replay(&start, &[0]).unwrap();
        assert_eq!(direct.end().counters, Vector(vec![2, 4]));
        let split = nf.machine.replay(&start, &[0, 1]).unwrap();
        assert_eq!(split.end(), direct.end());
        assert_eq!(nf.lift_run(&m, &split).unwrap(), direct);
        let half = nf.machine.replay(&start, &[0]).unwrap();
        assert!(nf.lift_run(&m, &half).is_err());
    }

    #[test]
    fn rejects_other_classes() {
        let m = Machine::builder("m", MachineClass::Zvass, 1)
            .state("q")
            .letter("a", Transform::Add(Vector(vec![1])))
            .build()
            .unwrap();
        assert!(matches!(normalize(&m), Err(ModelError::ClassViolation(_))));
    }
}
