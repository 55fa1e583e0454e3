use crate::model::{Configuration, Machine, MachineClass, ModelError, Transform, Vector};

use super::EncodeError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// reachability of `dst` becomes coverability in dimension `2d`
    ReachToCover,
    /// coverability of `dst` becomes reachability with decrement loops
    CoverToReach,
}

#[derive(Clone, Debug)]
pub struct Reduced {
    pub machine: Machine,
    pub src: Configuration,
    pub dst: Configuration,
}

fn unique(base: String, taken: &[String]) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

pub fn reduce(
    m: &Machine,
    src: &Configuration,
    dst: &Configuration,
    direction: Direction,
) -> Result<Reduced, EncodeError> {
    if m.class() == MachineClass::Zrm || m.has_general_affine() {
        return Err(ModelError::ClassViolation(format!(
            "reductions need a reset machine, got {}",
            m.class().keyword()
        ))
        .into());
    }
    match direction {
        Direction::ReachToCover => Ok(double(m, src, dst)?),
        Direction::CoverToReach => Ok(add_decrements(m, src, dst)?),
    }
}

fn double(m: &Machine, src: &Configuration, dst: &Configuration) -> Result<Reduced, ModelError> {
    let d = m.dim();
    let mut b = Machine::builder(m.name(), m.class(), 2 * d);
    b = b.states(m.states().map(|q| m.state_name(q).to_string()));
    let mut names: Vec<String> = m.letters().map(|a| m.letter(a).name.clone()).collect();
    let mut renamed = Vec::new();
    for a in m.letters() {
        let l = m.letter(a);
        let (resets, offset) = l.effect.as_resets_then_add(d).expect("checked by caller");
        let doubled = offset.concat(&offset.neg());
        let name = if m.is_monitored(a) {
            let n = unique(format!("reset{}", resets[0]), &names);
            names.push(n.clone());
            n
        } else {
            l.name.clone()
        };
        let effect = if resets.is_empty() {
            Transform::Add(doubled)
        } else {
            let mut matrix = vec![vec![0; 2 * d]; 2 * d];
            for (i, row) in matrix.iter_mut().enumerate() {
                row[i] = 1;
            }
            for &i in &resets {
                matrix[i - 1][i - 1] = 0;
                matrix[i + d - 1][i + d - 1] = 0;
            }
            Transform::Affine {
                matrix,
                offset: doubled,
            }
        };
        b = b.letter(name.clone(), effect);
        renamed.push(name);
    }
    for t in m.transitions() {
        b = b.transition(
            m.state_name(t.from),
            &renamed[t.letter.0 as usize - 1],
            m.state_name(t.to),
        );
    }
    let lift = |c: &Configuration| Configuration {
        state: c.state,
        counters: c.counters.concat(&c.counters.neg()),
    };
    Ok(Reduced {
        machine: b.build()?,
        src: lift(src),
        dst: lift(dst),
    })
}

fn add_decrements(
    m: &Machine,
    src: &Configuration,
    dst: &Configuration,
) -> Result<Reduced, ModelError> {
    let d = m.dim();
    let mut b = Machine::builder(m.name(), m.class(), d);
    b = b.states(m.states().map(|q| m.state_name(q).to_string()));
    let mut names: Vec<String> = m.letters().map(|a| m.letter(a).name.clone()).collect();
    for a in m.letters().filter(|&a| !m.is_monitored(a)) {
        let l = m.letter(a);
        b = b.letter(l.name.clone(), l.effect.clone());
    }
    let mut decs = Vec::new();
    for i in 1..=d {
        let n = unique(format!("dec{i}"), &names);
        names.push(n.clone());
        b = b.letter(n.clone(), Transform::Add(Vector::unit(d, i).neg()));
        decs.push(n);
    }
    for t in m.transitions() {
        b = b.transition(
            m.state_name(t.from),
            &m.letter(t.letter).name,
            m.state_name(t.to),
        );
    }
    let q = m.state_name(dst.state);
    for n in &decs {
        b = b.transition(q, n, q);
    }
    Ok(Reduced {
        machine: b.build()?,
        src: src.clone(),
        dst: dst.clone(),
    })
}
