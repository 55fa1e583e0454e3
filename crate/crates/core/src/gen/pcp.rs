use crate::model::{Machine, MachineClass, Transform, Vector};

use super::GenError;

/// Pairs `(u_i, v_i)` of binary words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcpInstance {
    pub pairs: Vec<(String, String)>,
}

impl PcpInstance {
    /// `u_{i1}⋯u_{ip}` and `v_{i1}⋯v_{ip}` for 1-based indices.
    pub fn concat(&self, indices: &[usize]) -> (String, String) {
        let mut u = String::new();
        let mut v = String::new();
        for &i in indices {
            u.push_str(&self.pairs[i - 1].0);
            v.push_str(&self.pairs[i - 1].1);
        }
        (u, v)
    }

    pub fn is_solution(&self, indices: &[usize]) -> bool {
        let (u, v) = self.concat(indices);
        !indices.is_empty() && u == v
    }
}

fn affine(dim: usize, scale: i64, add: i64) -> Transform {
    let mut matrix = vec![vec![0, 0], vec![0, 0]];
    matrix[0][0] = 1;
    matrix[1][1] = 1;
    matrix[dim][dim] = scale;
    let mut offset = vec![0, 0];
    offset[dim] = add;
    Transform::Affine {
        matrix,
        offset: Vector(offset),
    }
}

/// Two-counter machine over diagonal maps: `u0`/`u1` double counter 1 (and
/// add the bit), `v0`/`v1` do the same on counter 2, and `sep` subtracts
/// `(1,1)`. State `q0` has one loop per pair reading `u_i ṽ_i`; `sep` moves
/// to `qf` and loops there.
pub fn pcp_to_affine_rm(p: &PcpInstance) -> Result<Machine, GenError> {
    if p.pairs.is_empty() {
        return Err(GenError::Shape("no pairs".into()));
    }
    for (u, v) in &p.pairs {
        if !u.chars().chain(v.chars()).all(|c| c == '0' || c == '1') {
            return Err(GenError::Shape(format!("`{u}`/`{v}` is not binary")));
        }
        if u.is_empty() && v.is_empty() {
            return Err(GenError::Shape("empty pair".into()));
        }
    }
    let mut states = vec!["q0".to_string(), "qf".to_string()];
    let mut edges = Vec::new();
    for (i, (u, v)) in p.pairs.iter().enumerate() {
        let letters: Vec<String> = u
            .chars()
            .map(|c| format!("u{c}"))
            .chain(v.chars().map(|c| format!("v{c}")))
            .collect();
        let mut from = "q0".to_string();
        for (j, l) in letters.iter().enumerate() {
            let to = if j + 1 == letters.len() {
                "q0".to_string()
            } else {
                let s = format!("p{}_{}", i + 1, j + 1);
                states.push(s.clone());
                s
            };
            edges.push((from, l.clone(), to.clone()));
            from = to;
        }
    }
    let mut b = Machine::builder("pcp", MachineClass::Zrm, 2)
        .states(states)
        .letter("u0", affine(0, 2, 0))
        .letter("u1", affine(0, 2, 1))
        .letter("v0", affine(1, 2, 0))
        .letter("v1", affine(1, 2, 1))
        .letter("sep", Transform::Add(Vector(vec![-1, -1])));
    for (f, l, t) in &edges {
        b = b.transition(f, l, t);
    }
    b = b
        .transition("q0", "sep", "qf")
        .transition("qf", "sep", "qf");
    Ok(b.build()?)
}

/// The letters read for an index sequence followed by `seps` separators.
pub fn pcp_word(p: &PcpInstance, indices: &[usize], seps: usize) -> String {
    let mut out: Vec<String> = Vec::new();
    for &i in indices {
        let (u, v) = &p.pairs[i - 1];
        out.extend(u.chars().map(|c| format!("u{c}")));
        out.extend(v.chars().map(|c| format!("v{c}")));
    }
    out.extend(std::iter::repeat_n("sep".to_string(), seps));
    out.join(" ")
}
