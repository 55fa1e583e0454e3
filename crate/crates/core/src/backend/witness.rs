use serde::{Deserialize, Serialize};

use crate::encode::{flow_var, p_var, s_var, sigma_var, t_var};
use crate::model::{Configuration, Machine, Run, StateId};
use crate::pa::Assignment;

use super::BackendError;

/// Segment data read off a model of `Ψ'_B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowWitness {
    pub p: usize,
    /// `σ(1..=k)`
    pub sigma: Vec<usize>,
    /// `(s_i, t_i)` for `i = 0..=k`
    pub endpoints: Vec<(usize, usize)>,
    /// per segment, the count of every transition (by index)
    pub flows: Vec<Vec<u64>>,
}

impl FlowWitness {
    pub fn from_model(a: &Assignment, m: &Machine) -> Result<FlowWitness, BackendError> {
        let k = m.num_monitored();
        let get = |name: String| -> Result<i64, BackendError> {
            a.get(&name)
                .copied()
                .ok_or_else(|| BackendError::Witness(format!("model lacks `{name}`")))
        };
        let nat = |name: String| -> Result<usize, BackendError> {
            let v = get(name.clone())?;
            usize::try_from(v)
                .map_err(|_| BackendError::Witness(format!("`{name}` = {v} is negative")))
        };
        let p = nat(p_var().name)?;
        if p > k {
            return Err(BackendError::Witness(format!("p = {p} exceeds k = {k}")));
        }
        let sigma = (1..=k)
            .map(|i| nat(sigma_var(i).name))
            .collect::<Result<Vec<_>, _>>()?;
        let mut endpoints = Vec::new();
        let mut flows = Vec::new();
        for i in 0..=k {
            let real = i >= p;
            let end = |name: String| {
                if real {
                    nat(name)
                } else {
                    Ok(nat(name).unwrap_or(0))
                }
            };
            endpoints.push((end(s_var(i).name)?, end(t_var(i).name)?));
            let f = (0..m.transitions().len())
                .map(|e| {
                    let name = flow_var(i, e).name;
                    match a.get(&name) {
                        None => Ok(0),
                        Some(&v) => u64::try_from(v).map_err(|_| {
                            BackendError::Witness(format!("`{name}` = {v} is negative"))
                        }),
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            flows.push(f);
        }
        Ok(FlowWitness {
            p,
            sigma,
            endpoints,
            flows,
        })
    }
}

/// An Eulerian path from `s` to `t` using transition `e` exactly
/// `counts[e]` times. Ties go to the lowest transition index.
pub fn euler_path(
    m: &Machine,
    s: usize,
    t: usize,
    counts: &[u64],
) -> Result<Vec<usize>, BackendError> {
    let ts = m.transitions();
    if counts.len() != ts.len() {
        return Err(BackendError::Witness(
            "flow vector has the wrong length".into(),
        ));
    }
    let states = m.num_states();
    let mut balance = vec![0i64; states + 1];
    for (e, tr) in ts.iter().enumerate() {
        balance[tr.from.0 as usize] += counts[e] as i64;
        balance[tr.to.0 as usize] -= counts[e] as i64;
    }
    for (q, &b) in balance.iter().enumerate().skip(1) {
        let want = i64::from(q == s && s != t) - i64::from(q == t && s != t);
        if b != want {
            return Err(BackendError::Witness(format!(
                "flow is not balanced at state {q}"
            )));
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); states + 1];
    for (e, tr) in ts.iter().enumerate() {
        if counts[e] > 0 {
            adj[tr.from.0 as usize].push(e);
        }
    }
    let mut rem = counts.to_vec();
    let mut next = vec![0usize; states + 1];
    let mut stack: Vec<(usize, Option<usize>)> = vec![(s, None)];
    let mut circuit = Vec::new();
    while let Some(&(v, via)) = stack.last() {
        while next[v] < adj[v].len() && rem[adj[v][next[v]]] == 0 {
            next[v] += 1;
        }
        if next[v] < adj[v].len() {
            let e = adj[v][next[v]];
            rem[e] -= 1;
            stack.push((ts[e].to.0 as usize, Some(e)));
        } else {
            stack.pop();
            circuit.extend(via);
        }
    }
    circuit.reverse();
    let total: u64 = counts.iter().sum();
    if circuit.len() as u64 != total {
        return Err(BackendError::Witness("flow is not connected".into()));
    }
    Ok(circuit)
}

/// The transition path described by `w`: one Eulerian path per real
/// segment, joined by the lowest-index `r_{σ(i)}` transition.
pub fn flows_to_path(m: &Machine, w: &FlowWitness) -> Result<Vec<usize>, BackendError> {
    let k = m.num_monitored();
    if w.endpoints.len() != k + 1 || w.flows.len() != k + 1 || w.sigma.len() != k {
        return Err(BackendError::Witness(
            "witness shape does not match the machine".into(),
        ));
    }
    let mut path = Vec::new();
    for i in w.p..=k {
        let (s, t) = w.endpoints[i];
        if i > w.p {
            let from = w.endpoints[i - 1].1;
            let r = w.sigma[i - 1];
            if r == 0 || r > k {
                return Err(BackendError::Witness(format!("σ({i}) = {r} out of range")));
            }
            let letter = m.reset_letter(r);
            let e = m
                .transitions()
                .iter()
                .position(|tr| {
                    tr.from.0 as usize == from && tr.letter == letter && tr.to.0 as usize == s
                })
                .ok_or_else(|| {
                    BackendError::Witness(format!("no r{r} transition from state {from} to {s}"))
                })?;
            path.push(e);
        }
        path.extend(euler_path(m, s, t, &w.flows[i])?);
    }
    Ok(path)
}

/// Replays [`flows_to_path`] from `start`, which must sit at `s_p`.
pub fn flows_to_run(
    m: &Machine,
    start: &Configuration,
    w: &FlowWitness,
) -> Result<Run, BackendError> {
    let s = w.endpoints.get(w.p).map(|e| e.0).unwrap_or(0);
    if start.state != StateId(s as u32) {
        return Err(BackendError::Witness(format!(
            "witness starts at state {s}, query at {}",
            start.state.0
        )));
    }
    let path = flows_to_path(m, w)?;
    let run = m.replay(start, &path)?;
    run.validate(m)?;
    Ok(run)
}
