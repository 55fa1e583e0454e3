use rand::Rng;

use crate::model::{Machine, MachineClass, Transform, Vector};

/// A random ℤ-VASS with resets: up to `max_states` states, dimension
/// `1..=max_dim`, up to three addition letters with entries in
/// `[-max_abs, max_abs]`, and a handful of transitions including resets.
pub fn random_zvassr(
    rng: &mut impl Rng,
    max_states: usize,
    max_dim: usize,
    max_abs: i64,
) -> Machine {
    let states = rng.gen_range(1..=max_states);
    let d = rng.gen_range(1..=max_dim);
    let n = rng.gen_range(1..=3);
    let names: Vec<String> = (1..=states).map(|i| format!("q{i}")).collect();
    let mut b = Machine::builder("random", MachineClass::Zvassr, d).states(names.clone());
    for a in 0..n {
        let v = (0..d).map(|_| rng.gen_range(-max_abs..=max_abs)).collect();
        b = b.letter(format!("a{}", a + 1), Transform::Add(Vector(v)));
    }
    let count = rng.gen_range(1..=2 * states + 2);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..count {
        let from = &names[rng.gen_range(0..states)];
        let to = &names[rng.gen_range(0..states)];
        let letter = if rng.gen_bool(0.25) {
            format!("r{}", rng.gen_range(1..=d))
        } else {
            format!("a{}", rng.gen_range(1..=n))
        };
        if seen.insert((from, letter.clone(), to)) {
            b = b.transition(from, &letter, to);
        }
    }
    b.build().expect("well-formed by construction")
}

/// A one-state machine in normal form: `n` addition letters and `d` reset
/// letters, all self-loops.
pub fn random_normal_form(
    rng: &mut impl Rng,
    max_dim: usize,
    max_plain: usize,
    max_abs: i64,
) -> Machine {
    let d = rng.gen_range(1..=max_dim);
    let n = rng.gen_range(1..=max_plain);
    let mut b = Machine::builder("nf", MachineClass::Zvassr, d).state("q");
    for a in 0..n {
        let v = (0..d).map(|_| rng.gen_range(-max_abs..=max_abs)).collect();
        let name = format!("a{}", a + 1);
        b = b
            .letter(name.clone(), Transform::Add(Vector(v)))
            .transition("q", &name, "q");
    }
    for r in 1..=d {
        b = b.transition("q", &format!("r{r}"), "q");
    }
    b.build().expect("well-formed by construction")
}
