use rand::rngs::StdRng;
use rand::SeedableRng;

use super::*;
use crate::backend::{check_sentence, decide, Answer, Query, SolverConfig};
use crate::model::{parse_word, StateId};

fn solver() -> SolverConfig {
    let cfg = SolverConfig::from_env();
    if cfg.quantified.is_some() {
        return cfg;
    }
    // quantified sentences go to cvc5 when its Python package is present
    let script = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scripts/cvc5-smt");
    let usable = std::process::Command::new(script)
        .stdin(std::process::Stdio::null())
        .output()
        .is_ok_and(|o| o.status.success());
    cfg.with_quantified(usable.then_some(script))
}

fn reach(inst: &ReachInstance) -> Answer {
    let q = Query::Reach {
        src: inst.src.clone(),
        dst: inst.dst.clone(),
    };
    decide(&inst.machine, &q, &solver()).unwrap().answer
}

fn incl(inst: &InclusionInstance) -> Answer {
    let q = Query::Incl {
        src: inst.src_a.clone(),
        other: inst.b.clone(),
        other_src: inst.src_b.clone(),
    };
    decide(&inst.a, &q, &solver()).unwrap().answer
}

fn valid(f: &Qslde) -> Answer {
    check_sentence(&f.to_formula().unwrap(), &solver()).unwrap()
}

#[test]
fn diophantine_examples() {
    let s = LinearSystem {
        a: vec![vec![1]],
        b: vec![0],
    };
    assert_eq!(s.brute_force(10), Some(vec![0]));
    assert_eq!(reach(&diophantine_to_zvas(&s).unwrap()), Answer::Yes);
    let s = LinearSystem {
        a: vec![vec![2]],
        b: vec![3],
    };
    assert_eq!(s.brute_force(10), None);
    assert_eq!(reach(&diophantine_to_zvas(&s).unwrap()), Answer::No);
    let s = LinearSystem {
        a: vec![vec![1, 2]],
        b: vec![4],
    };
    assert_eq!(s.brute_force(10), Some(vec![0, 2]));
    assert_eq!(reach(&diophantine_to_zvas(&s).unwrap()), Answer::Yes);
    assert!(diophantine_to_zvas(&LinearSystem {
        a: vec![vec![1]],
        b: vec![]
    })
    .is_err());
}

#[test]
fn qsos_examples() {
    let t = QsosInstance {
        sets: vec![vec![1], vec![1]],
        target: 1,
    };
    assert!(t.brute_force());
    let f = QsosInstance {
        sets: vec![vec![2], vec![]],
        target: 1,
    };
    assert!(!f.brute_force());
    for enc in [Encoding::Binary, Encoding::Unary] {
        assert_eq!(
            valid(&qsos2_to_qslde(&t, enc).unwrap()),
            Answer::Yes,
            "{enc:?}"
        );
        assert_eq!(
            valid(&qsos2_to_qslde(&f, enc).unwrap()),
            Answer::No,
            "{enc:?}"
        );
    }
}

#[test]
fn printed_binary_system_is_never_valid() {
    // the universal x may exceed 1, and then x + x̄ = 1 has no solution
    let t = QsosInstance {
        sets: vec![vec![1], vec![1]],
        target: 1,
    };
    assert!(t.brute_force());
    assert_eq!(valid(&qsos2_to_qslde_printed(&t).unwrap()), Answer::No);
    let empty = QsosInstance {
        sets: vec![vec![], vec![3]],
        target: 3,
    };
    assert!(empty.brute_force());
    assert_eq!(valid(&qsos2_to_qslde_printed(&empty).unwrap()), Answer::Yes);
}

#[test]
fn unary_system_shape() {
    let q = QsosInstance {
        sets: vec![vec![5, 2], vec![3]],
        target: 8,
    };
    let s = qsos2_to_qslde(&q, Encoding::Unary).unwrap();
    // three bits: value + 2·(3+2) + 1·(3+1) rows
    assert_eq!(s.c.len(), 1 + 2 * 5 + 4);
    assert!(s.blocks.iter().flatten().flatten().all(|c| c.abs() <= 2));
    assert_eq!(s.blocks[0][0].len(), 2);
}

#[test]
fn qslde_inclusion_matches_validity() {
    let q = QsosInstance {
        sets: vec![vec![1], vec![1]],
        target: 1,
    };
    let s = qsos2_to_qslde(&q, Encoding::Binary).unwrap();
    assert_eq!(incl(&qslde_to_zvas_inclusion(&s).unwrap()), Answer::Yes);
    let q = QsosInstance {
        sets: vec![vec![2], vec![]],
        target: 1,
    };
    let s = qsos2_to_qslde(&q, Encoding::Binary).unwrap();
    assert_eq!(incl(&qslde_to_zvas_inclusion(&s).unwrap()), Answer::No);
}

fn lit(var: usize, positive: bool) -> Literal {
    Literal { var, positive }
}

#[test]
fn qbf_examples() {
    let (x, y) = (0, 1);
    let f = Qbf {
        blocks: vec![vec![x], vec![y]],
        clauses: vec![
            vec![lit(x, true), lit(y, true), lit(y, true)],
            vec![lit(x, false), lit(y, true), lit(y, true)],
        ],
    };
    assert!(f.brute_force());
    assert!(qbf_to_qsos(&f).unwrap().brute_force());

    let g = Qbf {
        blocks: vec![vec![x], vec![]],
        clauses: vec![vec![lit(x, true); 3]],
    };
    assert!(!g.brute_force());
    assert!(!qbf_to_qsos(&g).unwrap().brute_force());

    let taut = Qbf {
        blocks: vec![vec![x], vec![]],
        clauses: vec![vec![lit(x, true), lit(x, false), lit(x, true)]],
    };
    assert!(taut.brute_force());
    assert!(qbf_to_qsos(&taut).unwrap().brute_force());

    let bad = Qbf {
        blocks: vec![vec![x]],
        clauses: vec![vec![lit(x, true)]],
    };
    assert_eq!(qbf_to_qsos(&bad), Err(GenError::Arity(1, 1)));
}

#[test]
fn qbf_digits() {
    let f = Qbf {
        blocks: vec![vec![0], vec![1]],
        clauses: vec![vec![lit(0, true), lit(1, false), lit(1, false)]],
    };
    let q = qbf_to_qsos(&f).unwrap();
    assert_eq!(q.sets[0], vec![110]);
    // m for y, n for x and y, c₁, d₁
    assert_eq!(q.sets[1], vec![1, 10, 201, 100, 200]);
    assert_eq!(q.target, 411);
}

#[test]
fn qbf_odd_blocks_negate() {
    // ∃x. (x ∨ x ∨ x) is true, so the one-set instance is false
    let f = Qbf {
        blocks: vec![vec![0]],
        clauses: vec![vec![lit(0, true); 3]],
    };
    assert!(f.brute_force());
    assert!(!qbf_to_qsos(&f).unwrap().brute_force());
}

#[test]
fn qbf_random_agreement() {
    let mut rng = StdRng::seed_from_u64(7);
    use rand::Rng;
    for _ in 0..40 {
        let blocks = vec![vec![0], vec![1, 2]];
        let clauses = (0..rng.gen_range(1..=2))
            .map(|_| {
                (0..3)
                    .map(|_| lit(rng.gen_range(0..3), rng.gen_bool(0.5)))
                    .collect()
            })
            .collect();
        let f = Qbf { blocks, clauses };
        assert_eq!(
            f.brute_force(),
            qbf_to_qsos(&f).unwrap().brute_force(),
            "{f:?}"
        );
    }
}

fn term(a: i64, z: i64, b: i64) -> Pi2Term {
    Pi2Term {
        a: vec![a],
        z,
        b: vec![b],
    }
}

#[test]
fn pi2_examples() {
    let trivial = Pi2Formula {
        xs: 1,
        ys: 1,
        terms: vec![term(0, 0, 0)],
        matrix: PosBool::Term(0),
    };
    assert_eq!(
        check_sentence(&trivial.to_formula().unwrap(), &solver()).unwrap(),
        Answer::Yes
    );
    assert_eq!(incl(&pi2pa_to_inclusion(&trivial).unwrap()), Answer::Yes);

    let x_ge_y = Pi2Formula {
        xs: 1,
        ys: 1,
        terms: vec![term(1, 0, 1)],
        matrix: PosBool::Term(0),
    };
    assert_eq!(
        check_sentence(&x_ge_y.to_formula().unwrap(), &solver()).unwrap(),
        Answer::Yes
    );
    assert_eq!(incl(&pi2pa_to_inclusion(&x_ge_y).unwrap()), Answer::Yes);

    let false_term = Pi2Formula {
        xs: 1,
        ys: 1,
        terms: vec![term(0, -1, 0)],
        matrix: PosBool::Term(0),
    };
    assert_eq!(
        check_sentence(&false_term.to_formula().unwrap(), &solver()).unwrap(),
        Answer::No
    );
    let inst = pi2pa_to_inclusion(&false_term).unwrap();
    let q = Query::Incl {
        src: inst.src_a.clone(),
        other: inst.b.clone(),
        other_src: inst.src_b.clone(),
    };
    let v = decide(&inst.a, &q, &solver()).unwrap();
    assert_eq!(v.answer, Answer::No);
    assert!(v.counterexample.is_some());
}

#[test]
fn pi2_shared_terms_get_separate_counters() {
    // (t0 ∨ t1) ∧ (t0 ∨ t2): t0 occurs twice
    let f = Pi2Formula {
        xs: 1,
        ys: 1,
        terms: vec![term(1, 0, 1), term(-1, 0, 1), term(0, 0, 1)],
        matrix: PosBool::And(vec![
            PosBool::Or(vec![PosBool::Term(0), PosBool::Term(1)]),
            PosBool::Or(vec![PosBool::Term(0), PosBool::Term(2)]),
        ]),
    };
    let inst = pi2pa_to_inclusion(&f).unwrap();
    assert_eq!(inst.a.dim(), 4);
    assert_eq!(inst.b.num_states(), 1 + 3 + 3);
}

#[test]
fn cnf_distribution() {
    let f = PosBool::Or(vec![
        PosBool::Term(0),
        PosBool::And(vec![PosBool::Term(1), PosBool::Term(2)]),
    ]);
    assert_eq!(f.to_cnf().unwrap(), vec![vec![0, 1], vec![0, 2]]);
    let wide = PosBool::Or(
        (0..10)
            .map(|_| PosBool::And(vec![PosBool::Term(0), PosBool::Term(1)]))
            .collect(),
    );
    assert!(matches!(wide.to_cnf(), Err(GenError::Shape(_))));
}

#[test]
fn pi2_brute_force_agrees_with_solver_on_examples() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..5 {
        let f = random_pi2(&mut rng, 3, 2);
        let solver_says = check_sentence(&f.to_formula().unwrap(), &solver()).unwrap();
        // no y found for some small x ⇒ invalid
        if !f.brute_force(4, 12) {
            assert_eq!(solver_says, Answer::No, "{f:?}");
        }
    }
}

fn classic() -> PcpInstance {
    let bin = |s: &str| s.replace('a', "0").replace('b', "1");
    PcpInstance {
        pairs: vec![
            (bin("a"), bin("baa")),
            (bin("ab"), bin("aa")),
            (bin("bba"), bin("bb")),
        ],
    }
}

#[test]
fn pcp_demo() {
    let p = classic();
    let (u, v) = p.concat(&[3, 2, 3, 1]);
    assert_eq!(u, "110011100");
    assert_eq!(u, v);
    assert!(p.is_solution(&[3, 2, 3, 1]));
    let m = pcp_to_affine_rm(&p).unwrap();
    let start = crate::model::Configuration::new(StateId(1), vec![0, 0]);
    let before = m
        .run(
            &start,
            &parse_word(&m, &pcp_word(&p, &[3, 2, 3, 1], 0)).unwrap(),
        )
        .unwrap();
    assert!(before.iter().any(|c| c.counters.0 == vec![412, 412]));
    let end = m
        .run(
            &start,
            &parse_word(&m, &pcp_word(&p, &[3, 2, 3, 1], 412)).unwrap(),
        )
        .unwrap();
    let qf = m.state_by_name("qf").unwrap();
    assert!(end.contains(&crate::model::Configuration::new(qf, vec![0, 0])));

    let eps = m.run(&start, &parse_word(&m, "sep").unwrap()).unwrap();
    assert!(eps.contains(&crate::model::Configuration::new(qf, vec![-1, -1])));

    let (u, v) = p.concat(&[1, 1]);
    assert_ne!(u, v);
    let after = m
        .run(&start, &parse_word(&m, &pcp_word(&p, &[1, 1], 0)).unwrap())
        .unwrap();
    assert!(after.iter().all(|c| c.counters.get(1) != c.counters.get(2)));
    assert!(decide(
        &m,
        &Query::Reach {
            src: start.clone(),
            dst: start
        },
        &solver()
    )
    .is_err());
}
