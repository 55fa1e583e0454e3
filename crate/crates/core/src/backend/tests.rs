use super::*;
use crate::model::{MachineClass, StateId, Transform};
use crate::pa::{exists, forall, ge, or, Assignment, Var};
use proptest::prelude::*;

fn solver() -> SolverConfig {
    SolverConfig::from_env()
}

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

/// q0 --a(+1)--> q0 --r1--> q1 --a--> q1
fn reset_pair() -> Machine {
    Machine::builder("pair", MachineClass::Zvassr, 1)
        .states(["q0", "q1"])
        .letter("a", Transform::Add(Vector(vec![1])))
        .transition("q0", "a", "q0")
        .transition("q0", "r1", "q1")
        .transition("q1", "a", "q1")
        .build()
        .unwrap()
}

#[test]
fn smtlib_existential() {
    let x = Var::nat("x");
    let s = to_smtlib2(&exists(vec![x.clone()], ge(x, 5)));
    assert_eq!(
        s,
        "(set-logic QF_LIA)\n(declare-const x Int)\n(assert (and (>= x 0) (>= x 5)))\n(check-sat)\n(get-model)\n"
    );
}

#[test]
fn smtlib_quantified_shape() {
    let x = Var::int("x");
    let y = Var::nat("y");
    let f = forall(
        vec![x.clone()],
        exists(vec![y.clone()], or([ge(x.clone(), y.clone()), ge(y, x)])),
    );
    let s = to_smtlib2(&f);
    assert!(s.starts_with(
        "(set-logic LIA)\n(assert (forall ((x Int)) (exists ((y Int)) (and (>= y 0) "
    ));
    assert!(!s.contains("get-model"));
    assert_eq!(s.matches("(assert").count(), 1);
}

#[test]
fn smtlib_is_stable() {
    let m = reset_pair();
    let q = Query::Reach {
        src: at(1, &[5]),
        dst: at(2, &[2]),
    };
    let a = to_smtlib2(&encode(&m, &q).unwrap());
    let b = to_smtlib2(&encode(&m, &q).unwrap());
    assert_eq!(a, b);
    assert!(a.starts_with("(set-logic QF_LIA)"));
}

#[test]
fn parse_model_examples() {
    let a = parse_model("((define-fun x () Int 3))").unwrap();
    assert_eq!(a, Assignment::from([("x".into(), 3)]));
    let a =
        parse_model("(model\n  (define-fun y () Int\n    (- 7))\n  (define-fun b () Bool true))")
            .unwrap();
    assert_eq!(a, Assignment::from([("y".into(), -7)]));
    let a = parse_model("(\n(define-fun |odd name| () Int 0)\n)").unwrap();
    assert_eq!(a["odd name"], 0);
}

#[test]
fn parse_model_errors_carry_positions() {
    match parse_model("((define-fun x () Int 3)") {
        Err(BackendError::Parse { pos, .. }) => assert_eq!(pos, 24),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        parse_model("((define-fun x () Int foo))"),
        Err(BackendError::Parse { .. })
    ));
    assert!(matches!(
        parse_model(")"),
        Err(BackendError::Parse { pos: 0, .. })
    ));
}

#[test]
fn sexp_printer_roundtrip() {
    let text = "(a (b  c)\n ( ) d ; comment\n)";
    let es = parse_sexps(text).unwrap();
    assert_eq!(es.len(), 1);
    assert_eq!(es[0].to_string(), "(a (b c) () d)");
    assert_eq!(parse_sexps(&es[0].to_string()).unwrap(), es);
}

proptest! {
    #[test]
    fn model_print_parse_roundtrip(vals in proptest::collection::btree_map("[a-z][a-z0-9_]{0,6}", any::<i64>(), 0..12)) {
        let a: Assignment = vals;
        prop_assert_eq!(parse_model(&print_model(&a)).unwrap(), a);
    }
}

#[test]
fn invoke_sat_unsat() {
    let r = invoke(
        "(declare-const x Int)\n(assert (> x 2))\n(check-sat)\n(get-model)\n",
        &solver(),
    )
    .unwrap();
    assert_eq!(r.status, Status::Sat);
    assert!(r.model.unwrap()["x"] > 2);
    let r = invoke("(assert false)\n(check-sat)\n", &solver()).unwrap();
    assert_eq!(r.status, Status::Unsat);
    assert!(r.model.is_none());
}

#[test]
fn invoke_timeout_is_unknown() {
    let m = reset_pair();
    let script = to_smtlib2(
        &encode(
            &m,
            &Query::Reach {
                src: at(1, &[5]),
                dst: at(2, &[2]),
            },
        )
        .unwrap(),
    );
    let cfg = solver().with_timeout(Some(Duration::from_millis(1)));
    let r = invoke(&script, &cfg).unwrap();
    assert_eq!(r.status, Status::Unknown);
    assert!(r.diagnostics.contains("timeout"));
}

#[test]
fn invoke_reports_process_failures() {
    let cfg = SolverConfig::new("/nonexistent/solver", None);
    assert!(matches!(
        invoke("(check-sat)", &cfg),
        Err(BackendError::Solver(_))
    ));
    let cfg = SolverConfig::new("echo nonsense", None);
    assert!(matches!(
        invoke("(check-sat)", &cfg),
        Err(BackendError::Solver(_))
    ));
}

#[test]
fn quantified_scripts_race_two_solvers() {
    let script = "(assert (forall ((y Int)) (>= (* y y) 0)))\n(check-sat)\n";
    let cfg = SolverConfig::new("sleep 30", None).with_quantified(Some(DEFAULT_SOLVER));
    let started = std::time::Instant::now();
    let r = invoke(script, &cfg).unwrap();
    assert_eq!(r.status, Status::Sat);
    assert!(started.elapsed() < Duration::from_secs(10));

    let cfg = solver().with_quantified(Some("/nonexistent/solver"));
    let r = invoke("(assert true)\n(check-sat)\n", &cfg).unwrap();
    assert_eq!(r.status, Status::Sat);
    let r = invoke(script, &cfg).unwrap();
    assert_eq!(r.status, Status::Sat);
}

#[test]
fn euler_examples() {
    let m = one_counter(&[1]);
    assert_eq!(euler_path(&m, 1, 1, &[0]).unwrap(), Vec::<usize>::new());
    assert_eq!(euler_path(&m, 1, 1, &[3]).unwrap(), vec![0, 0, 0]);
    let w = FlowWitness {
        p: 1,
        sigma: vec![1],
        endpoints: vec![(1, 1), (1, 1)],
        flows: vec![vec![0], vec![3]],
    };
    let run = flows_to_run(&m.to_zvassr().unwrap(), &at(1, &[0]), &w).unwrap();
    assert_eq!(run.end(), &at(1, &[3]));
}

#[test]
fn euler_rejects_bad_flows() {
    let m = reset_pair();
    // a at q1 without reaching q1
    assert!(matches!(
        euler_path(&m, 1, 1, &[0, 0, 2]),
        Err(BackendError::Witness(_))
    ));
    // unbalanced
    assert!(euler_path(&m, 1, 2, &[1, 0, 0]).is_err());
}

#[test]
fn euler_tie_break_is_lowest_id() {
    // two loops on one state: the lower index is taken first
    let m = one_counter(&[1, -1]);
    assert_eq!(euler_path(&m, 1, 1, &[2, 1]).unwrap(), vec![0, 0, 1]);
}

#[test]
fn decide_parity_examples() {
    let m = one_counter(&[2]);
    let v = decide(
        &m,
        &Query::Reach {
            src: at(1, &[0]),
            dst: at(1, &[4]),
        },
        &solver(),
    )
    .unwrap();
    assert_eq!(v.answer, Answer::Yes);
    assert_eq!(v.witness.as_ref().unwrap().len(), 2);
    let v = decide(
        &m,
        &Query::Reach {
            src: at(1, &[0]),
            dst: at(1, &[3]),
        },
        &solver(),
    )
    .unwrap();
    assert_eq!(v.answer, Answer::No);
    let v = decide(
        &m,
        &Query::Cover {
            src: at(1, &[0]),
            dst: at(1, &[3]),
        },
        &solver(),
    )
    .unwrap();
    assert_eq!(v.answer, Answer::Yes);
    assert!(v.witness.unwrap().end().counters.get(1) >= 3);
}

#[test]
fn decide_two_segment_witness() {
    let m = reset_pair();
    let v = decide(
        &m,
        &Query::Reach {
            src: at(1, &[5]),
            dst: at(2, &[2]),
        },
        &solver(),
    )
    .unwrap();
    assert_eq!(v.answer, Answer::Yes);
    let run = v.witness.unwrap();
    run.validate(&m).unwrap();
    assert_eq!(run.end(), &at(2, &[2]));
    let word: Vec<&str> = run
        .word(&m)
        .iter()
        .map(|&a| m.letter(a).name.as_str())
        .collect();
    assert!(word.ends_with(&["r1", "a", "a"]));
    let v = decide(
        &m,
        &Query::Reach {
            src: at(1, &[5]),
            dst: at(2, &[-1]),
        },
        &solver(),
    )
    .unwrap();
    assert_eq!(v.answer, Answer::No);
}

#[test]
fn decide_lifts_mixed_transitions() {
    // one transition that resets and adds
    let m = Machine::builder("mix", MachineClass::Zvassr, 2)
        .states(["q"])
        .letter(
            "a",
            Transform::Affine {
                matrix: vec![vec![0, 0], vec![0, 1]],
                offset: Vector(vec![2, 3]),
            },
        )
        .transition("q", "a", "q")
        .build()
        .unwrap();
    let v = decide(
        &m,
        &Query::Reach {
            src: at(1, &[7, 0]),
            dst: at(1, &[2, 6]),
        },
        &solver(),
    )
    .unwrap();
    assert_eq!(v.answer, Answer::Yes);
    assert_eq!(v.witness.unwrap().len(), 2);
}

#[test]
fn decide_rejects_affine() {
    let m = Machine::builder("aff", MachineClass::Zrm, 1)
        .states(["q"])
        .letter(
            "dbl",
            Transform::Affine {
                matrix: vec![vec![2]],
                offset: Vector(vec![0]),
            },
        )
        .transition("q", "dbl", "q")
        .build()
        .unwrap();
    let r = decide(
        &m,
        &Query::Reach {
            src: at(1, &[1]),
            dst: at(1, &[4]),
        },
        &solver(),
    );
    assert!(matches!(r, Err(BackendError::Encode(EncodeError::Affine))));
}

#[test]
fn inclusion_examples() {
    let a = one_counter(&[1]);
    let b = one_counter(&[2]);
    let q = |other: &Machine| Query::Incl {
        src: at(1, &[0]),
        other: other.clone(),
        other_src: at(1, &[0]),
    };
    assert_eq!(decide(&a, &q(&a), &solver()).unwrap().answer, Answer::Yes);
    let v = decide(&a, &q(&b), &solver()).unwrap();
    assert_eq!(v.answer, Answer::No);
    let x = v.counterexample.expect("confirmed counterexample");
    assert_eq!(x.get(1) % 2, 1);
    assert!(x.get(1) > 0);
    assert_eq!(decide(&b, &q(&a), &solver()).unwrap().answer, Answer::Yes);
}

#[test]
fn witness_from_model_reads_segments() {
    let m = reset_pair();
    let nf = crate::encode::to_normal_form(&m).unwrap();
    let f = encode(
        &m,
        &Query::Reach {
            src: at(1, &[0]),
            dst: at(2, &[1]),
        },
    )
    .unwrap();
    let r = invoke(&to_smtlib2(&f), &solver()).unwrap();
    let w = FlowWitness::from_model(&r.model.unwrap(), &nf.machine).unwrap();
    assert_eq!(w.p, 0);
    assert_eq!(w.endpoints[1], (2, 2));
    assert_eq!(w.flows[1][2], 1);
}
