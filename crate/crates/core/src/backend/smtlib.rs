use std::fmt::Write as _;

use crate::pa::{pull_exists, Atom, Cmp, Formula, LinExpr, Sort, Var};

fn symbol(name: &str) -> String {
    let plain = !name.is_empty()
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "_'.$".contains(c));
    if plain && !name.contains('\'') {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

fn int(c: i64) -> String {
    if c < 0 {
        format!("(- {})", c.unsigned_abs())
    } else {
        c.to_string()
    }
}

fn linear(e: &LinExpr) -> String {
    let mut parts: Vec<String> = e
        .terms
        .iter()
        .map(|(v, &c)| match c {
            1 => symbol(&v.name),
            -1 => format!("(- {})", symbol(&v.name)),
            c => format!("(* {} {})", int(c), symbol(&v.name)),
        })
        .collect();
    match parts.len() {
        0 => "0".into(),
        1 => parts.pop().unwrap(),
        _ => format!("(+ {})", parts.join(" ")),
    }
}

fn atom(a: &Atom) -> String {
    let mut lhs = a.expr.clone();
    let rhs = int(-lhs.constant);
    lhs.constant = 0;
    let l = linear(&lhs);
    match a.cmp {
        Cmp::Ge => format!("(>= {l} {rhs})"),
        Cmp::Le => format!("(<= {l} {rhs})"),
        Cmp::Gt => format!("(> {l} {rhs})"),
        Cmp::Lt => format!("(< {l} {rhs})"),
        Cmp::Eq => format!("(= {l} {rhs})"),
        Cmp::Ne => format!("(not (= {l} {rhs}))"),
    }
}

fn nat_guards(vs: &[Var]) -> Vec<String> {
    vs.iter()
        .filter(|v| v.sort == Sort::Natural)
        .map(|v| format!("(>= {} 0)", symbol(&v.name)))
        .collect()
}

fn binders(vs: &[Var]) -> String {
    vs.iter()
        .map(|v| format!("({} Int)", symbol(&v.name)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn conj(mut parts: Vec<String>) -> String {
    match parts.len() {
        0 => "true".into(),
        1 => parts.pop().unwrap(),
        _ => format!("(and {})", parts.join(" ")),
    }
}

fn term(f: &Formula, out: &mut String) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom(a) => out.push_str(&atom(a)),
        Formula::Not(g) => {
            out.push_str("(not ");
            term(g, out);
            out.push(')');
        }
        Formula::And(fs) | Formula::Or(fs) => {
            out.push_str(if matches!(f, Formula::And(_)) {
                "(and"
            } else {
                "(or"
            });
            for g in fs {
                out.push(' ');
                term(g, out);
            }
            out.push(')');
        }
        Formula::Implies(a, b) => {
            out.push_str("(=> ");
            term(a, out);
            out.push(' ');
            term(b, out);
            out.push(')');
        }
        Formula::Exists(vs, g) => {
            let mut body = String::new();
            term(g, &mut body);
            let mut parts = nat_guards(vs);
            parts.push(body);
            write!(out, "(exists ({}) {})", binders(vs), conj(parts)).unwrap();
        }
        Formula::Forall(vs, g) => {
            let mut body = String::new();
            term(g, &mut body);
            let guards = nat_guards(vs);
            if guards.is_empty() {
                write!(out, "(forall ({}) {body})", binders(vs)).unwrap();
            } else {
                write!(
                    out,
                    "(forall ({}) (=> {} {body}))",
                    binders(vs),
                    conj(guards)
                )
                .unwrap();
            }
        }
    }
}

/// A deterministic SMT-LIB2 script asserting `f`. The free variables and
/// the hoisted existentials (all of them for an existential sentence, the
/// outermost block otherwise) become constants; `(get-model)` is added
/// whenever there are constants to report.
pub fn to_smtlib2(f: &Formula) -> String {
    let mut consts: Vec<Var> = f.free_vars().into_iter().collect();
    let pulled = pull_exists(f).ok();
    let mut body = f;
    if let Some((vs, inner)) = &pulled {
        consts.extend(vs.iter().cloned());
        body = inner;
    }
    while let Formula::Exists(vs, inner) = body {
        consts.extend(vs.iter().cloned());
        body = inner;
    }
    let logic = if body.is_quantifier_free() {
        "QF_LIA"
    } else {
        "LIA"
    };
    let mut out = String::new();
    writeln!(out, "(set-logic {logic})").unwrap();
    for v in &consts {
        writeln!(out, "(declare-const {} Int)", symbol(&v.name)).unwrap();
    }
    let mut text = String::new();
    term(body, &mut text);
    let mut parts = nat_guards(&consts);
    parts.push(text);
    writeln!(out, "(assert {})", conj(parts)).unwrap();
    out.push_str("(check-sat)\n");
    if !consts.is_empty() {
        out.push_str("(get-model)\n");
    }
    out
}
