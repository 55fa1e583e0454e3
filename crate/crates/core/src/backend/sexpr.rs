use std::fmt;

use crate::pa::Assignment;

use super::BackendError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> BackendError {
        BackendError::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip(&mut self) {
        while self.pos < self.src.len() {
            match self.src[self.pos] {
                b';' => {
                    while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn expr(&mut self) -> Result<Sexp, BackendError> {
        self.skip();
        match self.src.get(self.pos) {
            None => Err(self.error("unexpected end of input")),
            Some(b')') => Err(self.error("unexpected `)`")),
            Some(b'(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip();
                    match self.src.get(self.pos) {
                        None => return Err(self.error("unclosed `(`")),
                        Some(b')') => {
                            self.pos += 1;
                            return Ok(Sexp::List(items));
                        }
                        _ => items.push(self.expr()?),
                    }
                }
            }
            Some(b'|') => {
                let start = self.pos + 1;
                let end = self.src[start..]
                    .iter()
                    .position(|&c| c == b'|')
                    .ok_or_else(|| self.error("unclosed `|`"))?;
                self.pos = start + end + 1;
                Ok(Sexp::Atom(
                    String::from_utf8_lossy(&self.src[start..start + end]).into_owned(),
                ))
            }
            Some(b'"') => {
                let start = self.pos;
                self.pos += 1;
                loop {
                    match self.src.get(self.pos) {
                        None => return Err(self.error("unclosed string")),
                        Some(b'"') if self.src.get(self.pos + 1) == Some(&b'"') => self.pos += 2,
                        Some(b'"') => break,
                        _ => self.pos += 1,
                    }
                }
                self.pos += 1;
                Ok(Sexp::Atom(
                    String::from_utf8_lossy(&self.src[start..self.pos]).into_owned(),
                ))
            }
            Some(_) => {
                let start = self.pos;
                while self.pos < self.src.len() {
                    let c = self.src[self.pos];
                    if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' {
                        break;
                    }
                    self.pos += 1;
                }
                Ok(Sexp::Atom(
                    String::from_utf8_lossy(&self.src[start..self.pos]).into_owned(),
                ))
            }
        }
    }
}

/// Every top-level s-expression in `text`.
pub fn parse_sexps(text: &str) -> Result<Vec<Sexp>, BackendError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    loop {
        p.skip();
        if p.pos >= p.src.len() {
            return Ok(out);
        }
        out.push(p.expr()?);
    }
}

fn value(e: &Sexp) -> Option<i64> {
    match e {
        Sexp::Atom(a) => a.parse().ok(),
        Sexp::List(xs) => match xs.as_slice() {
            [Sexp::Atom(op), x] if op == "-" => value(x).and_then(i64::checked_neg),
            _ => None,
        },
    }
}

/// Reads `define-fun` bindings of integer constants. Accepts the bare list
/// form and the older `(model …)` wrapper.
pub fn parse_model(text: &str) -> Result<Assignment, BackendError> {
    let mut out = Assignment::new();
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    loop {
        p.skip();
        if p.pos >= p.src.len() {
            return Ok(out);
        }
        let at = p.pos;
        let e = p.expr()?;
        let Sexp::List(items) = e else {
            return Err(BackendError::Parse {
                pos: at,
                msg: "expected a model list".into(),
            });
        };
        let items = match items.first() {
            Some(Sexp::Atom(a)) if a == "model" => &items[1..],
            _ => &items[..],
        };
        for item in items {
            bind(item, at, &mut out)?;
        }
    }
}

fn bind(item: &Sexp, at: usize, out: &mut Assignment) -> Result<(), BackendError> {
    let bad = |msg: String| BackendError::Parse { pos: at, msg };
    let Sexp::List(xs) = item else {
        return Err(bad(format!("expected define-fun, found `{item}`")));
    };
    match xs.as_slice() {
        [Sexp::Atom(kw), Sexp::Atom(name), Sexp::List(args), Sexp::Atom(sort), body]
            if kw == "define-fun" =>
        {
            if !args.is_empty() || sort != "Int" {
                return Ok(());
            }
            let v = value(body)
                .ok_or_else(|| bad(format!("`{name}` has non-integer value `{body}`")))?;
            out.insert(name.clone(), v);
            Ok(())
        }
        _ => Err(bad(format!("expected define-fun, found `{item}`"))),
    }
}

/// Prints an assignment the way solvers report models.
pub fn print_model(a: &Assignment) -> String {
    let mut s = String::from("(\n");
    for (name, &v) in a {
        let lit = if v < 0 {
            format!("(- {})", v.unsigned_abs())
        } else {
            v.to_string()
        };
        s.push_str(&format!("  (define-fun {name} () Int\n    {lit})\n"));
    }
    s.push(')');
    s
}
