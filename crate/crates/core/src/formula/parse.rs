use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{Domain, Formula, Monomial};
use crate::error::{Error, Result};
use crate::numtheory::Rational;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(Rational),
    Exists,
    Forall,
    True,
    False,
    Inv,
    R,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Star,
    Caret,
    Eq,
    Lt,
    Le,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Dot,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(r) => format!("`{r}`"),
            Tok::Eof => "end of input".into(),
            other => format!("{other:?}"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);

    let digits = |i: &mut usize, col: &mut usize| -> String {
        let mut s = String::new();
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            s.push(chars[*i]);
            *i += 1;
            *col += 1;
        }
        s
    };

    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let next = chars.get(i + 1).copied();
        let mut push = |tok: Tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned {
                tok,
                line: l0,
                column: c0,
            });
            *i += width;
            *col += width;
        };
        match c {
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '[' => push(Tok::LBrack, 1, &mut i, &mut col),
            ']' => push(Tok::RBrack, 1, &mut i, &mut col),
            '*' => push(Tok::Star, 1, &mut i, &mut col),
            '^' => push(Tok::Caret, 1, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            '!' => push(Tok::Bang, 1, &mut i, &mut col),
            '&' => push(Tok::Amp, 1, &mut i, &mut col),
            '|' => push(Tok::Pipe, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '<' if next == Some('=') => push(Tok::Le, 2, &mut i, &mut col),
            '<' => push(Tok::Lt, 1, &mut i, &mut col),
            '-' if next == Some('>') => push(Tok::Arrow, 2, &mut i, &mut col),
            '-' | '0'..='9' => {
                let negative = c == '-';
                if negative {
                    if !next.is_some_and(|d| d.is_ascii_digit()) {
                        return Err(syntax(l0, c0, "`-` must start a number literal or `->`"));
                    }
                    i += 1;
                    col += 1;
                }
                let num = digits(&mut i, &mut col);
                let mut den = String::from("1");
                if i < chars.len() && chars[i] == '/' {
                    i += 1;
                    col += 1;
                    den = digits(&mut i, &mut col);
                    if den.is_empty() {
                        return Err(syntax(l0, c0, "expected denominator after `/`"));
                    }
                }
                let num: BigInt = num.parse().expect("digits");
                let den: BigInt = den.parse().expect("digits");
                if den.is_zero() {
                    return Err(syntax(l0, c0, "zero denominator"));
                }
                let value = Rational::new(if negative { -num } else { num }, den);
                out.push(Spanned {
                    tok: Tok::Num(value),
                    line: l0,
                    column: c0,
                });
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut s = String::new();
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    s.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                let tok = match s.as_str() {
                    "exists" => Tok::Exists,
                    "forall" => Tok::Forall,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "inv" => Tok::Inv,
                    "R" => Tok::R,
                    _ if s.starts_with(|ch: char| ch.is_ascii_lowercase()) => Tok::Ident(s),
                    _ => return Err(syntax(l0, c0, format!("invalid identifier `{s}`"))),
                };
                out.push(Spanned {
                    tok,
                    line: l0,
                    column: c0,
                });
            }
            other => return Err(syntax(l0, c0, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    domain: Domain,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let (l, c) = self.here();
        syntax(l, c, message)
    }

    fn unsupported(&self, what: &str) -> Error {
        let (l, c) = self.here();
        let domain = match self.domain {
            Domain::QPos => "qpos",
            Domain::Q => "q",
        };
        Error::Unsupported(format!("line {l}, column {c}: {what} in domain {domain}"))
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            )))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conjunction()?];
        while *self.peek() == Tok::Pipe {
            self.bump();
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        })
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Exists | Tok::Forall => {
                let universal = self.bump() == Tok::Forall;
                let x = match self.bump() {
                    Tok::Ident(x) => x,
                    other => {
                        self.pos -= 1;
                        return Err(self.error(format!(
                            "expected a variable after quantifier, found {}",
                            other.describe()
                        )));
                    }
                };
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if universal {
                    Formula::forall(x, body)
                } else {
                    Formula::exists(x, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek() {
            Tok::True => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::R => self.power_atom(),
            Tok::LParen => {
                // a parenthesis opens either a term (`(a*b)^2 < c`) or a formula
                let start = self.pos;
                if let Ok(atom) = self.relation() {
                    return Ok(atom);
                }
                self.pos = start;
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => self.relation(),
        }
    }

    fn power_atom(&mut self) -> Result<Formula> {
        if self.domain == Domain::Q {
            return Err(self.unsupported("power predicate R[n]"));
        }
        self.expect(Tok::R)?;
        self.expect(Tok::LBrack)?;
        let n = match self.bump() {
            Tok::Num(r) if r.is_integer() && r >= Rational::from_integer(2.into()) => {
                u64::try_from(r.to_integer()).map_err(|_| self.error("power index too large"))?
            }
            other => {
                self.pos -= 1;
                return Err(self.error(format!(
                    "R[n] needs an integer index n >= 2, found {}",
                    other.describe()
                )));
            }
        };
        self.expect(Tok::RBrack)?;
        self.expect(Tok::LParen)?;
        let t = self.term()?;
        self.expect(Tok::RParen)?;
        Ok(Formula::pow(n, t))
    }

    fn relation(&mut self) -> Result<Formula> {
        let lhs = self.term()?;
        let op = self.bump();
        let rhs = match op {
            Tok::Eq | Tok::Lt | Tok::Le => self.term()?,
            other => {
                self.pos -= 1;
                return Err(self.error(format!(
                    "expected `=`, `<` or `<=`, found {}",
                    other.describe()
                )));
            }
        };
        Ok(match op {
            Tok::Eq => Formula::eq(lhs, rhs),
            Tok::Lt => Formula::lt(lhs, rhs),
            _ => Formula::Or(vec![Formula::lt(lhs.clone(), rhs.clone()), Formula::eq(lhs, rhs)]),
        })
    }

    fn term(&mut self) -> Result<Monomial> {
        let mut m = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            m = &m * &self.factor()?;
        }
        Ok(m)
    }

    fn factor(&mut self) -> Result<Monomial> {
        let base = match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Monomial::var(x)
            }
            Tok::Num(r) => {
                if self.domain == Domain::QPos && !r.is_positive() {
                    return Err(self.unsupported("non-positive literal"));
                }
                self.bump();
                Monomial::constant(r)
            }
            Tok::Inv => {
                if self.domain == Domain::Q {
                    return Err(self.unsupported("inverse"));
                }
                self.bump();
                self.expect(Tok::LParen)?;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                t.inv()
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                t
            }
            other => return Err(self.error(format!("expected a term, found {}", other.describe()))),
        };
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exp = match self.peek().clone() {
            Tok::Num(r) if r.is_integer() => {
                i64::try_from(r.to_integer()).map_err(|_| self.error("exponent too large"))?
            }
            other => return Err(self.error(format!("expected an integer exponent, found {}", other.describe()))),
        };
        if exp < 0 && self.domain == Domain::Q {
            return Err(self.unsupported("negative exponent"));
        }
        self.bump();
        Ok(base.pow(exp))
    }
}

/// Parses over the positive rationals.
pub fn parse(text: &str) -> Result<Formula> {
    parse_in(text, Domain::QPos)
}

/// Parses a formula, rejecting constructs that the domain does not
/// support, then renames bound variables apart from each other and from
/// the free variables.
pub fn parse_in(text: &str, domain: Domain) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        domain,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(format!("unexpected {}", p.peek().describe())));
    }
    Ok(rename_bound(&f))
}

fn rename_bound(f: &Formula) -> Formula {
    let mut taken = f.free_vars();
    let all = f.all_vars();
    rename(f, &BTreeMap::new(), &mut taken, &all)
}

fn fresh(x: &str, taken: &BTreeSet<String>, all: &BTreeSet<String>) -> String {
    (1..)
        .map(|k| format!("{x}_{k}"))
        .find(|c| !taken.contains(c) && !all.contains(c))
        .unwrap()
}

fn rename(
    f: &Formula,
    scope: &BTreeMap<String, String>,
    taken: &mut BTreeSet<String>,
    all: &BTreeSet<String>,
) -> Formula {
    let binder = |x: &String, body: &Formula, taken: &mut BTreeSet<String>| {
        let name = if taken.contains(x) {
            fresh(x, taken, all)
        } else {
            x.clone()
        };
        taken.insert(name.clone());
        let mut inner = scope.clone();
        inner.insert(x.clone(), name.clone());
        (name, rename(body, &inner, taken, all))
    };
    match f {
        Formula::Atom(a) => Formula::Atom(a.map_terms(|t| {
            Monomial::new(
                t.coeff().clone(),
                t.powers()
                    .iter()
                    .map(|(v, e)| (scope.get(v).cloned().unwrap_or_else(|| v.clone()), *e)),
            )
        })),
        Formula::Top | Formula::Bottom => f.clone(),
        Formula::Not(g) => Formula::not(rename(g, scope, taken, all)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| rename(g, scope, taken, all)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| rename(g, scope, taken, all)).collect()),
        Formula::Implies(a, b) => {
            let a = rename(a, scope, taken, all);
            Formula::implies(a, rename(b, scope, taken, all))
        }
        Formula::Exists(x, g) => {
            let (x, g) = binder(x, g, taken);
            Formula::exists(x, g)
        }
        Formula::Forall(x, g) => {
            let (x, g) = binder(x, g, taken);
            Formula::forall(x, g)
        }
    }
}
