//! Rewrites that bring a formula into the shape the eliminator consumes:
//! negation normal form, existentials over conjunctions of literals, and
//! literals solved for the eliminated variable.
//!
//! `isolate` and `simplify` use equivalences that only hold over the
//! positive rationals (every term is invertible and nonzero).

use num_traits::One;

use super::{Atom, Formula, Literal, Monomial};
use crate::numtheory::is_nth_power;

/// A literal solved for a distinguished variable `x`, which occurs with the
/// positive exponent `exp` in the indicated position and nowhere else.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsolatedAtom {
    /// `x^exp = rhs`
    XEq { exp: u64, rhs: Monomial },
    /// `bound < x^exp`
    LowerBound { bound: Monomial, exp: u64 },
    /// `x^exp < bound`
    UpperBound { bound: Monomial, exp: u64 },
    /// `R[index](coeff * x^exp)`
    PosPow { index: u64, coeff: Monomial, exp: u64 },
    /// `!R[index](coeff * x^exp)`
    NegPow { index: u64, coeff: Monomial, exp: u64 },
    XFree(Literal),
}

impl IsolatedAtom {
    pub fn to_formula(&self, x: &str) -> Formula {
        let xp = |e: u64| Monomial::var(x).pow(e as i64);
        match self {
            IsolatedAtom::XEq { exp, rhs } => Formula::eq(xp(*exp), rhs.clone()),
            IsolatedAtom::LowerBound { bound, exp } => Formula::lt(bound.clone(), xp(*exp)),
            IsolatedAtom::UpperBound { bound, exp } => Formula::lt(xp(*exp), bound.clone()),
            IsolatedAtom::PosPow { index, coeff, exp } => Formula::pow(*index, coeff * &xp(*exp)),
            IsolatedAtom::NegPow { index, coeff, exp } => {
                Formula::not(Formula::pow(*index, coeff * &xp(*exp)))
            }
            IsolatedAtom::XFree(lit) => lit.to_formula(),
        }
    }
}

fn nnf(f: &Formula, negate: bool) -> Formula {
    match f {
        Formula::Top if negate => Formula::Bottom,
        Formula::Bottom if negate => Formula::Top,
        Formula::Top | Formula::Bottom => f.clone(),
        Formula::Atom(a) if !negate => Formula::Atom(a.clone()),
        Formula::Atom(Atom::Eq(u, v)) => Formula::Or(vec![
            Formula::lt(u.clone(), v.clone()),
            Formula::lt(v.clone(), u.clone()),
        ]),
        Formula::Atom(Atom::Lt(u, v)) => Formula::Or(vec![
            Formula::eq(u.clone(), v.clone()),
            Formula::lt(v.clone(), u.clone()),
        ]),
        Formula::Atom(a @ Atom::Pow(..)) => Formula::not(Formula::Atom(a.clone())),
        Formula::Not(g) => nnf(g, !negate),
        Formula::And(gs) => {
            let parts = gs.iter().map(|g| nnf(g, negate)).collect();
            if negate {
                Formula::Or(parts)
            } else {
                Formula::And(parts)
            }
        }
        Formula::Or(gs) => {
            let parts = gs.iter().map(|g| nnf(g, negate)).collect();
            if negate {
                Formula::And(parts)
            } else {
                Formula::Or(parts)
            }
        }
        Formula::Implies(a, b) => {
            if negate {
                Formula::And(vec![nnf(a, false), nnf(b, true)])
            } else {
                Formula::Or(vec![nnf(a, true), nnf(b, false)])
            }
        }
        Formula::Exists(x, g) => {
            let e = Formula::exists(x.clone(), nnf(g, false));
            if negate {
                Formula::not(e)
            } else {
                e
            }
        }
        // ∀x φ ≡ ¬∃x ¬φ
        Formula::Forall(x, g) => {
            let e = Formula::exists(x.clone(), nnf(g, true));
            if negate {
                e
            } else {
                Formula::not(e)
            }
        }
    }
}

/// Negation normal form without implications or universal quantifiers.
/// `!` survives only directly above power atoms and above existentials.
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, false)
}

/// Disjunctive normal form of an NNF formula as a list of conjunct lists.
/// Anything that is not `&`, `|`, `true` or `false` counts as a literal.
pub fn conjuncts_to_dnf(f: &Formula) -> Vec<Vec<Formula>> {
    match f {
        Formula::Top => vec![vec![]],
        Formula::Bottom => vec![],
        Formula::Or(gs) => gs.iter().flat_map(conjuncts_to_dnf).collect(),
        Formula::And(gs) => {
            let mut acc: Vec<Vec<Formula>> = vec![vec![]];
            for g in gs {
                let clauses = conjuncts_to_dnf(g);
                let mut next = Vec::with_capacity(acc.len() * clauses.len());
                for prefix in &acc {
                    for clause in &clauses {
                        let mut c = prefix.clone();
                        c.extend(clause.iter().cloned());
                        next.push(c);
                    }
                }
                acc = next;
            }
            acc
        }
        other => vec![vec![other.clone()]],
    }
}

fn conj(mut parts: Vec<Formula>) -> Formula {
    match parts.len() {
        0 => Formula::Top,
        1 => parts.pop().unwrap(),
        _ => Formula::And(parts),
    }
}

fn disj(mut parts: Vec<Formula>) -> Formula {
    match parts.len() {
        0 => Formula::Bottom,
        1 => parts.pop().unwrap(),
        _ => Formula::Or(parts),
    }
}

/// Pushes every existential through disjunctions so its body is a
/// conjunction of literals mentioning the bound variable; conjuncts
/// without it are hoisted out. Expects NNF input.
pub fn distribute_exists(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(distribute_exists(g)),
        Formula::And(gs) => Formula::And(gs.iter().map(distribute_exists).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(distribute_exists).collect()),
        Formula::Implies(a, b) => Formula::implies(distribute_exists(a), distribute_exists(b)),
        Formula::Forall(x, g) => Formula::forall(x.clone(), distribute_exists(g)),
        Formula::Exists(x, g) => {
            let body = distribute_exists(g);
            let branches = conjuncts_to_dnf(&body)
                .into_iter()
                .map(|clause| {
                    let (dependent, mut free): (Vec<_>, Vec<_>) =
                        clause.into_iter().partition(|l| l.mentions(x));
                    if !dependent.is_empty() {
                        free.push(Formula::exists(x.clone(), conj(dependent)));
                    }
                    conj(free)
                })
                .collect();
            disj(branches)
        }
    }
}

/// Solves an atom for `x` over the positive rationals.
pub fn isolate(atom: &Atom, x: &str) -> IsolatedAtom {
    isolate_literal(&Literal::pos(atom.clone()), x)
}

pub fn isolate_literal(lit: &Literal, x: &str) -> IsolatedAtom {
    if !lit.atom.mentions(x) {
        return IsolatedAtom::XFree(lit.clone());
    }
    match (&lit.atom, lit.positive) {
        // u = v  ⟺  x^k · c = 1
        (Atom::Eq(u, v), true) => {
            let w = u * &v.inv();
            let (k, c) = (w.exponent_of(x), w.without(x));
            match k {
                0 => IsolatedAtom::XFree(Literal::pos(Atom::Eq(u.without(x), v.without(x)))),
                k if k > 0 => IsolatedAtom::XEq {
                    exp: k as u64,
                    rhs: c.inv(),
                },
                k => IsolatedAtom::XEq {
                    exp: k.unsigned_abs(),
                    rhs: c,
                },
            }
        }
        // u < v  ⟺  x^k · c < 1
        (Atom::Lt(u, v), true) => {
            let w = u * &v.inv();
            let (k, c) = (w.exponent_of(x), w.without(x));
            match k {
                0 => IsolatedAtom::XFree(Literal::pos(Atom::Lt(u.without(x), v.without(x)))),
                k if k > 0 => IsolatedAtom::UpperBound {
                    bound: c.inv(),
                    exp: k as u64,
                },
                k => IsolatedAtom::LowerBound {
                    bound: c,
                    exp: k.unsigned_abs(),
                },
            }
        }
        // R_n(w) ⟺ R_n(w⁻¹)
        (Atom::Pow(n, t), positive) => {
            let (k, c) = (t.exponent_of(x), t.without(x));
            let (exp, coeff) = match k {
                0 => {
                    return IsolatedAtom::XFree(Literal {
                        atom: Atom::Pow(*n, c),
                        positive,
                    })
                }
                k if k > 0 => (k as u64, c),
                k => (k.unsigned_abs(), c.inv()),
            };
            match (positive, *n) {
                (true, index) => IsolatedAtom::PosPow { index, coeff, exp },
                // ¬R_1 is false whatever x is
                (false, 1) => IsolatedAtom::XFree(Literal::neg(Atom::Pow(1, Monomial::one()))),
                (false, index) => IsolatedAtom::NegPow { index, coeff, exp },
            }
        }
        (_, false) => panic!("negated order or equality literal: convert to NNF first"),
    }
}

/// Replaces the free occurrences of `x` by `t`.
pub fn substitute(f: &Formula, x: &str, t: &Monomial) -> Formula {
    match f {
        Formula::Exists(y, _) | Formula::Forall(y, _) if y == x => f.clone(),
        Formula::Exists(y, g) => Formula::exists(y.clone(), substitute(g, x, t)),
        Formula::Forall(y, g) => Formula::forall(y.clone(), substitute(g, x, t)),
        Formula::Atom(a) => Formula::Atom(a.map_terms(|m| m.substitute(x, t))),
        Formula::Top | Formula::Bottom => f.clone(),
        Formula::Not(g) => Formula::not(substitute(g, x, t)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| substitute(g, x, t)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| substitute(g, x, t)).collect()),
        Formula::Implies(a, b) => Formula::implies(substitute(a, x, t), substitute(b, x, t)),
    }
}

fn simplify_atom(a: &Atom) -> Formula {
    let truth = |b: bool| if b { Formula::Top } else { Formula::Bottom };
    match a {
        Atom::Eq(u, v) => {
            let q = u * &v.inv();
            if q.is_constant() {
                truth(q.coeff().is_one())
            } else {
                Formula::Atom(a.clone())
            }
        }
        Atom::Lt(u, v) => {
            let q = u * &v.inv();
            if q.is_constant() {
                truth(*q.coeff() < One::one())
            } else {
                Formula::Atom(a.clone())
            }
        }
        Atom::Pow(1, _) => Formula::Top,
        Atom::Pow(n, t) if t.is_constant() => {
            truth(is_nth_power(t.coeff(), *n).expect("power atom over a positive constant"))
        }
        Atom::Pow(..) => Formula::Atom(a.clone()),
    }
}

/// Folds constant atoms, `R[1]`, and `true`/`false` through the
/// connectives; drops vacuous quantifiers. Positive-rational semantics.
pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Bottom => f.clone(),
        Formula::Atom(a) => simplify_atom(a),
        Formula::Not(g) => match simplify(g) {
            Formula::Top => Formula::Bottom,
            Formula::Bottom => Formula::Top,
            Formula::Not(h) => *h,
            other => Formula::not(other),
        },
        Formula::And(gs) => {
            let mut parts: Vec<Formula> = Vec::new();
            for g in gs {
                match simplify(g) {
                    Formula::Top => {}
                    Formula::Bottom => return Formula::Bottom,
                    Formula::And(inner) => parts.extend(inner),
                    other => parts.push(other),
                }
            }
            dedup(&mut parts);
            conj(parts)
        }
        Formula::Or(gs) => {
            let mut parts: Vec<Formula> = Vec::new();
            for g in gs {
                match simplify(g) {
                    Formula::Bottom => {}
                    Formula::Top => return Formula::Top,
                    Formula::Or(inner) => parts.extend(inner),
                    other => parts.push(other),
                }
            }
            dedup(&mut parts);
            disj(parts)
        }
        Formula::Implies(a, b) => match (simplify(a), simplify(b)) {
            (Formula::Bottom, _) | (_, Formula::Top) => Formula::Top,
            (Formula::Top, b) => b,
            (a, Formula::Bottom) => simplify(&Formula::not(a)),
            (a, b) => Formula::implies(a, b),
        },
        Formula::Exists(x, g) | Formula::Forall(x, g) => {
            let body = simplify(g);
            if !body.mentions(x) {
                body
            } else if matches!(f, Formula::Exists(..)) {
                Formula::exists(x.clone(), body)
            } else {
                Formula::forall(x.clone(), body)
            }
        }
    }
}

fn dedup(parts: &mut Vec<Formula>) {
    let mut seen = std::collections::HashSet::new();
    parts.retain(|p| seen.insert(p.clone()));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::numtheory::int;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn v(x: &str) -> Monomial {
        Monomial::var(x)
    }

    fn only_allowed_negations(f: &Formula) -> bool {
        match f {
            Formula::Not(g) => matches!(**g, Formula::Atom(Atom::Pow(..)) | Formula::Exists(..))
                && only_allowed_negations(g),
            Formula::Implies(..) | Formula::Forall(..) => false,
            Formula::And(gs) | Formula::Or(gs) => gs.iter().all(only_allowed_negations),
            Formula::Exists(_, g) => only_allowed_negations(g),
            _ => true,
        }
    }

    #[test]
    fn negated_equality_and_order() {
        assert_eq!(to_nnf(&p("!(a = b)")), p("a < b | b < a"));
        assert_eq!(to_nnf(&p("!(a < b)")), p("a = b | b < a"));
    }

    #[test]
    fn universal_becomes_negated_existential() {
        let f = to_nnf(&p("forall x. R[2](x)"));
        assert_eq!(f, p("!(exists x. !R[2](x))"));
        assert!(only_allowed_negations(&f));
        let g = to_nnf(&p("forall x. (R[2](x) -> !(x < a & !R[3](a)))"));
        assert!(only_allowed_negations(&g));
    }

    #[test]
    fn distributes_over_disjunction() {
        let f = distribute_exists(&p("exists x. (x < a | R[2](x))"));
        assert_eq!(f.to_string(), "(exists x. x < a) | (exists x. R[2](x))");
        let f = distribute_exists(&p("exists x. (x < a & (R[2](x) | x = b))"));
        assert_eq!(f.to_string(), "(exists x. x < a & R[2](x)) | (exists x. x < a & x = b)");
    }

    #[test]
    fn hoists_free_conjuncts() {
        let f = distribute_exists(&p("exists x. (a < b & x < a)"));
        assert_eq!(f, p("a < b & (exists x. x < a)"));
        assert_eq!(distribute_exists(&p("exists x. a < b")), p("a < b"));
    }

    #[test]
    fn isolate_examples() {
        let a = Monomial::var("a");
        assert_eq!(
            isolate(&Atom::Lt(a.clone(), v("x").pow(-2)), "x"),
            IsolatedAtom::UpperBound { bound: a.inv(), exp: 2 }
        );
        let t = &a * &v("x").pow(-2);
        assert_eq!(
            isolate(&Atom::Pow(3, t), "x"),
            IsolatedAtom::PosPow { index: 3, coeff: a.inv(), exp: 2 }
        );
        let lhs = &v("x").pow(2) * &a;
        let rhs = &v("x").pow(2) * &v("b");
        match isolate(&Atom::Eq(lhs, rhs), "x") {
            IsolatedAtom::XFree(lit) => assert_eq!(lit, Literal::pos(Atom::Eq(a.clone(), v("b")))),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            isolate(&Atom::Lt(&v("x").pow(-3) * &a, v("b")), "x"),
            IsolatedAtom::LowerBound { bound: &a * &v("b").inv(), exp: 3 }
        );
        assert_eq!(
            isolate(&Atom::Eq(v("x").pow(2), a.clone()), "x"),
            IsolatedAtom::XEq { exp: 2, rhs: a.clone() }
        );
        assert_eq!(
            isolate_literal(&Literal::neg(Atom::Pow(2, &a * &v("x").pow(-1))), "x"),
            IsolatedAtom::NegPow { index: 2, coeff: a.inv(), exp: 1 }
        );
    }

    #[test]
    fn substitute_examples() {
        let b2 = v("b").pow(2);
        assert_eq!(substitute(&p("x < a"), "x", &b2), p("b^2 < a"));
        assert_eq!(substitute(&p("R[2](x * a)"), "x", &v("a")), p("R[2](a^2)"));
        let f = substitute(&p("x = x"), "x", &v("t"));
        assert_eq!(f, p("t = t"));
        assert_eq!(simplify(&f), Formula::Top);
        // bound occurrences are left alone
        let f = Formula::exists("x", p("x < a"));
        assert_eq!(substitute(&f, "x", &b2), f);
    }

    #[test]
    fn simplify_folds_constants() {
        assert_eq!(simplify(&p("1 < 2 & R[2](4/9) & !R[3](2)")), Formula::Top);
        assert_eq!(simplify(&p("a < b & 2 < 1")), Formula::Bottom);
        assert_eq!(simplify(&Formula::pow(1, v("a"))), Formula::Top);
        assert_eq!(simplify(&p("a * b^-1 < a * b^-1")), Formula::Bottom);
        assert_eq!(simplify(&p("(a < b & a < b) | false")), p("a < b"));
        assert_eq!(simplify(&Formula::exists("x", p("a < b"))), p("a < b"));
        assert_eq!(simplify(&Formula::eq(Monomial::constant(int(3)), Monomial::constant(int(3)))), Formula::Top);
    }
}
