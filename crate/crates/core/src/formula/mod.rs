//! Formulas over multiplication, order and the n-th power predicates.

mod normal;
mod parse;
mod print;
mod term;

use std::collections::BTreeSet;

pub use normal::{
    conjuncts_to_dnf, distribute_exists, isolate, isolate_literal, simplify, substitute, to_nnf,
    IsolatedAtom,
};
pub use parse::{parse, parse_in};
pub use print::print;
pub use term::{sign_of, Monomial};

/// Carrier the formula is read over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    /// Positive rationals, full language with `inv` and `R[n]`.
    QPos,
    /// All rationals, multiplication and order only.
    Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Eq(Monomial, Monomial),
    Lt(Monomial, Monomial),
    /// `R[n](t)`: t is the n-th power of a rational.
    Pow(u64, Monomial),
}

impl Atom {
    pub fn mentions(&self, x: &str) -> bool {
        match self {
            Atom::Eq(l, r) | Atom::Lt(l, r) => l.mentions(x) || r.mentions(x),
            Atom::Pow(_, t) => t.mentions(x),
        }
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Monomial) -> Monomial) -> Atom {
        match self {
            Atom::Eq(l, r) => Atom::Eq(f(l), f(r)),
            Atom::Lt(l, r) => Atom::Lt(f(l), f(r)),
            Atom::Pow(n, t) => Atom::Pow(*n, f(t)),
        }
    }

    pub fn terms(&self) -> Vec<&Monomial> {
        match self {
            Atom::Eq(l, r) | Atom::Lt(l, r) => vec![l, r],
            Atom::Pow(_, t) => vec![t],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bottom,
    Atom(Atom),
    Not(Box<Formula>),
    /// Empty conjunction is true.
    And(Vec<Formula>),
    /// Empty disjunction is false.
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

/// An atom or a negated atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal {
            atom,
            positive: true,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal {
            atom,
            positive: false,
        }
    }

    pub fn to_formula(&self) -> Formula {
        let a = Formula::Atom(self.atom.clone());
        if self.positive {
            a
        } else {
            Formula::not(a)
        }
    }
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn eq(l: Monomial, r: Monomial) -> Formula {
        Formula::Atom(Atom::Eq(l, r))
    }

    pub fn lt(l: Monomial, r: Monomial) -> Formula {
        Formula::Atom(Atom::Lt(l, r))
    }

    pub fn pow(n: u64, t: Monomial) -> Formula {
        Formula::Atom(Atom::Pow(n, t))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(x: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(body))
    }

    pub fn forall(x: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(x.into(), Box::new(body))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Implies(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    pub fn quantifier_count(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => 0,
            Formula::Not(f) => f.quantifier_count(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::quantifier_count).sum(),
            Formula::Implies(a, b) => a.quantifier_count() + b.quantifier_count(),
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_count(),
        }
    }

    /// Whether `x` occurs free.
    pub fn mentions(&self, x: &str) -> bool {
        match self {
            Formula::Top | Formula::Bottom => false,
            Formula::Atom(a) => a.mentions(x),
            Formula::Not(f) => f.mentions(x),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(|f| f.mentions(x)),
            Formula::Implies(a, b) => a.mentions(x) || b.mentions(x),
            Formula::Exists(y, f) | Formula::Forall(y, f) => y != x && f.mentions(x),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Top | Formula::Bottom => {}
            Formula::Atom(a) => {
                for t in a.terms() {
                    out.extend(t.vars().filter(|v| !bound.iter().any(|b| b == v)).map(String::from));
                }
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_free(bound, out);
                }
            }
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(x, f) | Formula::Forall(x, f) => {
                bound.push(x.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name appearing anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            for t in a.terms() {
                t.collect_vars(&mut out);
            }
        });
        self.visit_binders(&mut |x| {
            out.insert(x.to_string());
        });
        out
    }

    pub fn visit_atoms(&self, f: &mut impl FnMut(&Atom)) {
        match self {
            Formula::Top | Formula::Bottom => {}
            Formula::Atom(a) => f(a),
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.visit_atoms(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_atoms(f)),
            Formula::Implies(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
        }
    }

    fn visit_binders(&self, f: &mut impl FnMut(&str)) {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => {}
            Formula::Not(g) => g.visit_binders(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_binders(f)),
            Formula::Implies(a, b) => {
                a.visit_binders(f);
                b.visit_binders(f);
            }
            Formula::Exists(x, g) | Formula::Forall(x, g) => {
                f(x);
                g.visit_binders(f);
            }
        }
    }

    /// Rebuilds the formula with every atom replaced by `f(atom)`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Formula) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Bottom => Formula::Bottom,
            Formula::Atom(a) => f(a),
            Formula::Not(g) => Formula::not(g.map_atoms(f)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.map_atoms(f), b.map_atoms(f)),
            Formula::Exists(x, g) => Formula::exists(x.clone(), g.map_atoms(f)),
            Formula::Forall(x, g) => Formula::forall(x.clone(), g.map_atoms(f)),
        }
    }
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print(self))
    }
}
