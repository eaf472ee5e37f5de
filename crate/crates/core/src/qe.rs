//! Quantifier elimination over the positive rationals.
//!
//! An innermost `exists x. φ` with quantifier-free `φ` is eliminated by:
//!
//! 1. putting `φ` in negation normal form and splitting the existential
//!    over the disjuncts of its DNF;
//! 2. solving every literal of a disjunct for `x` ([`classify`]);
//! 3. raising every constraint so that `x` occurs to one common power `p`,
//!    then renaming `x^p` to a fresh variable constrained by `R[p]`
//!    ([`unify_powers`]);
//! 4. replacing the existential by an equivalent quantifier-free formula
//!    ([`eliminate_one`]).
//!
//! For step 4 without equalities, the constraints
//! `⋀ r_i < x ∧ ⋀ x < s_j ∧ ⋀ R[n_k](t_k·x) ∧ ⋀ ¬R[m_l](u_l·x)` are
//! satisfiable iff
//!
//! ```text
//! ⋀ r_i < s_j  ∧  ⋀_{κ<λ} R[gcd(n_κ, n_λ)](t_κ / t_λ)  ∧  ⋀_{m_l | N} ¬R[m_l](u_l · t)
//! ```
//!
//! where `N = lcm(n_k)`, `t = ∏ t_k^(-ν_k)` and `ν_k = c_k·N/n_k` with
//! `Σ c_k·N/n_k = 1`. Every solution of the power constraints has the form
//! `γ^N · t`; negated powers with `m_l ∤ N` can always be dodged by a prime
//! factor that appears nowhere else.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::formula::{
    distribute_exists, isolate_literal, simplify, to_nnf, Atom, Formula, IsolatedAtom, Literal,
    Monomial,
};
use crate::numtheory::{to_i64, unit_combination};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Nnf,
    Distribute,
    Isolate,
    UnifyPowers,
    SubstEquality,
    EmitQf,
}

impl Rule {
    pub const ALL: [Rule; 6] = [
        Rule::Nnf,
        Rule::Distribute,
        Rule::Isolate,
        Rule::UnifyPowers,
        Rule::SubstEquality,
        Rule::EmitQf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Nnf => "nnf",
            Rule::Distribute => "distribute",
            Rule::Isolate => "isolate",
            Rule::UnifyPowers => "unify_powers",
            Rule::SubstEquality => "subst_equality",
            Rule::EmitQf => "emit_qf",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One rewrite of an elimination run; `before` and `after` are equivalent
/// over the positive rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: Rule,
    pub before: Formula,
    pub after: Formula,
}

/// `x^exp` related to an x-free term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bound {
    pub exp: u64,
    pub term: Monomial,
}

/// `R[index](coeff · x^exp)`, or its negation when held in `neg_pows`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerConstraint {
    pub index: u64,
    pub coeff: Monomial,
    pub exp: u64,
}

/// The conjuncts of one existential sorted by shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifiedConstraints {
    pub var: String,
    /// `p` such that the constraints speak about `var^p` of the original
    /// variable; 1 until [`unify_powers`] runs.
    pub power: u64,
    /// `x^exp = term`
    pub equalities: Vec<Bound>,
    /// `term < x^exp`
    pub lowers: Vec<Bound>,
    /// `x^exp < term`
    pub uppers: Vec<Bound>,
    pub pos_pows: Vec<PowerConstraint>,
    pub neg_pows: Vec<PowerConstraint>,
    /// x-free literals carried through unchanged.
    pub residue: Vec<Formula>,
}

impl ClassifiedConstraints {
    pub fn new(var: impl Into<String>) -> Self {
        ClassifiedConstraints {
            var: var.into(),
            power: 1,
            equalities: vec![],
            lowers: vec![],
            uppers: vec![],
            pos_pows: vec![],
            neg_pows: vec![],
            residue: vec![],
        }
    }

    pub fn push(&mut self, atom: IsolatedAtom) {
        match atom {
            IsolatedAtom::XEq { exp, rhs } => self.equalities.push(Bound { exp, term: rhs }),
            IsolatedAtom::LowerBound { bound, exp } => self.lowers.push(Bound { exp, term: bound }),
            IsolatedAtom::UpperBound { bound, exp } => self.uppers.push(Bound { exp, term: bound }),
            IsolatedAtom::PosPow { index, coeff, exp } => {
                self.pos_pows.push(PowerConstraint { index, coeff, exp })
            }
            IsolatedAtom::NegPow { index, coeff, exp } => {
                self.neg_pows.push(PowerConstraint { index, coeff, exp })
            }
            IsolatedAtom::XFree(lit) => self.residue.push(lit.to_formula()),
        }
    }

    /// Conjunction of all constraints, in the variable `var`.
    pub fn matrix(&self) -> Formula {
        let x = self.var.as_str();
        let xp = |e: u64| Monomial::var(x).pow(e as i64);
        let mut parts = Vec::new();
        parts.extend(self.equalities.iter().map(|b| Formula::eq(xp(b.exp), b.term.clone())));
        parts.extend(self.lowers.iter().map(|b| Formula::lt(b.term.clone(), xp(b.exp))));
        parts.extend(self.uppers.iter().map(|b| Formula::lt(xp(b.exp), b.term.clone())));
        parts.extend(
            self.pos_pows
                .iter()
                .map(|p| Formula::pow(p.index, &p.coeff * &xp(p.exp))),
        );
        parts.extend(
            self.neg_pows
                .iter()
                .map(|p| Formula::not(Formula::pow(p.index, &p.coeff * &xp(p.exp)))),
        );
        parts.extend(self.residue.iter().cloned());
        Formula::And(parts)
    }

    /// `exists var. matrix`
    pub fn to_formula(&self) -> Formula {
        Formula::exists(self.var.clone(), self.matrix())
    }

    fn exponents(&self) -> impl Iterator<Item = u64> + '_ {
        self.equalities
            .iter()
            .chain(&self.lowers)
            .chain(&self.uppers)
            .map(|b| b.exp)
            .chain(self.pos_pows.iter().chain(&self.neg_pows).map(|p| p.exp))
    }
}

/// Turns an NNF conjunct into a literal. Anything else is a caller bug.
pub fn as_literal(f: &Formula) -> Literal {
    match f {
        Formula::Atom(a) => Literal::pos(a.clone()),
        Formula::Not(g) => match g.as_ref() {
            Formula::Atom(a) => Literal::neg(a.clone()),
            other => panic!("not a literal: !{other}"),
        },
        Formula::Top => Literal::pos(Atom::Pow(1, Monomial::one())),
        Formula::Bottom => Literal::neg(Atom::Pow(1, Monomial::one())),
        other => panic!("not a literal: {other}"),
    }
}

/// Solves each literal for `x` and sorts it into its bucket.
pub fn classify(conjuncts: &[Formula], x: &str) -> ClassifiedConstraints {
    let mut c = ClassifiedConstraints::new(x);
    for f in conjuncts {
        c.push(isolate_literal(&as_literal(f), x));
    }
    c
}

/// Raises every constraint so the variable occurs with exponent 1, standing
/// for `x^p` with `p` the lcm of all exponents, and adds `R[p]` of it.
pub fn unify_powers(c: &ClassifiedConstraints) -> ClassifiedConstraints {
    let p = c.exponents().fold(1u64, |acc, e| acc.lcm(&e));
    let scale = |e: u64| (p / e) as i64;
    let bound = |b: &Bound| Bound {
        exp: 1,
        term: b.term.pow(scale(b.exp)),
    };
    let power = |pc: &PowerConstraint| PowerConstraint {
        index: pc.index.checked_mul(p / pc.exp).expect("power index overflow"),
        coeff: pc.coeff.pow(scale(pc.exp)),
        exp: 1,
    };
    let mut out = ClassifiedConstraints {
        var: c.var.clone(),
        power: c.power * p,
        equalities: c.equalities.iter().map(bound).collect(),
        lowers: c.lowers.iter().map(bound).collect(),
        uppers: c.uppers.iter().map(bound).collect(),
        pos_pows: c.pos_pows.iter().map(power).collect(),
        neg_pows: c.neg_pows.iter().map(power).collect(),
        residue: c.residue.clone(),
    };
    if p > 1 {
        out.pos_pows.push(PowerConstraint {
            index: p,
            coeff: Monomial::one(),
            exp: 1,
        });
    }
    out
}

/// Quantifier-free equivalent of `exists var. matrix` for constraints
/// already unified to the first power.
pub fn eliminate_one(c: &ClassifiedConstraints) -> Formula {
    debug_assert!(c.exponents().all(|e| e == 1), "constraints not unified");
    let mut parts = c.residue.clone();

    if let Some((first, rest)) = c.equalities.split_first() {
        let v0 = &first.term;
        parts.extend(rest.iter().map(|b| Formula::eq(v0.clone(), b.term.clone())));
        parts.extend(c.lowers.iter().map(|b| Formula::lt(b.term.clone(), v0.clone())));
        parts.extend(c.uppers.iter().map(|b| Formula::lt(v0.clone(), b.term.clone())));
        parts.extend(c.pos_pows.iter().map(|p| Formula::pow(p.index, &p.coeff * v0)));
        parts.extend(
            c.neg_pows
                .iter()
                .map(|p| Formula::not(Formula::pow(p.index, &p.coeff * v0))),
        );
        return simplify(&Formula::And(parts));
    }

    for r in &c.lowers {
        for s in &c.uppers {
            parts.push(Formula::lt(r.term.clone(), s.term.clone()));
        }
    }

    for (i, a) in c.pos_pows.iter().enumerate() {
        for b in &c.pos_pows[i + 1..] {
            let g = a.index.gcd(&b.index);
            parts.push(Formula::pow(g, &a.coeff * &b.coeff.inv()));
        }
    }

    let moduli: Vec<BigInt> = c.pos_pows.iter().map(|p| BigInt::from(p.index)).collect();
    let (lcm, witness_base) = match unit_combination(&moduli) {
        None => (BigInt::from(1), Monomial::one()),
        Some(u) => {
            let t = c
                .pos_pows
                .iter()
                .zip(&u.exponents)
                .fold(Monomial::one(), |acc, (p, nu)| &acc * &p.coeff.pow(-to_i64(nu)));
            (u.modulus_lcm, t)
        }
    };
    for neg in &c.neg_pows {
        if lcm.is_multiple_of(&BigInt::from(neg.index)) {
            parts.push(Formula::not(Formula::pow(neg.index, &neg.coeff * &witness_base)));
        }
    }
    simplify(&Formula::And(parts))
}

fn eliminate_conjunction(x: &str, conjuncts: &[Formula], trace: &mut Vec<TraceStep>) -> Formula {
    let classified = classify(conjuncts, x);
    trace.push(TraceStep {
        rule: Rule::Isolate,
        before: Formula::exists(x, Formula::And(conjuncts.to_vec())),
        after: classified.to_formula(),
    });
    let unified = unify_powers(&classified);
    if unified != classified {
        trace.push(TraceStep {
            rule: Rule::UnifyPowers,
            before: classified.to_formula(),
            after: unified.to_formula(),
        });
    }
    let out = eliminate_one(&unified);
    trace.push(TraceStep {
        rule: if unified.equalities.is_empty() {
            Rule::EmitQf
        } else {
            Rule::SubstEquality
        },
        before: unified.to_formula(),
        after: out.clone(),
    });
    out
}

fn replace_exists(f: &Formula, trace: &mut Vec<TraceStep>) -> Formula {
    match f {
        Formula::Exists(x, body) => {
            let conjuncts = match body.as_ref() {
                Formula::And(parts) => parts.clone(),
                single => vec![single.clone()],
            };
            eliminate_conjunction(x, &conjuncts, trace)
        }
        Formula::And(gs) => Formula::And(gs.iter().map(|g| replace_exists(g, trace)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| replace_exists(g, trace)).collect()),
        Formula::Not(g) => Formula::not(replace_exists(g, trace)),
        other => other.clone(),
    }
}

fn eliminate_exists(x: &str, body: &Formula, trace: &mut Vec<TraceStep>) -> Formula {
    let nnf = simplify(&to_nnf(body));
    if nnf != *body {
        trace.push(TraceStep {
            rule: Rule::Nnf,
            before: body.clone(),
            after: nnf.clone(),
        });
    }
    let quantified = Formula::exists(x, nnf);
    let distributed = distribute_exists(&quantified);
    if distributed != quantified {
        trace.push(TraceStep {
            rule: Rule::Distribute,
            before: quantified,
            after: distributed.clone(),
        });
    }
    simplify(&replace_exists(&distributed, trace))
}

fn eliminate(f: &Formula, trace: &mut Vec<TraceStep>) -> Formula {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(eliminate(g, trace)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| eliminate(g, trace)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| eliminate(g, trace)).collect()),
        Formula::Implies(a, b) => Formula::implies(eliminate(a, trace), eliminate(b, trace)),
        Formula::Exists(x, g) => {
            let body = eliminate(g, trace);
            eliminate_exists(x, &body, trace)
        }
        Formula::Forall(x, g) => {
            let body = eliminate(g, trace);
            // ∀x φ ≡ ¬∃x ¬φ
            let negated = Formula::not(body.clone());
            trace.push(TraceStep {
                rule: Rule::Nnf,
                before: Formula::forall(x.clone(), body),
                after: Formula::not(Formula::exists(x.clone(), negated.clone())),
            });
            simplify(&Formula::not(eliminate_exists(x, &negated, trace)))
        }
    }
}

/// Removes every quantifier, innermost first. Quantifier-free input comes
/// back unchanged with an empty trace.
pub fn eliminate_all(f: &Formula) -> (Formula, Vec<TraceStep>) {
    if f.is_quantifier_free() {
        return (f.clone(), Vec::new());
    }
    let mut trace = Vec::new();
    let out = simplify(&eliminate(f, &mut trace));
    (out, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::numtheory::int;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn conjuncts(s: &str) -> Vec<Formula> {
        match to_nnf(&p(s)) {
            Formula::And(parts) => parts,
            single => vec![single],
        }
    }

    fn c(n: i64) -> Monomial {
        Monomial::constant(int(n))
    }

    fn a() -> Monomial {
        Monomial::var("a")
    }

    fn pc(index: u64, coeff: Monomial) -> PowerConstraint {
        PowerConstraint { index, coeff, exp: 1 }
    }

    #[test]
    fn classify_sorts_literals() {
        let k = classify(&conjuncts("1 < x & x < 2 & R[2](x)"), "x");
        assert_eq!(k.lowers, vec![Bound { exp: 1, term: c(1) }]);
        assert_eq!(k.uppers, vec![Bound { exp: 1, term: c(2) }]);
        assert_eq!(k.pos_pows, vec![PowerConstraint { index: 2, coeff: c(1), exp: 1 }]);

        let k = classify(&conjuncts("x^2 = a & a^2 < x^3"), "x");
        assert_eq!(k.equalities, vec![Bound { exp: 2, term: a() }]);
        assert_eq!(k.lowers, vec![Bound { exp: 3, term: a().pow(2) }]);

        let k = classify(&conjuncts("a < b"), "x");
        assert_eq!(k.residue, vec![p("a < b")]);
        assert!(k.lowers.is_empty() && k.pos_pows.is_empty());
    }

    #[test]
    fn unify_examples() {
        let k = unify_powers(&classify(&conjuncts("x^2 = a & a^2 < x^3"), "x"));
        assert_eq!(k.power, 6);
        assert_eq!(k.equalities, vec![Bound { exp: 1, term: a().pow(3) }]);
        assert_eq!(k.lowers, vec![Bound { exp: 1, term: a().pow(4) }]);
        assert_eq!(k.pos_pows, vec![pc(6, Monomial::one())]);

        let before = classify(&conjuncts("R[2](t * x)"), "x");
        assert_eq!(unify_powers(&before), before);

        let k = unify_powers(&classify(&conjuncts("!R[2](u * x^3)"), "x"));
        assert_eq!(k.neg_pows, vec![pc(2, Monomial::var("u"))]);
        assert_eq!(k.pos_pows, vec![pc(3, Monomial::one())]);
    }

    #[test]
    fn bounds_only() {
        let mut k = ClassifiedConstraints::new("x");
        k.lowers.push(Bound { exp: 1, term: a() });
        k.uppers.push(Bound { exp: 1, term: Monomial::var("b") });
        assert_eq!(eliminate_one(&k), p("a < b"));
    }

    #[test]
    fn compatible_powers_collapse_to_true() {
        // exists x. R[2](2x) & R[3](4x): N = 6, nu = (3, -2), t = 2
        let mut k = ClassifiedConstraints::new("x");
        k.pos_pows = vec![pc(2, c(2)), pc(3, c(4))];
        assert_eq!(eliminate_one(&k), Formula::Top);
        // the witness base appears in the negated-power conjunct
        k.neg_pows = vec![pc(6, a())];
        assert_eq!(eliminate_one(&k), p("!R[6](2 * a)"));
    }

    #[test]
    fn divisible_negated_power_is_false() {
        let mut k = ClassifiedConstraints::new("x");
        k.pos_pows = vec![pc(2, c(1)), pc(3, c(1))];
        k.neg_pows = vec![pc(6, c(1))];
        assert_eq!(eliminate_one(&k), Formula::Bottom);
        // 4 does not divide N = 6, so the conjunct is dropped
        k.neg_pows = vec![pc(4, c(1))];
        assert_eq!(eliminate_one(&k), Formula::Top);
    }

    #[test]
    fn pairwise_gcd_conditions() {
        let mut k = ClassifiedConstraints::new("x");
        k.pos_pows = vec![pc(4, a()), pc(6, Monomial::var("b"))];
        assert_eq!(eliminate_one(&k), p("R[2](a * b^-1)"));
    }

    #[test]
    fn equality_branch_substitutes_first_equation() {
        let k = unify_powers(&classify(&conjuncts("x = a & x = b & x < c & R[2](x)"), "x"));
        assert_eq!(eliminate_one(&k), p("a = b & a < c & R[2](a)"));
    }

    #[test]
    fn eliminate_all_examples() {
        let (out, trace) = eliminate_all(&p("exists x. 1 < x & x < 2 & R[2](x)"));
        assert_eq!(out, Formula::Top);
        assert!(!trace.is_empty());

        let (out, _) = eliminate_all(&p("forall x. exists y. x < y & R[2](inv(x) * y)"));
        assert_eq!(out, Formula::Top);

        let qf = p("a < b & R[3](a)");
        assert_eq!(eliminate_all(&qf), (qf.clone(), vec![]));

        let (out, _) = eliminate_all(&p("exists x. a < x & x < b & R[2](x)"));
        assert_eq!(out, p("a < b"));
    }

    #[test]
    fn rule_names_are_stable() {
        let names: Vec<_> = Rule::ALL.iter().map(|r| r.name()).collect();
        assert_eq!(
            names,
            ["nnf", "distribute", "isolate", "unify_powers", "subst_equality", "emit_qf"]
        );
    }
}
