//! Bounded checks over the integers for the definability of addition from
//! multiplication and order.
//!
//! With `S(u) = u + 1`:
//!
//! ```text
//! x + y = z  ⟺  [z = 0 ∧ S(x)·S(y) = S(x·y)] ∨ [z ≠ 0 ∧ S(z·x)·S(z·y) = S(z·z·S(x·y))]
//! ```
//!
//! where `S(x)·S(y) = S(x·y)` holds exactly when `x = -y`, and `S` itself is
//! definable from the order: `S(u) = v ⟺ ∀w [u < w ↔ v ≤ w]`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::formula::{Atom, Formula, Monomial};

fn succ(u: i128) -> i128 {
    u + 1
}

/// Right-hand side of the addition-defining formula, evaluated exactly.
pub fn tarski_sum_holds(x: i64, y: i64, z: i64) -> bool {
    let (x, y, z) = (x as i128, y as i128, z as i128);
    if z == 0 {
        succ(x) * succ(y) == succ(x * y)
    } else {
        succ(z * x) * succ(z * y) == succ(z * z * succ(x * y))
    }
}

/// `S(x)·S(y) = S(x·y)`, which defines `x = -y`.
pub fn negation_def_holds(x: i64, y: i64) -> bool {
    let (x, y) = (x as i128, y as i128);
    succ(x) * succ(y) == succ(x * y)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefinabilityReport {
    pub checked: u64,
    /// Triples where the formula and `x + y = z` disagree, sorted.
    pub mismatches: Vec<(i64, i64, i64)>,
}

impl fmt::Display for DefinabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "checked={} mismatches={}", self.checked, self.mismatches.len())?;
        for (x, y, z) in &self.mismatches {
            write!(f, "\nx={x} y={y} z={z}")?;
        }
        Ok(())
    }
}

/// Compares the defining formula with `x + y = z` on `[-bound, bound]³`.
pub fn check_addition_definability(bound: i64) -> Result<DefinabilityReport> {
    if bound < 1 {
        return Err(Error::Domain(format!("bound must be at least 1, got {bound}")));
    }
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for x in -bound..=bound {
        for y in -bound..=bound {
            for z in -bound..=bound {
                checked += 1;
                if tarski_sum_holds(x, y, z) != (x + y == z) {
                    mismatches.push((x, y, z));
                }
            }
        }
    }
    Ok(DefinabilityReport { checked, mismatches })
}

/// Terms over the integers with multiplication and successor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZTerm {
    Var(String),
    Lit(i64),
    Mul(Box<ZTerm>, Box<ZTerm>),
    Succ(Box<ZTerm>),
}

impl ZTerm {
    pub fn var(x: &str) -> ZTerm {
        ZTerm::Var(x.to_string())
    }

    pub fn mul(a: ZTerm, b: ZTerm) -> ZTerm {
        ZTerm::Mul(Box::new(a), Box::new(b))
    }

    pub fn succ(a: ZTerm) -> ZTerm {
        ZTerm::Succ(Box::new(a))
    }

    fn eval(&self, env: &BTreeMap<String, i128>) -> Result<i128> {
        let overflow = || Error::Domain("integer overflow in bounded evaluation".into());
        match self {
            ZTerm::Var(x) => env.get(x).copied().ok_or_else(|| Error::Unassigned(x.clone())),
            ZTerm::Lit(n) => Ok(*n as i128),
            ZTerm::Mul(a, b) => a.eval(env)?.checked_mul(b.eval(env)?).ok_or_else(overflow),
            ZTerm::Succ(a) => a.eval(env)?.checked_add(1).ok_or_else(overflow),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZFormula {
    True,
    False,
    Eq(ZTerm, ZTerm),
    Lt(ZTerm, ZTerm),
    Le(ZTerm, ZTerm),
    Not(Box<ZFormula>),
    And(Vec<ZFormula>),
    Or(Vec<ZFormula>),
    Implies(Box<ZFormula>, Box<ZFormula>),
    Iff(Box<ZFormula>, Box<ZFormula>),
    Exists(String, Box<ZFormula>),
    Forall(String, Box<ZFormula>),
}

impl ZFormula {
    pub fn iff(a: ZFormula, b: ZFormula) -> ZFormula {
        ZFormula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(x: &str, body: ZFormula) -> ZFormula {
        ZFormula::Forall(x.to_string(), Box::new(body))
    }

    /// Converts a parsed formula whose terms are integer monomials with
    /// non-negative exponents.
    pub fn from_formula(f: &Formula) -> Result<ZFormula> {
        let term = |m: &Monomial| -> Result<ZTerm> {
            if !m.coeff().is_integer() || m.has_negative_exponent() {
                return Err(Error::Unsupported(format!("non-integer term `{m}`")));
            }
            let c = m
                .coeff()
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Unsupported(format!("literal `{m}` too large")))?;
            let mut t = ZTerm::Lit(c);
            for (v, e) in m.powers() {
                for _ in 0..*e {
                    t = ZTerm::mul(t, ZTerm::var(v));
                }
            }
            Ok(t)
        };
        let sub = |g: &Formula| ZFormula::from_formula(g).map(Box::new);
        Ok(match f {
            Formula::Top => ZFormula::True,
            Formula::Bottom => ZFormula::False,
            Formula::Atom(Atom::Eq(l, r)) => ZFormula::Eq(term(l)?, term(r)?),
            Formula::Atom(Atom::Lt(l, r)) => ZFormula::Lt(term(l)?, term(r)?),
            Formula::Atom(Atom::Pow(..)) => {
                return Err(Error::Unsupported("power predicate over the integers".into()))
            }
            Formula::Not(g) => ZFormula::Not(sub(g)?),
            Formula::And(gs) => ZFormula::And(gs.iter().map(ZFormula::from_formula).collect::<Result<_>>()?),
            Formula::Or(gs) => ZFormula::Or(gs.iter().map(ZFormula::from_formula).collect::<Result<_>>()?),
            Formula::Implies(a, b) => ZFormula::Implies(sub(a)?, sub(b)?),
            Formula::Exists(x, g) => ZFormula::Exists(x.clone(), sub(g)?),
            Formula::Forall(x, g) => ZFormula::Forall(x.clone(), sub(g)?),
        })
    }

    fn eval(&self, bound: i64, env: &mut BTreeMap<String, i128>) -> Result<bool> {
        Ok(match self {
            ZFormula::True => true,
            ZFormula::False => false,
            ZFormula::Eq(a, b) => a.eval(env)? == b.eval(env)?,
            ZFormula::Lt(a, b) => a.eval(env)? < b.eval(env)?,
            ZFormula::Le(a, b) => a.eval(env)? <= b.eval(env)?,
            ZFormula::Not(g) => !g.eval(bound, env)?,
            ZFormula::And(gs) => {
                for g in gs {
                    if !g.eval(bound, env)? {
                        return Ok(false);
                    }
                }
                true
            }
            ZFormula::Or(gs) => {
                for g in gs {
                    if g.eval(bound, env)? {
                        return Ok(true);
                    }
                }
                false
            }
            ZFormula::Implies(a, b) => !a.eval(bound, env)? || b.eval(bound, env)?,
            ZFormula::Iff(a, b) => a.eval(bound, env)? == b.eval(bound, env)?,
            ZFormula::Exists(x, g) | ZFormula::Forall(x, g) => {
                let universal = matches!(self, ZFormula::Forall(..));
                let saved = env.get(x).copied();
                let mut result = universal;
                for w in -bound..=bound {
                    env.insert(x.clone(), w as i128);
                    if g.eval(bound, env)? != universal {
                        result = !universal;
                        break;
                    }
                }
                match saved {
                    Some(v) => env.insert(x.clone(), v),
                    None => env.remove(x),
                };
                result
            }
        })
    }
}

/// Truth of `f` when every quantifier ranges over `[-bound, bound]`.
pub fn eval_bounded_z(f: &ZFormula, bound: i64, env: &BTreeMap<String, i64>) -> Result<bool> {
    let mut env = env.iter().map(|(k, v)| (k.clone(), *v as i128)).collect();
    f.eval(bound, &mut env)
}

/// `∀w [u < w ↔ v ≤ w]`, the order definition of `v = S(u)`.
pub fn successor_by_order(u: &str, v: &str, w: &str) -> ZFormula {
    ZFormula::forall(
        w,
        ZFormula::iff(
            ZFormula::Lt(ZTerm::var(u), ZTerm::var(w)),
            ZFormula::Le(ZTerm::var(v), ZTerm::var(w)),
        ),
    )
}

/// The addition-defining formula as a tree, for cross-checking
/// [`tarski_sum_holds`] through the generic evaluator.
pub fn tarski_sum_formula(x: &str, y: &str, z: &str) -> ZFormula {
    let (vx, vy, vz) = (ZTerm::var(x), ZTerm::var(y), ZTerm::var(z));
    let s = ZTerm::succ;
    let m = ZTerm::mul;
    let zero = ZFormula::Eq(vz.clone(), ZTerm::Lit(0));
    ZFormula::Or(vec![
        ZFormula::And(vec![
            zero.clone(),
            ZFormula::Eq(
                m(s(vx.clone()), s(vy.clone())),
                s(m(vx.clone(), vy.clone())),
            ),
        ]),
        ZFormula::And(vec![
            ZFormula::Not(Box::new(zero)),
            ZFormula::Eq(
                m(s(m(vz.clone(), vx.clone())), s(m(vz.clone(), vy.clone()))),
                s(m(m(vz.clone(), vz), s(m(vx, vy)))),
            ),
        ]),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_in, Domain};

    #[test]
    fn sum_examples() {
        assert!(tarski_sum_holds(2, 3, 5));
        assert!(!tarski_sum_holds(2, 3, 6));
        assert!(tarski_sum_holds(0, 0, 0));
        assert!(tarski_sum_holds(-7, 7, 0));
    }

    #[test]
    fn negation_examples() {
        assert!(negation_def_holds(3, -3));
        assert!(!negation_def_holds(2, 2));
        assert!(negation_def_holds(0, 0));
    }

    #[test]
    fn small_definability_runs() {
        let r = check_addition_definability(1).unwrap();
        assert_eq!((r.checked, r.mismatches.len()), (27, 0));
        let r = check_addition_definability(5).unwrap();
        assert_eq!((r.checked, r.mismatches.len()), (1331, 0));
        assert_eq!(r.to_string(), "checked=1331 mismatches=0");
        assert!(check_addition_definability(0).is_err());
    }

    #[test]
    fn report_lists_mismatches() {
        let r = DefinabilityReport { checked: 3, mismatches: vec![(1, 2, 4), (2, 2, 5)] };
        assert_eq!(r.to_string(), "checked=3 mismatches=2\nx=1 y=2 z=4\nx=2 y=2 z=5");
    }

    #[test]
    fn formula_tree_matches_direct_evaluation() {
        let f = tarski_sum_formula("x", "y", "z");
        for x in -6..=6 {
            for y in -6..=6 {
                for z in -6..=6 {
                    let env = [("x", x), ("y", y), ("z", z)].map(|(k, v)| (k.to_string(), v)).into();
                    assert_eq!(eval_bounded_z(&f, 6, &env).unwrap(), tarski_sum_holds(x, y, z));
                }
            }
        }
    }

    #[test]
    fn bounded_examples() {
        let empty = BTreeMap::new();
        let f = ZFormula::from_formula(&parse_in("exists w. w*w = 4 & w <= 0", Domain::Q).unwrap()).unwrap();
        assert!(eval_bounded_z(&f, 10, &empty).unwrap());
        let f = ZFormula::from_formula(&parse_in("forall w. w <= w", Domain::Q).unwrap()).unwrap();
        assert!(eval_bounded_z(&f, 10, &empty).unwrap());
        let f = ZFormula::from_formula(&parse_in("exists w. w*w = 2", Domain::Q).unwrap()).unwrap();
        assert!(!eval_bounded_z(&f, 10, &empty).unwrap());
        assert!(ZFormula::from_formula(&parse_in("x < 1/2", Domain::Q).unwrap()).is_err());
    }

    #[test]
    fn successor_on_a_small_window() {
        let f = successor_by_order("u", "v", "w");
        for u in -9..=9 {
            for v in -9..=9 {
                let env = [("u".to_string(), u), ("v".to_string(), v)].into();
                assert_eq!(eval_bounded_z(&f, 10, &env).unwrap(), v == u + 1, "u={u} v={v}");
            }
        }
    }
}
