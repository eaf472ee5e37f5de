//! Ground truth: evaluation of quantifier-free formulas, the reduction from
//! all rationals to the positive ones, the constructive witness oracle, and
//! the bounded integer checks in [`zarith`].

mod signsplit;
mod witness;
pub mod zarith;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

pub use crate::formula::Domain;
use crate::error::{Error, Result};
use crate::formula::{Atom, Formula, Monomial};
use crate::numtheory::{is_nth_power, pow_rational, Rational};
use crate::qe::eliminate_all;
pub use signsplit::signsplit;
pub use witness::{construct_witness, find_witness, plan_witness, rational_power_between, WitnessRecipe};

/// Values of the free variables.
pub type Assignment = BTreeMap<String, Rational>;

/// A rational split into sign and magnitude.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignedValue {
    Neg(Rational),
    Zero,
    Pos(Rational),
}

impl SignedValue {
    pub fn sign(&self) -> Sign {
        match self {
            SignedValue::Neg(_) => Sign::Neg,
            SignedValue::Zero => Sign::Zero,
            SignedValue::Pos(_) => Sign::Pos,
        }
    }

    pub fn magnitude(&self) -> Option<&Rational> {
        match self {
            SignedValue::Neg(m) | SignedValue::Pos(m) => Some(m),
            SignedValue::Zero => None,
        }
    }

    pub fn to_rational(&self) -> Rational {
        match self {
            SignedValue::Neg(m) => -m.clone(),
            SignedValue::Zero => Rational::zero(),
            SignedValue::Pos(m) => m.clone(),
        }
    }
}

impl From<&Rational> for SignedValue {
    fn from(r: &Rational) -> Self {
        if r.is_positive() {
            SignedValue::Pos(r.clone())
        } else if r.is_negative() {
            SignedValue::Neg(-r.clone())
        } else {
            SignedValue::Zero
        }
    }
}

/// Ordered as on the number line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

pub fn eval_term(t: &Monomial, domain: Domain, env: &Assignment) -> Result<Rational> {
    let mut value = t.coeff().clone();
    for (v, e) in t.powers() {
        let x = env.get(v).ok_or_else(|| Error::Unassigned(v.clone()))?;
        if domain == Domain::QPos && !x.is_positive() {
            return Err(Error::Domain(format!("`{v}` = {x} is not a positive rational")));
        }
        if x.is_zero() && *e < 0 {
            return Err(Error::Domain(format!("`{v}` = 0 raised to a negative power")));
        }
        value *= pow_rational(x, *e);
    }
    Ok(value)
}

/// `R[n](v)` over the whole carrier: zero is every power, negatives are
/// odd powers of negatives only.
pub fn holds_power(v: &Rational, n: u64) -> Result<bool> {
    if v.is_zero() {
        return Ok(true);
    }
    if v.is_negative() {
        return Ok(n % 2 == 1 && is_nth_power(&-v.clone(), n)?);
    }
    is_nth_power(v, n)
}

/// Tarskian truth of a quantifier-free formula under `env`.
pub fn eval_ground(f: &Formula, domain: Domain, env: &Assignment) -> Result<bool> {
    Ok(match f {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Atom(Atom::Eq(l, r)) => eval_term(l, domain, env)? == eval_term(r, domain, env)?,
        Formula::Atom(Atom::Lt(l, r)) => eval_term(l, domain, env)? < eval_term(r, domain, env)?,
        Formula::Atom(Atom::Pow(n, t)) => holds_power(&eval_term(t, domain, env)?, *n)?,
        Formula::Not(g) => !eval_ground(g, domain, env)?,
        Formula::And(gs) => {
            for g in gs {
                if !eval_ground(g, domain, env)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(gs) => {
            for g in gs {
                if eval_ground(g, domain, env)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Implies(a, b) => !eval_ground(a, domain, env)? || eval_ground(b, domain, env)?,
        Formula::Exists(..) | Formula::Forall(..) => {
            return Err(Error::Unsupported(
                "ground evaluation of a quantified formula".into(),
            ))
        }
    })
}

/// Decides a sentence. Over all rationals the sentence is first split by
/// the signs of its quantified variables.
pub fn decide(sentence: &Formula, domain: Domain) -> Result<bool> {
    if let Some(v) = sentence.free_vars().into_iter().next() {
        return Err(Error::Unsupported(format!("free variable `{v}` in a sentence")));
    }
    let positive = match domain {
        Domain::QPos => sentence.clone(),
        Domain::Q => signsplit(sentence)?,
    };
    let (qf, _) = eliminate_all(&positive);
    eval_ground(&qf, Domain::QPos, &Assignment::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, parse_in};
    use crate::numtheory::{int, ratio};

    fn env(pairs: &[(&str, Rational)]) -> Assignment {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn ground_examples() {
        let none = Assignment::new();
        assert!(eval_ground(&parse("R[2](4/9)").unwrap(), Domain::QPos, &none).unwrap());
        assert!(eval_ground(&Formula::And(vec![]), Domain::QPos, &none).unwrap());
        let v = Formula::pow(2, Monomial::var("v"));
        assert!(!eval_ground(&v, Domain::Q, &env(&[("v", int(-4))])).unwrap());
        let v3 = Formula::pow(3, Monomial::var("v"));
        assert!(eval_ground(&v3, Domain::Q, &env(&[("v", int(-8))])).unwrap());
        assert!(eval_ground(&v, Domain::Q, &env(&[("v", int(0))])).unwrap());
    }

    #[test]
    fn ground_errors() {
        let f = parse("a < b").unwrap();
        assert_eq!(
            eval_ground(&f, Domain::QPos, &env(&[("a", int(1))])),
            Err(Error::Unassigned("b".into()))
        );
        assert!(matches!(
            eval_ground(&f, Domain::QPos, &env(&[("a", int(0)), ("b", int(1))])),
            Err(Error::Domain(_))
        ));
        assert!(eval_ground(&f, Domain::Q, &env(&[("a", int(-1)), ("b", int(0))])).unwrap());
        let q = parse("exists x. x < a").unwrap();
        assert!(matches!(eval_ground(&q, Domain::QPos, &Assignment::new()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn decide_examples() {
        let d = |s: &str| decide(&parse(s).unwrap(), Domain::QPos).unwrap();
        assert!(!d("exists x. R[2](x) & R[3](x) & !R[6](x)"));
        assert!(d("exists x. R[2](2*x) & R[3](4*x)"));
        let q = |s: &str| decide(&parse_in(s, Domain::Q).unwrap(), Domain::Q).unwrap();
        assert!(!q("forall x. exists y. y*y*y = x"));
        assert!(matches!(
            decide(&parse("a < 2").unwrap(), Domain::QPos),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn odd_powers_pass_signs_through() {
        for (p, q) in [(1, 1), (8, 27), (2, 3), (-32, 243), (5, 7)] {
            let v = ratio(p, q);
            for n in [1, 3, 5] {
                assert_eq!(holds_power(&v, n).unwrap(), holds_power(&-v.clone(), n).unwrap());
            }
            for n in [2, 4, 6] {
                if holds_power(&v, n).unwrap() {
                    assert!(!v.is_negative());
                }
            }
        }
    }

    #[test]
    fn signed_value_round_trip() {
        for r in [ratio(-3, 4), int(0), ratio(7, 2)] {
            let s = SignedValue::from(&r);
            assert_eq!(s.magnitude().is_some(), s.sign() != Sign::Zero);
            assert_eq!(s.to_rational(), r);
        }
    }
}
