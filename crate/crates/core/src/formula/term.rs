use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Mul;

use num_traits::{One, Signed, Zero};

use crate::numtheory::{pow_rational, Rational};

/// A term in normal form: a rational coefficient times a product of
/// variables raised to integer exponents.
///
/// Every term of the language built from constants, `*` and `inv` folds to
/// exactly one monomial, so normalization happens at construction and two
/// terms are equal iff their monomials are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    coeff: Rational,
    powers: BTreeMap<String, i64>,
}

impl Monomial {
    pub fn new(coeff: Rational, powers: impl IntoIterator<Item = (String, i64)>) -> Self {
        let mut m = Monomial {
            coeff,
            powers: BTreeMap::new(),
        };
        for (v, e) in powers {
            m.add_power(v, e);
        }
        m.normalize_zero();
        m
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(coeff: Rational) -> Self {
        Monomial {
            coeff,
            powers: BTreeMap::new(),
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        Self::new(Rational::one(), [(name.into(), 1)])
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn powers(&self) -> &BTreeMap<String, i64> {
        &self.powers
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.powers.keys().map(String::as_str)
    }

    pub fn is_constant(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.powers.is_empty() && self.coeff.is_one()
    }

    pub fn exponent_of(&self, x: &str) -> i64 {
        self.powers.get(x).copied().unwrap_or(0)
    }

    pub fn mentions(&self, x: &str) -> bool {
        self.powers.contains_key(x)
    }

    /// The monomial with the `x` factor removed.
    pub fn without(&self, x: &str) -> Monomial {
        let mut m = self.clone();
        m.powers.remove(x);
        m
    }

    /// Multiplies in `var^exp`.
    pub fn times_var(&self, var: &str, exp: i64) -> Monomial {
        let mut m = self.clone();
        m.add_power(var.to_string(), exp);
        m.normalize_zero();
        m
    }

    /// Multiplicative inverse. Only defined for nonzero coefficients.
    pub fn inv(&self) -> Monomial {
        assert!(!self.coeff.is_zero(), "inverse of the zero monomial");
        Monomial {
            coeff: self.coeff.recip(),
            powers: self.powers.iter().map(|(v, e)| (v.clone(), -e)).collect(),
        }
    }

    pub fn pow(&self, exp: i64) -> Monomial {
        if exp == 0 {
            return Monomial::one();
        }
        assert!(
            exp > 0 || !self.coeff.is_zero(),
            "negative power of the zero monomial"
        );
        Monomial {
            coeff: pow_rational(&self.coeff, exp),
            powers: self
                .powers
                .iter()
                .map(|(v, e)| (v.clone(), e.checked_mul(exp).expect("exponent overflow")))
                .collect(),
        }
    }

    /// Replaces `x` by `t`, renormalizing.
    pub fn substitute(&self, x: &str, t: &Monomial) -> Monomial {
        match self.powers.get(x) {
            None => self.clone(),
            Some(&e) => &self.without(x) * &t.pow(e),
        }
    }

    /// Whether some exponent is negative (an inverse survived normalization).
    pub fn has_negative_exponent(&self) -> bool {
        self.powers.values().any(|e| *e < 0)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        out.extend(self.powers.keys().cloned());
    }

    fn add_power(&mut self, v: String, e: i64) {
        if e == 0 {
            return;
        }
        let slot = self.powers.entry(v.clone()).or_insert(0);
        *slot = slot.checked_add(e).expect("exponent overflow");
        if *slot == 0 {
            self.powers.remove(&v);
        }
    }

    // 0 times anything is 0; only reachable in the signed front end
    fn normalize_zero(&mut self) {
        if self.coeff.is_zero() {
            self.powers.clear();
        }
    }
}

impl Mul for &Monomial {
    type Output = Monomial;

    fn mul(self, rhs: &Monomial) -> Monomial {
        let mut m = Monomial {
            coeff: &self.coeff * &rhs.coeff,
            powers: self.powers.clone(),
        };
        for (v, e) in &rhs.powers {
            m.add_power(v.clone(), *e);
        }
        m.normalize_zero();
        m
    }
}

impl Mul for Monomial {
    type Output = Monomial;

    fn mul(self, rhs: Monomial) -> Monomial {
        &self * &rhs
    }
}

impl From<Rational> for Monomial {
    fn from(c: Rational) -> Self {
        Monomial::constant(c)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.coeff.is_one() || self.powers.is_empty() {
            parts.push(self.coeff.to_string());
        }
        for (v, e) in &self.powers {
            if *e == 1 {
                parts.push(v.clone());
            } else {
                parts.push(format!("{v}^{e}"));
            }
        }
        write!(f, "{}", parts.join(" * "))
    }
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign_of(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{int, ratio};
    use proptest::prelude::*;

    fn mono(c: Rational, ps: &[(&str, i64)]) -> Monomial {
        Monomial::new(c, ps.iter().map(|(v, e)| (v.to_string(), *e)))
    }

    #[test]
    fn exponents_cancel() {
        let m = &(&Monomial::var("x").pow(2) * &Monomial::var("y")) * &Monomial::var("x").pow(-2);
        assert_eq!(m, Monomial::var("y"));
        assert_eq!(mono(int(3), &[("x", 0)]), Monomial::constant(int(3)));
    }

    #[test]
    fn zero_absorbs_variables() {
        let m = mono(int(0), &[("x", 3)]);
        assert!(m.is_constant());
        assert_eq!(m.to_string(), "0");
    }

    #[test]
    fn substitution_renormalizes() {
        let m = mono(int(1), &[("x", 1), ("a", 1)]);
        let r = m.substitute("x", &Monomial::var("a"));
        assert_eq!(r, mono(int(1), &[("a", 2)]));
        let m = mono(int(2), &[("x", -2)]);
        assert_eq!(m.substitute("x", &Monomial::constant(int(3))), Monomial::constant(ratio(2, 9)));
    }

    #[test]
    fn display() {
        assert_eq!(Monomial::one().to_string(), "1");
        assert_eq!(mono(ratio(4, 9), &[("x", 1)]).to_string(), "4/9 * x");
        assert_eq!(mono(int(1), &[("a", -1), ("x", 2)]).to_string(), "a^-1 * x^2");
        assert_eq!(mono(int(-2), &[]).to_string(), "-2");
    }

    fn arb_monomial() -> impl Strategy<Value = Monomial> {
        (
            1i64..=12,
            1i64..=12,
            proptest::collection::vec((0usize..3, -4i64..=4), 0..4),
        )
            .prop_map(|(p, q, ps)| {
                let names = ["a", "b", "x"];
                Monomial::new(ratio(p, q), ps.into_iter().map(|(i, e)| (names[i].to_string(), e)))
            })
    }

    proptest! {
        #[test]
        fn product_is_commutative_and_associative(a in arb_monomial(), b in arb_monomial(), c in arb_monomial()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn inverse_is_an_involution(a in arb_monomial()) {
            prop_assert_eq!(a.inv().inv(), a.clone());
            prop_assert!((&a * &a.inv()).is_one());
        }
    }
}
