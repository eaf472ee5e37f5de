//! Exact integer and rational kernels: extended gcd, congruence systems,
//! unit combinations, prime valuations and n-th power tests.
//!
//! Everything here works over the positive rationals. Signs and zero are
//! handled by the callers in [`crate::semantics`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Exact arbitrary-precision fraction, always kept reduced with a positive
/// denominator.
pub type Rational = BigRational;

/// Convenience constructor for small fractions.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Convenience constructor for integers.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Prime factorization of a positive rational: prime to p-adic valuation.
/// Primes with valuation zero are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    entries: BTreeMap<BigInt, i64>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, prime: &BigInt) -> i64 {
        self.entries.get(prime).copied().unwrap_or(0)
    }

    /// Adds `exp` to the valuation at `prime`, dropping the entry if it
    /// cancels to zero.
    pub fn add(&mut self, prime: BigInt, exp: i64) {
        if exp == 0 {
            return;
        }
        let e = self.entries.entry(prime.clone()).or_insert(0);
        *e += exp;
        if *e == 0 {
            self.entries.remove(&prime);
        }
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.entries.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BigInt, i64)> {
        self.entries.iter().map(|(p, e)| (p, *e))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Rebuilds the rational `∏ p^e`.
    pub fn to_rational(&self) -> Rational {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (p, e) in self.iter() {
            let pow = num_traits::pow(p.clone(), e.unsigned_abs() as usize);
            if e > 0 {
                num *= pow;
            } else {
                den *= pow;
            }
        }
        Rational::new(num, den)
    }
}

impl FromIterator<(BigInt, i64)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (BigInt, i64)>>(iter: I) -> Self {
        let mut v = Valuation::new();
        for (p, e) in iter {
            v.add(p, e);
        }
        v
    }
}

/// A system `t_k + x ≡ 0 (mod n_k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceSystem {
    residues: Vec<BigInt>,
    moduli: Vec<BigInt>,
}

impl CongruenceSystem {
    pub fn new(residues: Vec<BigInt>, moduli: Vec<BigInt>) -> Result<Self, Error> {
        if residues.is_empty() || residues.len() != moduli.len() {
            return Err(Error::Domain(format!(
                "congruence system needs matching nonempty lists, got {} residues and {} moduli",
                residues.len(),
                moduli.len()
            )));
        }
        if let Some(bad) = moduli.iter().find(|m| !m.is_positive()) {
            return Err(Error::Domain(format!("modulus {bad} must be at least 1")));
        }
        Ok(Self { residues, moduli })
    }

    pub fn residues(&self) -> &[BigInt] {
        &self.residues
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }
}

/// Coefficients `c_k` with `Σ c_k·N/n_k = 1`, where `N = lcm(n_k)`, and the
/// derived exponents `ν_k = c_k·N/n_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitCombination {
    pub modulus_lcm: BigInt,
    pub coefficients: Vec<BigInt>,
    pub exponents: Vec<BigInt>,
}

/// Extended Euclid: returns `(g, u, v)` with `g = gcd(a, b) ≥ 0` and
/// `u·a + v·b = g`.
pub fn gcd_ext(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (BigInt::one(), BigInt::zero());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn lcm_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, n| acc.lcm(n))
}

/// Builds the unit combination for `moduli`; `None` only for an empty list.
pub fn unit_combination(moduli: &[BigInt]) -> Option<UnitCombination> {
    if moduli.is_empty() {
        return None;
    }
    let n = lcm_all(moduli);
    let cofactors: Vec<BigInt> = moduli.iter().map(|m| &n / m).collect();

    let mut g = cofactors[0].clone();
    let mut coefficients = vec![BigInt::one()];
    for a in &cofactors[1..] {
        let (g2, u, v) = gcd_ext(&g, a);
        for c in coefficients.iter_mut() {
            *c *= &u;
        }
        coefficients.push(v);
        g = g2;
    }
    assert!(g.is_one(), "cofactors of the lcm must be coprime");

    let exponents: Vec<BigInt> = coefficients
        .iter()
        .zip(&cofactors)
        .map(|(c, a)| c * a)
        .collect();
    let total: BigInt = exponents.iter().sum();
    assert!(total.is_one(), "unit combination must sum to 1, got {total}");

    Some(UnitCombination {
        modulus_lcm: n,
        coefficients,
        exponents,
    })
}

/// Solves `t_k + x ≡ 0 (mod n_k)` for all `k`. Returns the least
/// non-negative solution and the period `lcm(n_k)`, or `None` when two
/// congruences disagree modulo the gcd of their moduli.
pub fn solve_congruences(sys: &CongruenceSystem) -> Option<(BigInt, BigInt)> {
    let mut x = BigInt::zero();
    let mut period = BigInt::one();
    for (t, n) in sys.residues.iter().zip(&sys.moduli) {
        // merge x ≡ cur (mod period) with x ≡ -t (mod n)
        let target = (-t).mod_floor(n);
        let (g, u, _) = gcd_ext(&period, n);
        let diff = &target - &x;
        if !diff.is_multiple_of(&g) {
            return None;
        }
        let step = n / &g;
        let k = ((&diff / &g) * u).mod_floor(&step);
        x += &period * k;
        period = &period * &step;
        x = x.mod_floor(&period);
    }
    Some((x, period))
}

fn trial_divide(mut n: BigInt, sign: i64, out: &mut Valuation) {
    let mut strip = |n: &mut BigInt, p: &BigInt| {
        let mut e = 0i64;
        while n.is_multiple_of(p) {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.add(p.clone(), sign * e);
        }
    };
    for small in [2u32, 3, 5] {
        strip(&mut n, &BigInt::from(small));
    }
    // wheel mod 30 over candidates coprime to 2, 3, 5
    const GAPS: [u32; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut d = BigInt::from(7);
    let mut i = 0;
    while &d * &d <= n {
        strip(&mut n, &d);
        d += GAPS[i];
        i = (i + 1) % GAPS.len();
    }
    if n > BigInt::one() {
        out.add(n, sign);
    }
}

/// Prime valuation map of a positive rational. Trial division: fine for
/// the small numerators produced by formulas typed by hand or by the fuzzer.
pub fn factor_rational(r: &Rational) -> Result<Valuation, Error> {
    if !r.is_positive() {
        return Err(Error::Domain(format!("cannot factor non-positive {r}")));
    }
    let mut v = Valuation::new();
    trial_divide(r.numer().clone(), 1, &mut v);
    trial_divide(r.denom().clone(), -1, &mut v);
    Ok(v)
}

fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    let root = n.nth_root(k);
    (num_traits::pow(root.clone(), k as usize) == *n).then_some(root)
}

/// The positive rational `y` with `y^n = r`, if there is one.
pub fn nth_root_exact(r: &Rational, n: u64) -> Result<Option<Rational>, Error> {
    if n < 1 {
        return Err(Error::Domain("power index must be at least 1".into()));
    }
    if !r.is_positive() {
        return Err(Error::Domain(format!("n-th root of non-positive {r}")));
    }
    // a reduced p/q is an n-th power iff p and q are
    let Ok(k) = u32::try_from(n) else {
        // only 1 is a power of such a huge index among small rationals; roots
        // of anything else would need astronomically large inputs
        return Ok(r.is_one().then(Rational::one));
    };
    Ok(exact_root(r.numer(), k)
        .zip(exact_root(r.denom(), k))
        .map(|(p, q)| Rational::new(p, q)))
}

/// Whether `r > 0` is the n-th power of a positive rational.
pub fn is_nth_power(r: &Rational, n: u64) -> Result<bool, Error> {
    Ok(nth_root_exact(r, n)?.is_some())
}

pub fn is_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    let mut d = BigInt::from(2);
    while &d * &d <= *n {
        if n.is_multiple_of(&d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime that appears in none of the given valuations.
pub fn next_prime_avoiding(vals: &[Valuation]) -> BigInt {
    let mut p = BigInt::from(2);
    loop {
        if is_prime(&p) && vals.iter().all(|v| v.get(&p) == 0) {
            return p;
        }
        p += 1;
    }
}

/// Integer power of a rational, negative exponents allowed for nonzero bases.
pub fn pow_rational(base: &Rational, exp: i64) -> Rational {
    let magnitude = num_traits::pow(base.clone(), exp.unsigned_abs() as usize);
    if exp < 0 {
        magnitude.recip()
    } else {
        magnitude
    }
}

pub fn to_i64(n: &BigInt) -> i64 {
    n.to_i64()
        .unwrap_or_else(|| panic!("integer {n} does not fit an exponent"))
}
