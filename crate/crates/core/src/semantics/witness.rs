//! Constructive side of the elimination: given concrete parameter values,
//! build an actual `x` satisfying an existential's constraints, or show
//! that none exists.
//!
//! This path never looks at the formula emitted by [`crate::qe`]. It solves
//! the power constraints prime by prime with the Chinese remainder
//! theorem, then places the solution inside the order bounds by scaling
//! with `P^N · δ^(N·M)` for a prime `P` foreign to every parameter.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{eval_ground, eval_term, Assignment};
use crate::error::{Error, Result};
use crate::formula::{conjuncts_to_dnf, simplify, to_nnf, Domain, Formula};
use crate::numtheory::{
    factor_rational, is_nth_power, lcm_all, next_prime_avoiding, nth_root_exact, pow_rational,
    solve_congruences, to_i64, CongruenceSystem, Rational, Valuation,
};
use crate::qe::{classify, unify_powers, ClassifiedConstraints};

/// How a witness is assembled: `x = base · P^N · δ^(N·M)` with `δ` chosen
/// so that `x` lands strictly between `lower` and `upper`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessRecipe {
    /// lcm of the positive power indices (1 when there are none).
    pub n: BigInt,
    /// One solution of all positive power constraints.
    pub base: Rational,
    /// lcm of the negated power indices (1 when there are none).
    pub m: BigInt,
    /// Smallest prime dividing no parameter value and not the base.
    pub prime: BigInt,
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl WitnessRecipe {
    /// `δ^(N·M)` must fall strictly inside this interval; `None` ends are
    /// unbounded.
    pub fn power_interval(&self) -> (Option<Rational>, Option<Rational>) {
        let scale = &self.base * pow_rational(&Rational::from_integer(self.prime.clone()), to_i64(&self.n));
        (
            self.lower.as_ref().map(|a| a / &scale),
            self.upper.as_ref().map(|b| b / &scale),
        )
    }

    pub fn exponent(&self) -> u64 {
        u64::try_from(&self.n * &self.m).expect("witness exponent overflow")
    }

    pub fn build(&self) -> Rational {
        let k = self.exponent();
        let delta = match self.power_interval() {
            (None, None) => Rational::one(),
            (Some(a), None) => Rational::from_integer(root_above(&a, k)),
            (None, Some(b)) => Rational::from_integer(root_above(&b.recip(), k)).recip(),
            (Some(a), Some(b)) => rational_power_between(&a, &b, k),
        };
        let p = Rational::from_integer(self.prime.clone());
        &self.base * pow_rational(&p, to_i64(&self.n)) * pow_rational(&delta, k as i64)
    }
}

/// Smallest integer `d ≥ 1` with `d^k > ⌊c⌋`, so `d^k > c`.
fn root_above(c: &Rational, k: u64) -> BigInt {
    let k = u32::try_from(k).expect("witness exponent overflow");
    c.floor().to_integer().max(BigInt::zero()).nth_root(k) + 1
}

fn ratio_pow(r: &Rational, k: u64) -> Rational {
    num_traits::pow(r.clone(), k as usize)
}

// largest j ≥ 0 with pred(j) true, given pred(0) true and pred monotone
fn last_true(pred: impl Fn(&BigInt) -> bool) -> BigInt {
    let mut hi = BigInt::one();
    while pred(&hi) {
        hi <<= 1;
    }
    let mut lo = &hi >> 1;
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if pred(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// A positive rational `γ` with `a < γ^n < b`, found by descending the
/// Stern–Brocot tree with exact comparisons, so the answer is the simplest
/// such fraction.
pub fn rational_power_between(a: &Rational, b: &Rational, n: u64) -> Rational {
    assert!(!a.is_negative() && a < b, "need 0 <= a < b, got {a} and {b}");
    assert!(n >= 1, "power index must be at least 1");
    // left = p0/q0 (γ^n ≤ a), right = p1/q1 (γ^n ≥ b); 1/0 is +∞
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let frac = |p: &BigInt, q: &BigInt| Rational::new(p.clone(), q.clone());
    loop {
        let mid = frac(&(&p0 + &p1), &(&q0 + &q1));
        let v = ratio_pow(&mid, n);
        if a < &v && &v < b {
            return mid;
        }
        if &v <= a {
            // move left bound right by the longest run of steps staying ≤ a
            let k = last_true(|k| ratio_pow(&frac(&(&p0 + k * &p1 + &p1), &(&q0 + k * &q1 + &q1)), n) <= *a);
            let steps = k + 1;
            p0 = &p0 + &steps * &p1;
            q0 = &q0 + &steps * &q1;
        } else {
            let k = last_true(|k| ratio_pow(&frac(&(&p1 + k * &p0 + &p0), &(&q1 + k * &q0 + &q0)), n) >= *b);
            let steps = k + 1;
            p1 = &p1 + &steps * &p0;
            q1 = &q1 + &steps * &q0;
        }
    }
}

fn values(c: &ClassifiedConstraints, env: &Assignment) -> Result<Vec<(u64, Rational)>> {
    c.pos_pows
        .iter()
        .map(|p| Ok((p.index, eval_term(&p.coeff, Domain::QPos, env)?)))
        .collect()
}

/// Plans a witness for constraints unified to the first power and free of
/// equalities, or returns `None` when no witness exists under `env`.
pub fn plan_witness(c: &ClassifiedConstraints, env: &Assignment) -> Result<Option<WitnessRecipe>> {
    debug_assert!(c.equalities.is_empty());
    for r in &c.residue {
        if !eval_ground(r, Domain::QPos, env)? {
            return Ok(None);
        }
    }
    let pos = values(c, env)?;
    let neg: Vec<(u64, Rational)> = c
        .neg_pows
        .iter()
        .map(|p| Ok((p.index, eval_term(&p.coeff, Domain::QPos, env)?)))
        .collect::<Result<_>>()?;

    // power constraints, prime by prime: v_p(t_k) + v_p(x) ≡ 0 (mod n_k)
    let pos_vals: Vec<Valuation> = pos
        .iter()
        .map(|(_, t)| factor_rational(t))
        .collect::<Result<_>>()?;
    let moduli: Vec<BigInt> = pos.iter().map(|(n, _)| BigInt::from(*n)).collect();
    let primes: BTreeSet<&BigInt> = pos_vals.iter().flat_map(|v| v.primes()).collect();
    let mut base = Valuation::new();
    for p in primes {
        let residues = pos_vals.iter().map(|v| BigInt::from(v.get(p))).collect();
        let sys = CongruenceSystem::new(residues, moduli.clone())?;
        match solve_congruences(&sys) {
            Some((x0, _)) => base.add(p.clone(), to_i64(&x0)),
            None => return Ok(None),
        }
    }
    let n = lcm_all(&moduli);
    let base_value = base.to_rational();

    // every solution is base · γ^N, so m | N makes R_m(u·x) independent of γ
    for (m, u) in &neg {
        if n.is_multiple_of(&BigInt::from(*m)) && is_nth_power(&(u * &base_value), *m)? {
            return Ok(None);
        }
    }

    let eval_all = |bs: &[crate::qe::Bound]| -> Result<Vec<Rational>> {
        bs.iter().map(|b| eval_term(&b.term, Domain::QPos, env)).collect()
    };
    let lower = eval_all(&c.lowers)?.into_iter().max();
    let upper = eval_all(&c.uppers)?.into_iter().min();
    if let (Some(a), Some(b)) = (&lower, &upper) {
        if a >= b {
            return Ok(None);
        }
    }

    let mut avoid = pos_vals;
    for (_, u) in &neg {
        avoid.push(factor_rational(u)?);
    }
    avoid.push(base.clone());
    let m = lcm_all(&neg.iter().map(|(m, _)| BigInt::from(*m)).collect::<Vec<_>>());

    Ok(Some(WitnessRecipe {
        n,
        base: base_value,
        m,
        prime: next_prime_avoiding(&avoid),
        lower,
        upper,
    }))
}

/// A value for `c.var` satisfying every constraint under `env`, checked by
/// direct evaluation, or `None` when the constraints are unsatisfiable.
/// The constraints must be unified to the first power.
pub fn construct_witness(c: &ClassifiedConstraints, env: &Assignment) -> Result<Option<Rational>> {
    let candidate = match c.equalities.first() {
        Some(eq) => Some(eval_term(&eq.term, Domain::QPos, env)?),
        None => plan_witness(c, env)?.map(|recipe| recipe.build()),
    };
    let Some(x) = candidate else {
        return Ok(None);
    };
    let mut with_x = env.clone();
    with_x.insert(c.var.clone(), x.clone());
    if eval_ground(&c.matrix(), Domain::QPos, &with_x)? {
        Ok(Some(x))
    } else if c.equalities.is_empty() {
        Err(Error::Domain(format!(
            "constructed witness {x} violates {}",
            c.to_formula()
        )))
    } else {
        // the forced value fails, so nothing works
        Ok(None)
    }
}

/// Searches for `x` with `body(x)` true under `env`, where `body` is
/// quantifier-free. Returns a witness verified against `body` itself.
pub fn find_witness(x: &str, body: &Formula, env: &Assignment) -> Result<Option<Rational>> {
    let nnf = simplify(&to_nnf(body));
    for clause in conjuncts_to_dnf(&nnf) {
        let unified = unify_powers(&classify(&clause, x));
        let Some(y) = construct_witness(&unified, env)? else {
            continue;
        };
        let root = nth_root_exact(&y, unified.power)?.ok_or_else(|| {
            Error::Domain(format!("witness {y} is not a {}-th power", unified.power))
        })?;
        let mut with_x = env.clone();
        with_x.insert(x.to_string(), root.clone());
        if !eval_ground(body, Domain::QPos, &with_x)? {
            return Err(Error::Domain(format!("witness {x} = {root} fails {body}")));
        }
        return Ok(Some(root));
    }
    Ok(None)
}
