//! Seeded random formulas: differential checks of the eliminator against
//! the witness oracle, and printer/parser round trips.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::formula::{Atom, Domain, Formula, Monomial};
use crate::numtheory::{int, pow_rational, ratio, Rational};
use crate::qe::eliminate_all;
use crate::semantics::{eval_ground, find_witness, Assignment};

const COEFFS: [(i64, i64); 8] = [(1, 1), (1, 1), (2, 1), (3, 1), (1, 2), (4, 9), (9, 4), (5, 3)];

fn random_monomial(rng: &mut impl Rng, vars: &[&str], max_exp: i64) -> Monomial {
    let (p, q) = *COEFFS.choose(rng).unwrap();
    let mut powers = Vec::new();
    for v in vars {
        if rng.gen_bool(0.6) {
            powers.push((v.to_string(), rng.gen_range(-max_exp..=max_exp)));
        }
    }
    Monomial::new(ratio(p, q), powers)
}

fn random_atom(rng: &mut impl Rng, vars: &[&str]) -> Atom {
    match rng.gen_range(0..10) {
        0..=1 => Atom::Eq(random_monomial(rng, vars, 3), random_monomial(rng, vars, 3)),
        2..=5 => Atom::Lt(random_monomial(rng, vars, 3), random_monomial(rng, vars, 3)),
        _ => Atom::Pow(rng.gen_range(2..=6), random_monomial(rng, vars, 3)),
    }
}

fn random_body(rng: &mut impl Rng, vars: &[&str], depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        let a = Formula::Atom(random_atom(rng, vars));
        return if rng.gen_bool(0.25) { Formula::not(a) } else { a };
    }
    let width = rng.gen_range(2..=3);
    let parts: Vec<Formula> = (0..width).map(|_| random_body(rng, vars, depth - 1)).collect();
    match rng.gen_range(0..10) {
        0..=5 => Formula::And(parts),
        6..=7 => Formula::Or(parts),
        8 => Formula::not(Formula::And(parts)),
        _ => {
            let mut it = parts.into_iter();
            Formula::implies(it.next().unwrap(), it.next().unwrap())
        }
    }
}

/// A positive rational whose factorization only uses 2, 3 and 5.
fn random_parameter(rng: &mut impl Rng) -> Rational {
    [2, 3, 5].iter().fold(int(1), |acc, p| {
        acc * pow_rational(&int(*p), rng.gen_range(-2..=2))
    })
}

/// One quantifier over `x` with up to two parameters, plus parameter values.
#[derive(Clone, Debug)]
pub struct FuzzCase {
    pub formula: Formula,
    pub env: Assignment,
}

impl fmt::Display for FuzzCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.formula)?;
        for (k, v) in &self.env {
            write!(f, " ; {k}={v}")?;
        }
        Ok(())
    }
}

pub fn random_case(rng: &mut impl Rng) -> FuzzCase {
    let params: &[&str] = match rng.gen_range(0..4) {
        0 => &[],
        1 => &["a"],
        _ => &["a", "b"],
    };
    let mut vars = vec!["x"];
    vars.extend(params);
    let body = random_body(rng, &vars, 2);
    let formula = if rng.gen_bool(0.75) {
        Formula::exists("x", body)
    } else {
        Formula::forall("x", body)
    };
    let mut env = Assignment::new();
    for p in params {
        env.insert(p.to_string(), random_parameter(rng));
    }
    if params.len() == 2 && rng.gen_bool(0.2) {
        // related parameters exercise the power conditions more often
        let a = env["a"].clone();
        env.insert("b".into(), pow_rational(&a, rng.gen_range(-3..=3)));
    }
    FuzzCase { formula, env }
}

/// Verdicts of both routes on one case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub eliminated: Formula,
    pub by_elimination: bool,
    pub by_witness: bool,
    /// For an existential, the verified witness; for a universal, the
    /// verified counterexample.
    pub witness: Option<Rational>,
}

impl Verdict {
    pub fn agrees(&self) -> bool {
        self.by_elimination == self.by_witness
    }
}

pub fn check_case(case: &FuzzCase) -> Result<Verdict> {
    let (eliminated, _) = eliminate_all(&case.formula);
    let by_elimination = eval_ground(&eliminated, Domain::QPos, &case.env)?;
    let (by_witness, witness) = match &case.formula {
        Formula::Exists(x, body) => {
            let w = find_witness(x, body, &case.env)?;
            (w.is_some(), w)
        }
        Formula::Forall(x, body) => {
            let w = find_witness(x, &Formula::not(body.as_ref().clone()), &case.env)?;
            (w.is_none(), w)
        }
        other => panic!("fuzz case must be a single quantifier: {other}"),
    };
    Ok(Verdict {
        eliminated,
        by_elimination,
        by_witness,
        witness,
    })
}

#[derive(Clone, Debug, Default)]
pub struct FuzzReport {
    pub passed: usize,
    pub failed: usize,
    /// Existential cases found true, each with a verified witness.
    pub witnessed: usize,
    /// Index, case and reason of the first failure.
    pub first_failure: Option<(usize, FuzzCase, String)>,
}

/// Runs `iters` differential cases from `seed`.
pub fn run_fuzz(seed: u64, iters: usize) -> FuzzReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = FuzzReport::default();
    for i in 0..iters {
        let case = random_case(&mut rng);
        let problem = match check_case(&case) {
            Ok(v) if v.agrees() => {
                if v.by_witness && matches!(case.formula, Formula::Exists(..)) {
                    report.witnessed += 1;
                }
                None
            }
            Ok(v) => Some(format!(
                "elimination says {} via `{}`, witness oracle says {}",
                v.by_elimination, v.eliminated, v.by_witness
            )),
            Err(e) => Some(format!("error: {e}")),
        };
        match problem {
            None => report.passed += 1,
            Some(reason) => {
                report.failed += 1;
                if report.first_failure.is_none() {
                    report.first_failure = Some((i, case, reason));
                }
            }
        }
    }
    report
}

const FREE: [&str; 3] = ["a", "b", "c"];
const BOUND: [&str; 4] = ["x", "y", "z", "w"];

fn round_trip_formula(
    rng: &mut impl Rng,
    scope: &[&'static str],
    used: &mut Vec<&'static str>,
    depth: u32,
) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..12) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            _ => Formula::Atom(random_atom(rng, scope)),
        };
    }
    let sub = |rng: &mut _, used: &mut Vec<_>| round_trip_formula(rng, scope, used, depth - 1);
    match rng.gen_range(0..7) {
        0 => Formula::not(sub(rng, used)),
        1 | 2 => Formula::And((0..rng.gen_range(2..=3)).map(|_| sub(rng, used)).collect()),
        3 => Formula::Or((0..rng.gen_range(2..=3)).map(|_| sub(rng, used)).collect()),
        4 => {
            let a = sub(rng, used);
            Formula::implies(a, sub(rng, used))
        }
        _ => {
            let unused: Vec<&'static str> = BOUND.iter().copied().filter(|v| !used.contains(v)).collect();
            let Some(&x) = unused.choose(rng) else {
                return Formula::Atom(random_atom(rng, scope));
            };
            used.push(x);
            let mut inner = scope.to_vec();
            inner.push(x);
            let body = round_trip_formula(rng, &inner, used, depth - 1);
            if rng.gen_bool(0.5) {
                Formula::exists(x, body)
            } else {
                Formula::forall(x, body)
            }
        }
    }
}

/// Random formula for printer/parser round trips. Each bound name is used
/// by one binder only and differs from every free name.
pub fn random_formula(rng: &mut impl Rng) -> Formula {
    round_trip_formula(rng, &FREE, &mut Vec::new(), 4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_from_seed() {
        let a = run_fuzz(7, 20);
        let b = run_fuzz(7, 20);
        assert_eq!((a.passed, a.failed, a.witnessed), (b.passed, b.failed, b.witnessed));
        let mut r1 = ChaCha8Rng::seed_from_u64(3);
        let mut r2 = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(random_formula(&mut r1), random_formula(&mut r2));
    }

    #[test]
    fn small_run_agrees() {
        let r = run_fuzz(1, 60);
        assert_eq!(r.failed, 0, "{:?}", r.first_failure.map(|(i, c, why)| format!("#{i} {c}: {why}")));
    }
}
