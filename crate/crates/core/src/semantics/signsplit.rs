use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::Sign;
use crate::error::{Error, Result};
use crate::formula::{Atom, Formula, Monomial};

type Signs = BTreeMap<String, Sign>;

// sign and magnitude of a term once every variable has a fixed sign; the
// magnitude is a positive monomial over the same variable names
fn split_term(t: &Monomial, signs: &Signs) -> (Sign, Monomial) {
    if t.coeff().is_zero() {
        return (Sign::Zero, Monomial::one());
    }
    let mut negative = t.coeff().is_negative();
    for (v, e) in t.powers() {
        match signs[v] {
            Sign::Zero => return (Sign::Zero, Monomial::one()),
            Sign::Neg if e % 2 != 0 => negative = !negative,
            _ => {}
        }
    }
    let magnitude = Monomial::new(t.coeff().abs(), t.powers().iter().map(|(v, e)| (v.clone(), *e)));
    (if negative { Sign::Neg } else { Sign::Pos }, magnitude)
}

fn split_atom(a: &Atom, signs: &Signs) -> Formula {
    let truth = |b: bool| if b { Formula::Top } else { Formula::Bottom };
    match a {
        Atom::Eq(l, r) => {
            let ((sl, ml), (sr, mr)) = (split_term(l, signs), split_term(r, signs));
            match (sl, sr) {
                _ if sl != sr => Formula::Bottom,
                (Sign::Zero, _) => Formula::Top,
                _ => Formula::eq(ml, mr),
            }
        }
        Atom::Lt(l, r) => {
            let ((sl, ml), (sr, mr)) = (split_term(l, signs), split_term(r, signs));
            match (sl, sr) {
                _ if sl != sr => truth(sl < sr),
                (Sign::Zero, _) => Formula::Bottom,
                (Sign::Pos, _) => Formula::lt(ml, mr),
                // both negative: -|l| < -|r| iff |r| < |l|
                (Sign::Neg, _) => Formula::lt(mr, ml),
            }
        }
        Atom::Pow(..) => unreachable!("rejected before splitting"),
    }
}

fn split(f: &Formula, signs: &mut Signs) -> Formula {
    match f {
        Formula::Top | Formula::Bottom => f.clone(),
        Formula::Atom(a) => split_atom(a, signs),
        Formula::Not(g) => Formula::not(split(g, signs)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| split(g, signs)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| split(g, signs)).collect()),
        Formula::Implies(a, b) => Formula::implies(split(a, signs), split(b, signs)),
        Formula::Exists(x, g) | Formula::Forall(x, g) => {
            let universal = matches!(f, Formula::Forall(..));
            let mut case = |sign: Sign| {
                let shadowed = signs.insert(x.clone(), sign);
                let body = split(g, signs);
                match shadowed {
                    Some(s) => signs.insert(x.clone(), s),
                    None => signs.remove(x),
                };
                match (sign, universal) {
                    (Sign::Zero, _) => body,
                    (_, true) => Formula::forall(x.clone(), body),
                    (_, false) => Formula::exists(x.clone(), body),
                }
            };
            let cases = vec![case(Sign::Neg), case(Sign::Zero), case(Sign::Pos)];
            if universal {
                Formula::And(cases)
            } else {
                Formula::Or(cases)
            }
        }
    }
}

/// Rewrites a sentence over all rationals (multiplication, order and
/// rational literals only) into an equivalent sentence over the positive
/// rationals. Every quantifier becomes three cases by the sign of its
/// variable; in the negative case the variable stands for its magnitude.
pub fn signsplit(f: &Formula) -> Result<Formula> {
    let mut problem = None;
    f.visit_atoms(&mut |a| {
        if problem.is_some() {
            return;
        }
        if matches!(a, Atom::Pow(..)) {
            problem = Some("power predicate R[n]");
        } else if a.terms().iter().any(|t| t.has_negative_exponent()) {
            problem = Some("inverse");
        }
    });
    if let Some(p) = problem {
        return Err(Error::Unsupported(format!("{p} over all rationals")));
    }
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(Error::Unsupported(format!(
            "free variable `{v}`: sign splitting needs a sentence"
        )));
    }
    Ok(split(f, &mut Signs::new()))
}
