//! Semantic properties of the rewrites, judged by direct evaluation and by
//! the witness oracle rather than by the formulas the eliminator emits.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mulord::formula::{
    distribute_exists, isolate_literal, simplify, to_nnf, Atom, Domain, Formula, Literal, Monomial,
};
use mulord::fuzz::{random_case, FuzzCase};
use mulord::numtheory::{pow_rational, ratio, Rational};
use mulord::qe::eliminate_all;
use mulord::semantics::{eval_ground, find_witness, Assignment};

/// Truth with one level of quantifiers decided by the witness oracle;
/// `None` for deeper nesting.
fn oracle_eval(f: &Formula, env: &Assignment) -> Option<bool> {
    if f.is_quantifier_free() {
        return Some(eval_ground(f, Domain::QPos, env).unwrap());
    }
    match f {
        Formula::Exists(x, body) if body.is_quantifier_free() => {
            Some(find_witness(x, body, env).unwrap().is_some())
        }
        Formula::Forall(x, body) if body.is_quantifier_free() => {
            Some(find_witness(x, &Formula::not(body.as_ref().clone()), env).unwrap().is_none())
        }
        Formula::Not(g) => oracle_eval(g, env).map(|b| !b),
        Formula::And(gs) => gs.iter().try_fold(true, |acc, g| Some(acc & oracle_eval(g, env)?)),
        Formula::Or(gs) => gs.iter().try_fold(false, |acc, g| Some(acc | oracle_eval(g, env)?)),
        Formula::Implies(a, b) => Some(!oracle_eval(a, env)? | oracle_eval(b, env)?),
        _ => None,
    }
}

const HEIGHT: i64 = 30;

/// Every positive rational of height at most 30, rationals built from 2, 3
/// and 5 with exponents in [-3, 3], and a few values near 1.
fn sample_points() -> Vec<Rational> {
    let mut out = Vec::new();
    for p in 1..=HEIGHT {
        for q in 1..=HEIGHT {
            if num_integer::gcd(p, q) == 1 {
                out.push(ratio(p, q));
            }
        }
    }
    for i in -3..=3 {
        for j in -3..=3 {
            for k in -2..=2 {
                out.push(pow_rational(&ratio(2, 1), i) * pow_rational(&ratio(3, 1), j) * pow_rational(&ratio(5, 1), k));
            }
        }
    }
    out.extend([ratio(17, 16), ratio(1025, 1024), ratio(7, 11), ratio(49, 4)]);
    out
}

fn cases(seed: u64, n: usize) -> Vec<FuzzCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_case(&mut rng)).collect()
}

#[test]
fn eliminated_verdicts_survive_sampling() {
    let points = sample_points();
    for case in cases(2024, 150) {
        let (qf, _) = eliminate_all(&case.formula);
        let verdict = eval_ground(&qf, Domain::QPos, &case.env).unwrap();
        let (x, body, existential) = match &case.formula {
            Formula::Exists(x, b) => (x, b, true),
            Formula::Forall(x, b) => (x, b, false),
            _ => unreachable!(),
        };
        // a false existential has no instance, a true universal no counterexample
        if verdict != existential {
            for p in &points {
                let mut env = case.env.clone();
                env.insert(x.clone(), p.clone());
                let holds = eval_ground(body, Domain::QPos, &env).unwrap();
                assert_eq!(holds, !existential, "{case} at {x} = {p}");
            }
        }
    }
}

#[test]
fn trace_steps_preserve_truth() {
    let points = sample_points();
    let mut compared = 0;
    for case in cases(77, 120) {
        let (_, trace) = eliminate_all(&case.formula);
        for step in &trace {
            let mut free = step.before.free_vars();
            free.extend(step.after.free_vars());
            free.retain(|v| !case.env.contains_key(v));
            // local rewrites keep the bound variable free; they hold for every value
            let envs: Vec<Assignment> = match free.len() {
                0 => vec![case.env.clone()],
                1 => {
                    let v = free.first().unwrap();
                    points.iter().step_by(41).map(|p| {
                        let mut env = case.env.clone();
                        env.insert(v.clone(), p.clone());
                        env
                    }).collect()
                }
                _ => continue,
            };
            for env in &envs {
                if let (Some(b), Some(a)) = (oracle_eval(&step.before, env), oracle_eval(&step.after, env)) {
                    assert_eq!(b, a, "{case}: {} step {} => {}", step.rule, step.before, step.after);
                    compared += 1;
                }
            }
        }
    }
    assert!(compared > 200, "only {compared} steps compared");
}

#[test]
fn elimination_is_idempotent_and_closed() {
    for case in cases(5, 200) {
        let (qf, _) = eliminate_all(&case.formula);
        assert!(qf.is_quantifier_free());
        assert!(qf.free_vars().is_subset(&case.formula.free_vars()), "{case} gave {qf}");
        let (again, trace) = eliminate_all(&qf);
        assert_eq!(again, qf);
        assert!(trace.is_empty());
    }
}

#[test]
fn multi_quantifier_sentences() {
    let cases = [
        ("forall x. forall y. (x < y -> exists z. x < z & z < y & R[7](z))", true),
        ("exists x. forall y. x < y | x = y", false),
        ("forall x. exists y. y * y * y = x * x", false),
        ("forall x. (R[6](x) -> R[2](x) & R[3](x))", true),
        ("forall x. exists y. R[2](x * y) & R[3](x * y^2) & 1 < y", true),
        ("exists x. exists y. x * y = 1 & x < y & R[4](y)", true),
    ];
    for (text, expected) in cases {
        let f = mulord::formula::parse(text).unwrap();
        assert_eq!(mulord::semantics::decide(&f, Domain::QPos).unwrap(), expected, "{text}");
    }
}

const VARS: [&str; 3] = ["a", "b", "x"];

fn monomial() -> impl Strategy<Value = Monomial> {
    (
        prop::sample::select(vec![(1, 1), (2, 1), (1, 3), (9, 4), (8, 1)]),
        prop::collection::vec(-3i64..=3, 3),
    )
        .prop_map(|((p, q), exps)| {
            Monomial::new(ratio(p, q), VARS.iter().map(|v| v.to_string()).zip(exps).collect::<Vec<_>>())
        })
}

fn atom() -> impl Strategy<Value = Atom> {
    prop_oneof![
        (monomial(), monomial()).prop_map(|(l, r)| Atom::Eq(l, r)),
        (monomial(), monomial()).prop_map(|(l, r)| Atom::Lt(l, r)),
        (1u64..=6, monomial()).prop_map(|(n, t)| Atom::Pow(n, t)),
    ]
}

fn qf_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        8 => atom().prop_map(Formula::Atom),
        1 => Just(Formula::Top),
        1 => Just(Formula::Bottom),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::Or),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
        ]
    })
}

fn value() -> impl Strategy<Value = Rational> {
    (-3i64..=3, -3i64..=3).prop_map(|(i, j)| pow_rational(&ratio(2, 1), i) * pow_rational(&ratio(3, 1), j))
}

fn assignment() -> impl Strategy<Value = Assignment> {
    prop::collection::vec(value(), 3)
        .prop_map(|vs| VARS.iter().map(|v| v.to_string()).zip(vs).collect())
}

fn only_literal_negations(f: &Formula) -> bool {
    match f {
        Formula::Not(g) => matches!(**g, Formula::Atom(Atom::Pow(..))) || matches!(**g, Formula::Exists(..)),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().all(only_literal_negations),
        Formula::Implies(..) | Formula::Forall(..) => false,
        Formula::Exists(_, g) => only_literal_negations(g),
        _ => true,
    }
}

proptest! {
    #[test]
    fn nnf_and_simplify_preserve_truth(f in qf_formula(), env in assignment()) {
        let truth = eval_ground(&f, Domain::QPos, &env).unwrap();
        let nnf = to_nnf(&f);
        prop_assert!(only_literal_negations(&nnf), "{}", nnf);
        prop_assert_eq!(eval_ground(&nnf, Domain::QPos, &env).unwrap(), truth);
        prop_assert_eq!(eval_ground(&simplify(&f), Domain::QPos, &env).unwrap(), truth);
    }

    #[test]
    fn distribution_preserves_truth(f in qf_formula(), env in assignment()) {
        let f = Formula::exists("x", f);
        let d = distribute_exists(&to_nnf(&f));
        prop_assert_eq!(oracle_eval(&d, &env), oracle_eval(&f, &env), "{}", d);
    }

    #[test]
    fn isolation_preserves_truth(a in atom(), positive in any::<bool>(), env in assignment()) {
        let positive = positive || !matches!(a, Atom::Pow(..));
        let lit = Literal { atom: a, positive };
        let iso = isolate_literal(&lit, "x");
        prop_assert_eq!(
            eval_ground(&iso.to_formula("x"), Domain::QPos, &env).unwrap(),
            eval_ground(&lit.to_formula(), Domain::QPos, &env).unwrap(),
            "{:?}", iso
        );
    }
}
