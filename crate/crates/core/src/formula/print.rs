use super::{Atom, Formula};

// binding strength; quantifiers bind loosest since their body extends right
const QUANT: u8 = 0;
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;
const ATOM: u8 = 5;

fn strength(f: &Formula) -> u8 {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => QUANT,
        Formula::Implies(..) => IMPLIES,
        Formula::Or(fs) if fs.len() > 1 => OR,
        Formula::And(fs) if fs.len() > 1 => AND,
        Formula::Not(_) => NOT,
        _ => ATOM,
    }
}

fn print_atom(a: &Atom) -> String {
    match a {
        Atom::Eq(l, r) => format!("{l} = {r}"),
        Atom::Lt(l, r) => format!("{l} < {r}"),
        Atom::Pow(1, _) => "true".to_string(),
        Atom::Pow(n, t) => format!("R[{n}]({t})"),
    }
}

fn child(f: &Formula, min: u8, out: &mut String) {
    if strength(f) < min {
        out.push('(');
        write(f, out);
        out.push(')');
    } else {
        write(f, out);
    }
}

fn write(f: &Formula, out: &mut String) {
    match f {
        Formula::Top => out.push_str("true"),
        Formula::Bottom => out.push_str("false"),
        Formula::Atom(a) => out.push_str(&print_atom(a)),
        Formula::Not(g) => {
            out.push('!');
            child(g, NOT, out);
        }
        Formula::And(fs) if fs.is_empty() => out.push_str("true"),
        Formula::Or(fs) if fs.is_empty() => out.push_str("false"),
        Formula::And(fs) | Formula::Or(fs) if fs.len() == 1 => write(&fs[0], out),
        Formula::And(fs) => {
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" & ");
                }
                child(g, AND + 1, out);
            }
        }
        Formula::Or(fs) => {
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                child(g, OR + 1, out);
            }
        }
        Formula::Implies(a, b) => {
            child(a, IMPLIES + 1, out);
            out.push_str(" -> ");
            child(b, IMPLIES, out);
        }
        Formula::Exists(x, g) | Formula::Forall(x, g) => {
            let q = if matches!(f, Formula::Exists(..)) { "exists" } else { "forall" };
            out.push_str(&format!("{q} {x}. "));
            write(g, out);
        }
    }
}

/// Renders a formula in the input grammar with minimal parentheses.
/// Quantifiers nested under a connective are always parenthesized, because
/// a quantifier body extends as far right as possible.
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    write(f, &mut out);
    out
}
