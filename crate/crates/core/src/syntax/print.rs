use std::fmt::{self, Write};

use super::{Formula, FormulaKind, Signature};
use crate::validity::empty_formula;

/// Canonical text of a formula. Only primitive constructors are printed;
/// every disjunction carries its own parentheses, so no precedence is
/// needed to read the output back.
pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f).expect("writing to a String cannot fail");
    s
}

pub(crate) fn write_formula<W: Write>(out: &mut W, f: &Formula) -> fmt::Result {
    match f.kind() {
        FormulaKind::Atom(p) => out.write_str(p.name()),
        FormulaKind::Top => out.write_char('T'),
        FormulaKind::Not(g) => {
            out.write_char('~')?;
            write_formula(out, g)
        }
        FormulaKind::Or(g, h) => {
            out.write_char('(')?;
            write_formula(out, g)?;
            out.write_str(" | ")?;
            write_formula(out, h)?;
            out.write_char(')')
        }
        FormulaKind::HatK(a, g) => {
            write!(out, "Khat {} ", a)?;
            write_formula(out, g)
        }
        FormulaKind::Send(m, g) => {
            out.write_char('<')?;
            write_formula(out, m)?;
            out.write_char('>')?;
            write_formula(out, g)
        }
        FormulaKind::Recv(a, g) => {
            write!(out, "<{}>", a)?;
            write_formula(out, g)
        }
    }
}

/// Text that uses the derived connectives wherever the primitive structure
/// matches one. Given a signature, its `empty` formula prints as `empty`.
/// Binary connectives are always parenthesized, so the text parses back to
/// the same formula.
pub fn pretty_formula(f: &Formula, sig: Option<&Signature>) -> String {
    let empty = sig.map(|s| empty_formula(s).0);
    let mut s = String::new();
    write_pretty(&mut s, f, empty.as_ref()).expect("writing to a String cannot fail");
    s
}

fn write_pretty<W: Write>(out: &mut W, f: &Formula, empty: Option<&Formula>) -> fmt::Result {
    if empty == Some(f) {
        return out.write_str("empty");
    }
    let binary = |out: &mut W, l: &Formula, op: &str, r: &Formula| -> fmt::Result {
        out.write_char('(')?;
        write_pretty(out, l, empty)?;
        write!(out, " {} ", op)?;
        write_pretty(out, r, empty)?;
        out.write_char(')')
    };
    if let Some((l, r)) = f.as_iff() {
        return binary(out, l, "<->", r);
    }
    if let Some((l, r)) = f.as_and() {
        return binary(out, l, "&", r);
    }
    if let Some((l, r)) = f.as_implies() {
        return binary(out, l, "->", r);
    }
    if let Some((a, g)) = f.as_k() {
        write!(out, "K {} ", a)?;
        return write_pretty(out, g, empty);
    }
    if let FormulaKind::Not(g) = f.kind() {
        let mut letters = Vec::new();
        let mut body = g;
        loop {
            match body.kind() {
                FormulaKind::Send(m, _) => letters.push(Err(m)),
                FormulaKind::Recv(a, _) => letters.push(Ok(a)),
                _ => break,
            }
            body = body
                .children()
                .last()
                .copied()
                .expect("modalities have a body");
        }
        if let (true, FormulaKind::Not(x)) = (letters.len() > 1, body.kind()) {
            out.write_str("@[")?;
            for (i, l) in letters.iter().enumerate() {
                if i > 0 {
                    out.write_char('.')?;
                }
                match l {
                    Ok(a) => write!(out, "{}", a)?,
                    // these already print as one token or one parenthesized group
                    Err(m)
                        if m.is_atom()
                            || m.is_top()
                            || empty == Some(*m)
                            || matches!(m.kind(), FormulaKind::Or(..))
                            || m.as_and().is_some() =>
                    {
                        write_pretty(out, m, empty)?
                    }
                    Err(m) => {
                        out.write_char('(')?;
                        write_pretty(out, m, empty)?;
                        out.write_char(')')?;
                    }
                }
            }
            out.write_char(']')?;
            return write_pretty(out, x, empty);
        }
    }
    if let Some((m, g)) = f.as_box_send() {
        out.write_char('[')?;
        write_pretty(out, m, empty)?;
        out.write_char(']')?;
        return write_pretty(out, g, empty);
    }
    if let Some((a, g)) = f.as_box_recv() {
        write!(out, "[{}]", a)?;
        return write_pretty(out, g, empty);
    }
    if f.is_bot() {
        return out.write_char('F');
    }
    match f.kind() {
        FormulaKind::Atom(p) => out.write_str(p.name()),
        FormulaKind::Top => out.write_char('T'),
        FormulaKind::Not(g) => {
            out.write_char('~')?;
            write_pretty(out, g, empty)
        }
        FormulaKind::Or(g, h) => binary(out, g, "|", h),
        FormulaKind::HatK(a, g) => {
            write!(out, "Khat {} ", a)?;
            write_pretty(out, g, empty)
        }
        FormulaKind::Send(m, g) => {
            out.write_char('<')?;
            write_pretty(out, m, empty)?;
            out.write_char('>')?;
            write_pretty(out, g, empty)
        }
        FormulaKind::Recv(a, g) => {
            write!(out, "<{}>", a)?;
            write_pretty(out, g, empty)
        }
    }
}

/// A formula as a word letter: atoms, `T` and disjunctions stand alone,
/// everything else is wrapped in parentheses.
pub(crate) fn write_letter_formula<W: Write>(out: &mut W, f: &Formula) -> fmt::Result {
    match f.kind() {
        FormulaKind::Atom(_) | FormulaKind::Top | FormulaKind::Or(..) => write_formula(out, f),
        _ => {
            out.write_char('(')?;
            write_formula(out, f)?;
            out.write_char(')')
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Agent, Atom};

    #[test]
    fn canonical_text() {
        let p = Formula::atom(Atom::new("p"));
        let q = Formula::atom(Atom::new("q"));
        let a = Agent::new("a");
        assert_eq!(print_formula(&p), "p");
        assert_eq!(
            print_formula(&Formula::or(p.clone(), Formula::not(q))),
            "(p | ~q)"
        );
        assert_eq!(
            print_formula(&Formula::send(
                Formula::top(),
                Formula::recv(a.clone(), Formula::top())
            )),
            "<T><a>T"
        );
        assert_eq!(print_formula(&Formula::k(a, p)), "~Khat a ~p");
    }

    #[test]
    fn sugared_text() {
        let sig = Signature::from_names(&["a", "b"], &["p", "q"]).unwrap();
        let p = Formula::atom(Atom::new("p"));
        let a = Agent::new("a");
        let f = Formula::implies(
            empty_formula(&sig).0,
            Formula::box_recv(a.clone(), Formula::k(a, Formula::bot())),
        );
        assert_eq!(pretty_formula(&f, Some(&sig)), "(empty -> [a]K a F)");
        assert_eq!(
            pretty_formula(
                &Formula::iff(Formula::send(p.clone(), Formula::top()), p.clone()),
                None
            ),
            "(<p>T <-> p)"
        );
        let w = crate::syntax::parse_word("(p | q).a", &sig).unwrap();
        let boxed = w.boxed(p);
        assert_eq!(pretty_formula(&boxed, None), "@[(p | q).a]p");
        assert_eq!(
            crate::syntax::parse_formula("@[(p | q).a]p", &sig).unwrap(),
            boxed
        );
    }
}
