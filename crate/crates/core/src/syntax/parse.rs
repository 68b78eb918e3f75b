//! Text grammar for formulas and words.
//!
//! ```text
//! formula := imp ( "<->" imp )*
//! imp     := disj ( "->" imp )?
//! disj    := conj ( "|" conj )*
//! conj    := unary ( "&" unary )*
//! unary   := "~" unary
//!          | "Khat" AGENT unary | "K" AGENT unary
//!          | "<" AGENT ">" unary | "<" formula ">" unary
//!          | "[" AGENT "]" unary | "[" formula "]" unary
//!          | "@<" word ">" unary | "@[" word "]" unary
//!          | ATOM | "T" | "F" | "empty" | "(" formula ")"
//! word    := "eps" | letter ( "." letter )*
//! letter  := AGENT | ATOM | "T" | "(" formula ")"
//! ```
//!
//! `@<w>φ` and `@[w]φ` fold a whole word of modalities. Inside them, formula
//! letters other than atoms and `T` must be parenthesized.

use thiserror::Error;

use super::{Formula, Signature};
use crate::words::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("lex error at byte {pos}: {msg}")]
    Lex { pos: usize, msg: String },
    #[error("ambiguity at byte {pos}: `{ident}` is neither a declared agent nor a declared atom")]
    Ambiguity { pos: usize, ident: String },
    #[error("unknown atom `{ident}` at byte {pos}")]
    UnknownAtom { pos: usize, ident: String },
    #[error("unknown agent `{ident}` at byte {pos}")]
    UnknownAgent { pos: usize, ident: String },
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Top,
    Bot,
    K,
    Khat,
    Empty,
    Tilde,
    Bar,
    Amp,
    Arrow,
    DArrow,
    Lt,
    Gt,
    LBrack,
    RBrack,
    LParen,
    RParen,
    WordDiamond(String, usize),
    WordBox(String, usize),
}

fn describe(t: Option<&Tok>) -> String {
    match t {
        None => "end of input".into(),
        Some(Tok::Ident(s)) => format!("`{}`", s),
        Some(t) => format!("{:?}", t),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => out.push((Tok::Tilde, start)),
            b'|' => out.push((Tok::Bar, start)),
            b'&' => out.push((Tok::Amp, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b'[' => out.push((Tok::LBrack, start)),
            b']' => out.push((Tok::RBrack, start)),
            b'>' => out.push((Tok::Gt, start)),
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((Tok::Arrow, start));
                    i += 1;
                } else {
                    return Err(ParseError::Lex {
                        pos: start,
                        msg: "expected `->`".into(),
                    });
                }
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    out.push((Tok::DArrow, start));
                    i += 2;
                } else {
                    out.push((Tok::Lt, start));
                }
            }
            b'@' => {
                let (close, diamond) = match bytes.get(i + 1) {
                    Some(b'<') => (b'>', true),
                    Some(b'[') => (b']', false),
                    _ => {
                        return Err(ParseError::Lex {
                            pos: start,
                            msg: "expected `@<` or `@[`".into(),
                        })
                    }
                };
                let body_start = i + 2;
                let mut depth = 0usize;
                let mut j = body_start;
                loop {
                    match bytes.get(j) {
                        None => {
                            return Err(ParseError::Syntax {
                                pos: start,
                                msg: "unterminated word modality".into(),
                            })
                        }
                        Some(b'(') => depth += 1,
                        Some(b')') => {
                            depth = depth.checked_sub(1).ok_or(ParseError::Syntax {
                                pos: j,
                                msg: "unbalanced `)` in word".into(),
                            })?
                        }
                        Some(&b) if b == close && depth == 0 => break,
                        _ => {}
                    }
                    j += 1;
                }
                let body = text[body_start..j].to_string();
                out.push((
                    if diamond {
                        Tok::WordDiamond(body, body_start)
                    } else {
                        Tok::WordBox(body, body_start)
                    },
                    start,
                ));
                i = j;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_' || bytes[j] == b'\'')
                {
                    j += 1;
                }
                let word = &text[i..j];
                let tok = match word {
                    "T" => Tok::Top,
                    "F" => Tok::Bot,
                    "K" => Tok::K,
                    "Khat" => Tok::Khat,
                    "empty" => Tok::Empty,
                    w if w.starts_with(|c: char| c.is_ascii_lowercase() || c == '_') => {
                        Tok::Ident(w.to_string())
                    }
                    w => {
                        return Err(ParseError::Lex {
                            pos: start,
                            msg: format!("identifiers must start lowercase, found `{}`", w),
                        })
                    }
                };
                out.push((tok, start));
                i = j;
                continue;
            }
            other => {
                return Err(ParseError::Lex {
                    pos: start,
                    msg: format!("unexpected character `{}`", other as char),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'s> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    offset: usize,
    sig: &'s Signature,
}

impl<'s> Parser<'s> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.offset + self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::Syntax {
                pos: self.here(),
                msg: format!("expected {}, found {}", what, describe(self.peek())),
            })
        }
    }

    fn agent(&mut self) -> Result<super::Agent, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Ident(name)) => self
                .sig
                .agent(&name)
                .ok_or(ParseError::UnknownAgent { pos, ident: name }),
            other => Err(ParseError::Syntax {
                pos,
                msg: format!("expected an agent, found {}", describe(other.as_ref())),
            }),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.imp()?;
        while self.peek() == Some(&Tok::DArrow) {
            self.pos += 1;
            let g = self.imp()?;
            f = Formula::iff(f, g);
        }
        Ok(f)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let f = self.disj()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let g = self.imp()?;
            return Ok(Formula::implies(f, g));
        }
        Ok(f)
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conj()?;
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            let g = self.conj()?;
            f = Formula::or(f, g);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            let g = self.unary()?;
            f = Formula::and(f, g);
        }
        Ok(f)
    }

    /// After an opening `<` or `[`: either a single identifier that names an
    /// agent (reception) or a whole formula (announcement).
    fn modality_arg(&mut self, close: Tok) -> Result<Result<super::Agent, Formula>, ParseError> {
        if let (Some(Tok::Ident(name)), Some(next)) = (self.peek(), self.peek_at(1)) {
            if *next == close {
                let name = name.clone();
                let pos = self.here();
                self.pos += 2;
                if let Some(a) = self.sig.agent(&name) {
                    return Ok(Ok(a));
                }
                if let Some(p) = self.sig.atom(&name) {
                    return Ok(Err(Formula::atom(p)));
                }
                return Err(ParseError::Ambiguity { pos, ident: name });
            }
        }
        let f = self.formula()?;
        let what = if close == Tok::Gt { "`>`" } else { "`]`" };
        self.expect(close, what)?;
        Ok(Err(f))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let pos = self.here();
        let tok = self.bump();
        match tok {
            Some(Tok::Tilde) => Ok(Formula::not(self.unary()?)),
            Some(Tok::Khat) => {
                let a = self.agent()?;
                Ok(Formula::hat_k(a, self.unary()?))
            }
            Some(Tok::K) => {
                let a = self.agent()?;
                Ok(Formula::k(a, self.unary()?))
            }
            Some(Tok::Lt) => match self.modality_arg(Tok::Gt)? {
                Ok(a) => Ok(Formula::recv(a, self.unary()?)),
                Err(m) => Ok(Formula::send(m, self.unary()?)),
            },
            Some(Tok::LBrack) => match self.modality_arg(Tok::RBrack)? {
                Ok(a) => Ok(Formula::box_recv(a, self.unary()?)),
                Err(m) => Ok(Formula::box_send(m, self.unary()?)),
            },
            Some(Tok::WordDiamond(body, at)) => {
                let w = parse_word_at(&body, self.sig, self.offset + at)?;
                Ok(w.diamond(self.unary()?))
            }
            Some(Tok::WordBox(body, at)) => {
                let w = parse_word_at(&body, self.sig, self.offset + at)?;
                Ok(w.boxed(self.unary()?))
            }
            Some(Tok::Top) => Ok(Formula::top()),
            Some(Tok::Bot) => Ok(Formula::bot()),
            Some(Tok::Empty) => Ok(crate::validity::empty_formula(self.sig).0),
            Some(Tok::LParen) => {
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => {
                if let Some(p) = self.sig.atom(&name) {
                    Ok(Formula::atom(p))
                } else if self.sig.agent(&name).is_some() {
                    Err(ParseError::Syntax {
                        pos,
                        msg: format!("agent `{}` used where a formula is expected", name),
                    })
                } else {
                    Err(ParseError::UnknownAtom { pos, ident: name })
                }
            }
            other => Err(ParseError::Syntax {
                pos,
                msg: format!("expected a formula, found {}", describe(other.as_ref())),
            }),
        }
    }
}

fn parse_formula_at(text: &str, sig: &Signature, offset: usize) -> Result<Formula, ParseError> {
    let toks = lex(text).map_err(|e| shift(e, offset))?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        offset,
        sig,
    };
    let f = p.formula()?;
    if p.pos < p.toks.len() {
        return Err(ParseError::Syntax {
            pos: p.here(),
            msg: format!("unexpected trailing {}", describe(p.peek())),
        });
    }
    Ok(f)
}

fn shift(e: ParseError, by: usize) -> ParseError {
    match e {
        ParseError::Lex { pos, msg } => ParseError::Lex { pos: pos + by, msg },
        ParseError::Syntax { pos, msg } => ParseError::Syntax { pos: pos + by, msg },
        other => other,
    }
}

/// Parses a formula over the declared agents and atoms, expanding every
/// abbreviation into the seven primitives.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    parse_formula_at(text, sig, 0)
}

fn parse_word_at(text: &str, sig: &Signature, offset: usize) -> Result<Word, ParseError> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == "eps" {
        return Ok(Word::empty());
    }
    let mut letters = Vec::new();
    let mut depth = 0i64;
    let mut start = 0usize;
    let bytes = text.as_bytes();
    let mut pieces = Vec::new();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'.' if depth == 0 => {
                pieces.push((start, i));
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(ParseError::Syntax {
                pos: offset + i,
                msg: "unbalanced `)`".into(),
            });
        }
    }
    if depth != 0 {
        return Err(ParseError::Syntax {
            pos: offset + text.len(),
            msg: "unbalanced `(`".into(),
        });
    }
    pieces.push((start, text.len()));
    for (s, e) in pieces {
        let raw = &text[s..e];
        let lead = raw.len() - raw.trim_start().len();
        let piece = raw.trim();
        if piece.is_empty() {
            return Err(ParseError::Syntax {
                pos: offset + s,
                msg: "empty letter in word".into(),
            });
        }
        if let Some(a) = sig.agent(piece) {
            letters.push(Letter::Agent(a));
        } else {
            letters.push(Letter::Formula(parse_formula_at(
                piece,
                sig,
                offset + s + lead,
            )?));
        }
    }
    Ok(Word::from_letters(letters))
}

/// Parses a dot-separated word such as `(p | q).a.b`; `eps` is the empty word.
pub fn parse_word(text: &str, sig: &Signature) -> Result<Word, ParseError> {
    parse_word_at(text, sig, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{print_formula, Agent, Atom};

    fn sig() -> Signature {
        Signature::from_names(&["a", "b"], &["p", "q"]).unwrap()
    }

    fn p() -> Formula {
        Formula::atom(Atom::new("p"))
    }

    fn q() -> Formula {
        Formula::atom(Atom::new("q"))
    }

    #[test]
    fn announcement_of_disjunction() {
        let f = parse_formula("<p|q> Khat a p", &sig()).unwrap();
        assert_eq!(
            f,
            Formula::send(Formula::or(p(), q()), Formula::hat_k(Agent::new("a"), p()))
        );
    }

    #[test]
    fn reception_box_desugars() {
        let f = parse_formula("[a]~T", &sig()).unwrap();
        let expected = Formula::not(Formula::recv(
            Agent::new("a"),
            Formula::not(Formula::not(Formula::top())),
        ));
        assert_eq!(f, expected);
        assert_eq!(f, Formula::box_recv(Agent::new("a"), Formula::bot()));
    }

    #[test]
    fn knowledge_desugars() {
        let f = parse_formula("K a p", &sig()).unwrap();
        assert_eq!(
            f,
            Formula::not(Formula::hat_k(Agent::new("a"), Formula::not(p())))
        );
    }

    #[test]
    fn precedence() {
        let s = sig();
        let f = parse_formula("p & q | ~p -> q <-> p", &s).unwrap();
        let lhs = Formula::implies(Formula::or(Formula::and(p(), q()), Formula::not(p())), q());
        assert_eq!(f, Formula::iff(lhs, p()));
        // -> is right associative
        let g = parse_formula("p -> q -> p", &s).unwrap();
        assert_eq!(g, Formula::implies(p(), Formula::implies(q(), p())));
    }

    #[test]
    fn atom_in_angle_brackets_is_an_announcement() {
        let f = parse_formula("<p>q", &sig()).unwrap();
        assert_eq!(f, Formula::send(p(), q()));
        let g = parse_formula("[p]<a>T", &sig()).unwrap();
        assert_eq!(
            g,
            Formula::box_send(p(), Formula::recv(Agent::new("a"), Formula::top()))
        );
    }

    #[test]
    fn nested_announcements() {
        let f = parse_formula("<<p>q>p", &sig()).unwrap();
        assert_eq!(f, Formula::send(Formula::send(p(), q()), p()));
        let g = parse_formula("<p -> q>p", &sig()).unwrap();
        assert_eq!(g, Formula::send(Formula::implies(p(), q()), p()));
    }

    #[test]
    fn word_modalities() {
        let s = sig();
        let f = parse_formula("@<p.a>q", &s).unwrap();
        assert_eq!(f, Formula::send(p(), Formula::recv(Agent::new("a"), q())));
        let g = parse_formula("@[(p | q).a]q", &s).unwrap();
        let inner = Formula::send(
            Formula::or(p(), q()),
            Formula::recv(Agent::new("a"), Formula::not(q())),
        );
        assert_eq!(g, Formula::not(inner));
        assert_eq!(parse_formula("@[eps]q", &s).unwrap(), q());
    }

    #[test]
    fn errors() {
        let s = sig();
        assert!(matches!(
            parse_formula("p # q", &s),
            Err(ParseError::Lex { pos: 2, .. })
        ));
        assert!(matches!(
            parse_formula("<x>p", &s),
            Err(ParseError::Ambiguity { .. })
        ));
        assert!(matches!(
            parse_formula("[x]p", &s),
            Err(ParseError::Ambiguity { .. })
        ));
        assert!(matches!(
            parse_formula("(p | q", &s),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_formula("p)", &s),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_formula("r", &s),
            Err(ParseError::UnknownAtom { .. })
        ));
        assert!(matches!(
            parse_formula("K c p", &s),
            Err(ParseError::UnknownAgent { .. })
        ));
        assert!(matches!(
            parse_formula("a", &s),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_formula("Pq", &s),
            Err(ParseError::Lex { .. })
        ));
    }

    #[test]
    fn words() {
        let s = sig();
        let w = parse_word("(p|q).a.b", &s).unwrap();
        assert_eq!(w.to_string(), "(p | q).a.b");
        assert_eq!(parse_word("eps", &s).unwrap(), Word::empty());
        let w = parse_word("p.b.(~K b p)", &s).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(parse_word(&w.to_string(), &s).unwrap(), w);
        assert!(parse_word("p..a", &s).is_err());
        assert!(parse_word("p.(q", &s).is_err());
    }

    #[test]
    fn printed_box_reparses_to_dual() {
        let s = sig();
        let f = parse_formula("[p]q", &s).unwrap();
        let back = parse_formula(&print_formula(&f), &s).unwrap();
        assert_eq!(back, Formula::not(Formula::send(p(), Formula::not(q()))));
    }
}
