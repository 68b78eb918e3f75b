//! Words over agents and formulas, histories, projections, the view
//! relation and the well-founded order on (word, formula) pairs.
//!
//! A formula letter is a broadcast; an agent letter is that agent reading
//! the next broadcast it has not yet read. A history is a word in which no
//! agent ever reads more broadcasts than have been sent.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{write_letter_formula, Agent, Formula};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Agent(Agent),
    Formula(Formula),
}

impl Letter {
    pub fn as_formula(&self) -> Option<&Formula> {
        match self {
            Letter::Formula(f) => Some(f),
            Letter::Agent(_) => None,
        }
    }

    pub fn as_agent(&self) -> Option<&Agent> {
        match self {
            Letter::Agent(a) => Some(a),
            Letter::Formula(_) => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Agent(a) => write!(f, "{}", a),
            Letter::Formula(g) => write_letter_formula(f, g),
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// A finite word. Ordered by length first, then lexicographically with
/// agent letters before formula letters.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

/// Occurrence counts of a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    /// `|w|_a` for each declared agent.
    pub receptions: BTreeMap<Agent, usize>,
    /// `|w|_!`
    pub announcements: usize,
    /// `|w|_{!a}`: announcements agent `a` has actually read.
    pub read: BTreeMap<Agent, usize>,
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    pub fn with(&self, letter: Letter) -> Word {
        let mut w = self.clone();
        w.push(letter);
        w
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend(other.0.iter().cloned());
        Word(letters)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// All prefixes, shortest first, including `ε` and the word itself.
    pub fn prefixes(&self) -> impl Iterator<Item = Word> + '_ {
        (0..=self.0.len()).map(move |n| Word(self.0[..n].to_vec()))
    }

    /// `|w|_a`
    pub fn receptions(&self, a: &Agent) -> usize {
        self.0.iter().filter(|l| l.as_agent() == Some(a)).count()
    }

    /// `|w|_!`
    pub fn announcements(&self) -> usize {
        self.0.iter().filter(|l| l.as_formula().is_some()).count()
    }

    /// `|w|_{!a} = min(|w|_a, |w|_!)`
    pub fn read_by(&self, a: &Agent) -> usize {
        self.receptions(a).min(self.announcements())
    }

    pub fn counts<'a>(&self, agents: impl IntoIterator<Item = &'a Agent>) -> Counts {
        let mut receptions = BTreeMap::new();
        let mut read = BTreeMap::new();
        let announcements = self.announcements();
        for a in agents {
            let r = self.receptions(a);
            receptions.insert(a.clone(), r);
            read.insert(a.clone(), r.min(announcements));
        }
        Counts {
            receptions,
            announcements,
            read,
        }
    }

    /// Every prefix gives every agent at most as many receptions as there
    /// were announcements.
    pub fn is_history(&self) -> bool {
        let mut sent = 0usize;
        let mut recv: BTreeMap<&Agent, usize> = BTreeMap::new();
        for l in &self.0 {
            match l {
                Letter::Formula(_) => sent += 1,
                Letter::Agent(a) => {
                    let r = recv.entry(a).or_default();
                    *r += 1;
                    if *r > sent {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `w↾_!`, the announced formulas in order.
    pub fn proj_ann(&self) -> Vec<Formula> {
        self.0
            .iter()
            .filter_map(|l| l.as_formula().cloned())
            .collect()
    }

    /// `w↾_{!a}`, the announcements `a` has read.
    pub fn proj_read(&self, a: &Agent) -> Vec<Formula> {
        let mut ann = self.proj_ann();
        ann.truncate(self.read_by(a));
        ann
    }

    /// `‖w‖`: one per reception plus the size of each announced formula,
    /// counted with multiplicity.
    pub fn size(&self) -> u64 {
        self.0
            .iter()
            .map(|l| match l {
                Letter::Agent(_) => 1,
                Letter::Formula(f) => f.size(),
            })
            .fold(0u64, u64::saturating_add)
    }

    /// Sum of the degrees of the announced formulas, with multiplicity.
    pub fn deg(&self) -> u64 {
        self.0
            .iter()
            .filter_map(Letter::as_formula)
            .map(Formula::deg)
            .sum()
    }

    /// `<w>φ`, folded right to left. `<ε>φ` is `φ`.
    pub fn diamond(&self, f: Formula) -> Formula {
        self.0.iter().rev().fold(f, |acc, l| match l {
            Letter::Agent(a) => Formula::recv(a.clone(), acc),
            Letter::Formula(m) => Formula::send(m.clone(), acc),
        })
    }

    /// `[w]φ := ¬<w>¬φ`, with `[ε]φ` taken to be `φ` itself.
    pub fn boxed(&self, f: Formula) -> Formula {
        if self.is_empty() {
            f
        } else {
            Formula::not(self.diamond(Formula::not(f)))
        }
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("eps");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{}", l)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// `α ▷_a β`: `β` is a history whose announcements are exactly the ones
/// `a` has read in `α`, all of them read by `a`.
pub fn view_rel(alpha: &Word, beta: &Word, a: &Agent) -> bool {
    if !beta.is_history() {
        return false;
    }
    let b_ann = beta.proj_ann();
    b_ann == beta.proj_read(a) && b_ann == alpha.proj_read(a)
}

/// `view_a(α)` in canonical order.
///
/// Interleaves the announcements `a` has read with exactly that many
/// receptions by `a` and up to that many receptions by every other agent,
/// keeping only histories.
pub fn views<'a>(
    alpha: &Word,
    a: &Agent,
    agents: impl IntoIterator<Item = &'a Agent>,
) -> Vec<Word> {
    let seq = alpha.proj_read(a);
    let mut agents: Vec<&Agent> = agents.into_iter().collect();
    if !agents.contains(&a) {
        agents.push(a);
    }
    agents.sort();
    agents.dedup();
    let mut out = Vec::new();
    let mut recv = vec![0usize; agents.len()];
    let me = agents.iter().position(|x| *x == a).expect("agent present");
    let mut cur = Vec::new();
    enumerate_views(&seq, &agents, me, 0, &mut recv, &mut cur, &mut out);
    out.sort();
    out
}

fn enumerate_views(
    seq: &[Formula],
    agents: &[&Agent],
    me: usize,
    sent: usize,
    recv: &mut Vec<usize>,
    cur: &mut Vec<Letter>,
    out: &mut Vec<Word>,
) {
    if sent == seq.len() && recv[me] == seq.len() {
        out.push(Word(cur.clone()));
    }
    if sent < seq.len() {
        cur.push(Letter::Formula(seq[sent].clone()));
        enumerate_views(seq, agents, me, sent + 1, recv, cur, out);
        cur.pop();
    }
    for i in 0..agents.len() {
        // at most |seq| receptions each, never more than what was sent
        if recv[i] < sent {
            recv[i] += 1;
            cur.push(Letter::Agent(agents[i].clone()));
            enumerate_views(seq, agents, me, sent, recv, cur, out);
            cur.pop();
            recv[i] -= 1;
        }
    }
}

/// The lexicographic termination measure of a (word, formula) pair:
/// `deg(<α>φ)` first, then `‖α‖ + ‖φ‖`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Measure {
    pub deg: u64,
    pub size: u64,
}

impl Measure {
    pub fn of(alpha: &Word, f: &Formula) -> Self {
        Measure {
            deg: word_formula_deg(alpha, f),
            size: alpha.size().saturating_add(f.size()),
        }
    }
}

/// `deg(α, φ) := deg(<α>φ) = deg(φ) + Σ_{ψ ∈ α} deg(ψ)`.
pub fn word_formula_deg(alpha: &Word, f: &Formula) -> u64 {
    f.deg() + alpha.deg()
}

/// `(α, φ) ≪ (β, ψ)`
pub fn ll_less(lhs: (&Word, &Formula), rhs: (&Word, &Formula)) -> bool {
    Measure::of(lhs.0, lhs.1) < Measure::of(rhs.0, rhs.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_word, Atom, Signature};

    fn sig() -> Signature {
        Signature::from_names(&["a", "b"], &["p", "q"]).unwrap()
    }

    fn w(text: &str) -> Word {
        parse_word(text, &sig()).unwrap()
    }

    fn a() -> Agent {
        Agent::new("a")
    }

    fn b() -> Agent {
        Agent::new("b")
    }

    #[test]
    fn counting() {
        let s = sig();
        let c = w("p.q.a.a").counts(s.agents());
        assert_eq!(c.receptions[&a()], 2);
        assert_eq!(c.receptions[&b()], 0);
        assert_eq!(c.announcements, 2);
        assert_eq!(c.read[&a()], 2);
        let c = Word::empty().counts(s.agents());
        assert!(c.receptions.values().all(|&n| n == 0) && c.announcements == 0);
        let c = w("p.a.q").counts(s.agents());
        assert_eq!((c.receptions[&a()], c.announcements), (1, 2));
        // reading is capped by what was sent
        assert_eq!(w("a.a.p").read_by(&a()), 1);
    }

    #[test]
    fn histories() {
        assert!(w("p.q.a.a").is_history());
        assert!(w("p.a.q").is_history());
        assert!(!w("p.a.a.q").is_history());
        assert!(!w("p.q.a.a.a").is_history());
        assert!(Word::empty().is_history());
    }

    #[test]
    fn projections() {
        let p = Formula::atom(Atom::new("p"));
        let q = Formula::atom(Atom::new("q"));
        assert_eq!(w("p.a.q").proj_ann(), vec![p.clone(), q.clone()]);
        assert_eq!(w("a.a").proj_ann(), vec![]);
        assert_eq!(w("(p|q).a.b").proj_ann(), vec![Formula::or(p.clone(), q)]);
        assert_eq!(w("p.a").proj_read(&a()), vec![p]);
        assert_eq!(w("p.a").proj_read(&b()), vec![]);
        assert_eq!(Word::empty().proj_read(&a()), vec![]);
    }

    #[test]
    fn view_relation_examples() {
        assert!(view_rel(&w("p.a"), &w("p.b.a"), &a()));
        assert!(view_rel(&w("p.a"), &Word::empty(), &b()));
        assert!(!view_rel(&w("p.a.q"), &w("p.a.q"), &a()));
        assert!(view_rel(&w("p.a.q"), &w("p.a"), &a()));
        assert!(!view_rel(&w("p.a"), &w("p.a.q"), &a()));
    }

    #[test]
    fn view_sets() {
        let s = sig();
        assert_eq!(
            views(&w("p.a"), &a(), s.agents()),
            vec![w("p.a"), w("p.a.b"), w("p.b.a")]
        );
        assert_eq!(views(&w("p.a"), &b(), s.agents()), vec![Word::empty()]);
        assert_eq!(views(&Word::empty(), &a(), s.agents()), vec![Word::empty()]);
    }

    #[test]
    fn sizes() {
        assert_eq!(Word::empty().size(), 0);
        assert_eq!(w("p.a").size(), 3);
        assert_eq!(w("p.p").size(), 4);
    }

    #[test]
    fn termination_order() {
        let p = Formula::atom(Atom::new("p"));
        let eps = Word::empty();
        assert!(ll_less((&eps, &p), (&eps, &Formula::not(p.clone()))));
        assert!(!ll_less((&eps, &p), (&eps, &p)));
        let alpha = w("p.a");
        let khat = Formula::hat_k(a(), p.clone());
        for beta in views(&alpha, &a(), sig().agents()) {
            assert!(ll_less((&beta, &p), (&alpha, &khat)));
        }
    }

    #[test]
    fn folding() {
        let p = Formula::atom(Atom::new("p"));
        let q = Formula::atom(Atom::new("q"));
        assert_eq!(Word::empty().diamond(p.clone()), p);
        assert_eq!(
            w("p.a").diamond(q.clone()),
            Formula::send(p.clone(), Formula::recv(a(), q.clone()))
        );
        let t = Word::from_letters(vec![Letter::Formula(Formula::top())]);
        assert_eq!(
            t.boxed(Formula::bot()),
            Formula::not(Formula::send(Formula::top(), Formula::not(Formula::bot())))
        );
        // the degree lemma: deg(<α>φ) = deg(φ) + Σ deg of announcements
        let alpha = w("(Khat a p).a.(Khat b Khat a q)");
        let phi = Formula::hat_k(b(), q);
        assert_eq!(
            alpha.diamond(phi.clone()).deg(),
            word_formula_deg(&alpha, &phi)
        );
    }
}
