use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

/// An agent identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Agent(Arc<str>);

/// An atomic proposition identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Agent {
    pub fn new(name: &str) -> Self {
        Agent(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl Atom {
    pub fn new(name: &str) -> Self {
        Atom(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The seven primitive constructors. Everything else desugars into these.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum FormulaKind {
    Atom(Atom),
    Top,
    Not(Formula),
    Or(Formula, Formula),
    /// Epistemic possibility `Khat a φ`.
    HatK(Agent, Formula),
    /// Announcement (sending) `<μ>φ`.
    Send(Formula, Formula),
    /// Reception of the next queued announcement by an agent, `<a>φ`.
    Recv(Agent, Formula),
}

struct Node {
    kind: FormulaKind,
    hash: u64,
    size: u64,
    deg: u64,
}

/// An immutable, cheaply clonable formula.
///
/// Identity is structural. Size and modal degree are computed once at
/// construction and cached, as is a structural hash, so formulas are cheap
/// to use as memo keys.
#[derive(Clone)]
pub struct Formula(Arc<Node>);

impl Formula {
    fn build(kind: FormulaKind) -> Self {
        let (size, deg) = match &kind {
            FormulaKind::Atom(_) => (2, 0),
            FormulaKind::Top => (1, 0),
            FormulaKind::Not(f) => (f.size().saturating_add(1), f.deg()),
            FormulaKind::Or(f, g) => (f.size().saturating_add(g.size()), f.deg().max(g.deg())),
            FormulaKind::HatK(_, f) => (f.size().saturating_add(1), f.deg() + 1),
            FormulaKind::Send(m, f) => (
                m.size().saturating_mul(2).saturating_add(f.size()),
                m.deg() + f.deg(),
            ),
            FormulaKind::Recv(_, f) => (f.size().saturating_add(2), f.deg()),
        };
        let mut h = DefaultHasher::new();
        kind.hash(&mut h);
        Formula(Arc::new(Node {
            hash: h.finish(),
            kind,
            size,
            deg,
        }))
    }

    pub fn kind(&self) -> &FormulaKind {
        &self.0.kind
    }

    pub fn atom(p: Atom) -> Self {
        Self::build(FormulaKind::Atom(p))
    }

    pub fn top() -> Self {
        Self::build(FormulaKind::Top)
    }

    pub fn not(f: Formula) -> Self {
        Self::build(FormulaKind::Not(f))
    }

    pub fn or(f: Formula, g: Formula) -> Self {
        Self::build(FormulaKind::Or(f, g))
    }

    pub fn hat_k(a: Agent, f: Formula) -> Self {
        Self::build(FormulaKind::HatK(a, f))
    }

    pub fn send(announcement: Formula, f: Formula) -> Self {
        Self::build(FormulaKind::Send(announcement, f))
    }

    pub fn recv(a: Agent, f: Formula) -> Self {
        Self::build(FormulaKind::Recv(a, f))
    }

    // Abbreviations. Each one expands eagerly into primitives.

    /// `⊥ := ¬⊤`
    pub fn bot() -> Self {
        Self::not(Self::top())
    }

    /// `φ ∧ ψ := ¬(¬φ ∨ ¬ψ)`
    pub fn and(f: Formula, g: Formula) -> Self {
        Self::not(Self::or(Self::not(f), Self::not(g)))
    }

    /// `φ → ψ := ¬φ ∨ ψ`
    pub fn implies(f: Formula, g: Formula) -> Self {
        Self::or(Self::not(f), g)
    }

    /// `φ ↔ ψ := (φ → ψ) ∧ (ψ → φ)`
    pub fn iff(f: Formula, g: Formula) -> Self {
        Self::and(Self::implies(f.clone(), g.clone()), Self::implies(g, f))
    }

    /// `K_a φ := ¬K̂_a ¬φ`
    pub fn k(a: Agent, f: Formula) -> Self {
        Self::not(Self::hat_k(a, Self::not(f)))
    }

    /// `[μ]φ := ¬<μ>¬φ`
    pub fn box_send(announcement: Formula, f: Formula) -> Self {
        Self::not(Self::send(announcement, Self::not(f)))
    }

    /// `[a]φ := ¬<a>¬φ`
    pub fn box_recv(a: Agent, f: Formula) -> Self {
        Self::not(Self::recv(a, Self::not(f)))
    }

    /// Left-nested conjunction of `fs`; `⊤` for an empty list.
    pub fn and_all<I: IntoIterator<Item = Formula>>(fs: I) -> Self {
        let mut it = fs.into_iter();
        match it.next() {
            None => Self::top(),
            Some(first) => it.fold(first, Self::and),
        }
    }

    /// Left-nested disjunction of `fs`; `⊥` for an empty list.
    pub fn or_all<I: IntoIterator<Item = Formula>>(fs: I) -> Self {
        let mut it = fs.into_iter();
        match it.next() {
            None => Self::bot(),
            Some(first) => it.fold(first, Self::or),
        }
    }

    /// `‖φ‖`, the weighted size used by the termination order.
    pub fn size(&self) -> u64 {
        self.0.size
    }

    /// Modal degree. Receptions do not count; announcements add the
    /// degree of the announced formula.
    pub fn deg(&self) -> u64 {
        self.0.deg
    }

    pub fn is_atom(&self) -> bool {
        matches!(self.kind(), FormulaKind::Atom(_))
    }

    pub fn is_top(&self) -> bool {
        matches!(self.kind(), FormulaKind::Top)
    }

    pub fn ptr_eq(&self, other: &Formula) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    // Views through the abbreviations. Each one recognizes exactly the
    // primitive shape its constructor builds.

    /// `φ → ψ`
    pub fn as_implies(&self) -> Option<(&Formula, &Formula)> {
        match self.kind() {
            FormulaKind::Or(f, g) => match f.kind() {
                FormulaKind::Not(f) => Some((f, g)),
                _ => None,
            },
            _ => None,
        }
    }

    /// `φ ∧ ψ`
    pub fn as_and(&self) -> Option<(&Formula, &Formula)> {
        match self.kind() {
            FormulaKind::Not(inner) => match inner.kind() {
                FormulaKind::Or(f, g) => match (f.kind(), g.kind()) {
                    (FormulaKind::Not(f), FormulaKind::Not(g)) => Some((f, g)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// `φ ↔ ψ`
    pub fn as_iff(&self) -> Option<(&Formula, &Formula)> {
        let (l, r) = self.as_and()?;
        let (f, g) = l.as_implies()?;
        let (g2, f2) = r.as_implies()?;
        (f == f2 && g == g2).then_some((f, g))
    }

    /// `K_a φ`
    pub fn as_k(&self) -> Option<(&Agent, &Formula)> {
        match self.kind() {
            FormulaKind::Not(inner) => match inner.kind() {
                FormulaKind::HatK(a, f) => match f.kind() {
                    FormulaKind::Not(f) => Some((a, f)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// `[μ]φ`
    pub fn as_box_send(&self) -> Option<(&Formula, &Formula)> {
        match self.kind() {
            FormulaKind::Not(inner) => match inner.kind() {
                FormulaKind::Send(m, f) => match f.kind() {
                    FormulaKind::Not(f) => Some((m, f)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// `[a]φ`
    pub fn as_box_recv(&self) -> Option<(&Agent, &Formula)> {
        match self.kind() {
            FormulaKind::Not(inner) => match inner.kind() {
                FormulaKind::Recv(a, f) => match f.kind() {
                    FormulaKind::Not(f) => Some((a, f)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// `⊥`
    pub fn is_bot(&self) -> bool {
        matches!(self.kind(), FormulaKind::Not(f) if f.is_top())
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self.kind() {
            FormulaKind::Atom(_) | FormulaKind::Top => vec![],
            FormulaKind::Not(f) | FormulaKind::HatK(_, f) | FormulaKind::Recv(_, f) => vec![f],
            FormulaKind::Or(f, g) | FormulaKind::Send(f, g) => vec![f, g],
        }
    }

    /// Every structural subformula, including `self`.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if out.insert(f.clone()) {
                stack.extend(f.children());
            }
        }
        out
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f.kind() {
                FormulaKind::Atom(p) => Some(p.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn agents(&self) -> BTreeSet<Agent> {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f.kind() {
                FormulaKind::HatK(a, _) | FormulaKind::Recv(a, _) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }

    /// Rebuilds the formula with every `¬¬ψ` collapsed to `ψ`, including
    /// inside announced formulas. `φ` and its normal form hold at exactly
    /// the same (state, word) pairs.
    pub fn double_negation_normal(&self) -> Formula {
        match self.kind() {
            FormulaKind::Atom(_) | FormulaKind::Top => self.clone(),
            FormulaKind::Not(inner) => match inner.kind() {
                FormulaKind::Not(g) => g.double_negation_normal(),
                _ => {
                    let n = inner.double_negation_normal();
                    // normalizing the inside can expose a fresh ¬¬
                    match n.kind() {
                        FormulaKind::Not(g) => g.clone(),
                        _ => Formula::not(n),
                    }
                }
            },
            FormulaKind::Or(f, g) => {
                Formula::or(f.double_negation_normal(), g.double_negation_normal())
            }
            FormulaKind::HatK(a, f) => Formula::hat_k(a.clone(), f.double_negation_normal()),
            FormulaKind::Send(m, f) => {
                Formula::send(m.double_negation_normal(), f.double_negation_normal())
            }
            FormulaKind::Recv(a, f) => Formula::recv(a.clone(), f.double_negation_normal()),
        }
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash && self.0.kind == other.0.kind)
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Formula {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.kind.cmp(&other.0.kind)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::print::write_formula(f, self)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
