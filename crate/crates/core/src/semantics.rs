//! Executability `s ⋈ α` and satisfaction `s, α ⊨ φ`, defined together by
//! induction on `≪`, plus the unguarded variants `⋈₋` and `⊨₋` that are
//! only defined on histories.
//!
//! An [`EvalContext`] interns formulas into a DAG of small ids and words
//! into a trie. Relations are computed for all states at once, as sets of
//! states, and memoized per word and formula. Every call made while
//! evaluating checks that its `(word, formula)` measure is strictly below
//! that of its caller; failures are counted, never expected.

use std::rc::Rc;
use std::sync::atomic::{AtomicU64, Ordering};

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::models::EpistemicModel;
use crate::syntax::{Agent, Formula, FormulaKind};
use crate::words::{views, Letter, Measure, Word};

static VIOLATIONS: AtomicU64 = AtomicU64::new(0);

/// Number of recursive calls, process wide, whose measure was not strictly
/// below their caller's.
pub fn termination_violations() -> u64 {
    VIOLATIONS.load(Ordering::Relaxed)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("state #{0} does not exist")]
    UnknownState(usize),
    #[error("agent `{0}` is not declared in the model")]
    UnknownAgent(String),
    #[error("atom `{0}` is not declared in the model")]
    UnknownAtom(String),
    #[error("`{0}` is not a history")]
    NotAHistory(String),
}

/// An interned word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WordId(u32);

impl WordId {
    pub const EMPTY: WordId = WordId(0);
}

/// An interned formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormulaId(u32);

#[derive(Clone, Copy)]
enum Shape {
    Atom(u32),
    Top,
    Not(FormulaId),
    Or(FormulaId, FormulaId),
    HatK(u32, FormulaId),
    Send(FormulaId, FormulaId),
    Recv(u32, FormulaId),
}

struct FNode {
    shape: Shape,
    deg: u64,
    size: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Step {
    Agent(u32),
    Formula(FormulaId),
}

struct Node {
    parent: WordId,
    step: Option<Step>,
    len: u32,
    announcements: u32,
    history: bool,
    size: u64,
    deg: u64,
    /// The word made of this word's formula letters only.
    ann_word: WordId,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalStats {
    pub sat_calls: u64,
    pub sat_hits: u64,
    pub exec_calls: u64,
    pub exec_hits: u64,
    pub violations: u64,
    pub max_measure: Option<Measure>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Diamond,
    Box,
}

/// `<α>φ` or `[α]φ`, with `<ε>φ = [ε]φ = φ`.
pub fn fold_word(alpha: &Word, phi: Formula, mode: Mode) -> Formula {
    match mode {
        Mode::Diamond => alpha.diamond(phi),
        Mode::Box => alpha.boxed(phi),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sem {
    Plus = 0,
    Minus = 1,
}

/// A set of states.
trait StateSet: Clone + PartialEq {
    fn none(n: usize) -> Self;
    fn all(n: usize) -> Self;
    fn insert(&mut self, s: usize);
    fn contains(&self, s: usize) -> bool;
    fn and(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn union_with(&mut self, other: &Self);
    fn is_empty(&self) -> bool;
    fn meets(&self, other: &Self) -> bool;
    fn first(&self) -> Option<usize>;
}

impl StateSet for u64 {
    fn none(_: usize) -> Self {
        0
    }
    fn all(n: usize) -> Self {
        if n >= 64 {
            !0
        } else {
            (1 << n) - 1
        }
    }
    fn insert(&mut self, s: usize) {
        *self |= 1 << s;
    }
    fn contains(&self, s: usize) -> bool {
        self >> s & 1 == 1
    }
    fn and(&self, other: &Self) -> Self {
        self & other
    }
    fn minus(&self, other: &Self) -> Self {
        self & !other
    }
    fn union_with(&mut self, other: &Self) {
        *self |= other;
    }
    fn is_empty(&self) -> bool {
        *self == 0
    }
    fn meets(&self, other: &Self) -> bool {
        self & other != 0
    }
    fn first(&self) -> Option<usize> {
        (*self != 0).then(|| self.trailing_zeros() as usize)
    }
}

impl StateSet for Vec<u64> {
    fn none(n: usize) -> Self {
        vec![0; n.div_ceil(64)]
    }
    fn all(n: usize) -> Self {
        let mut v = vec![!0; n.div_ceil(64)];
        if n % 64 != 0 {
            *v.last_mut().unwrap() = (1 << (n % 64)) - 1;
        }
        v
    }
    fn insert(&mut self, s: usize) {
        self[s / 64] |= 1 << (s % 64);
    }
    fn contains(&self, s: usize) -> bool {
        self[s / 64] >> (s % 64) & 1 == 1
    }
    fn and(&self, other: &Self) -> Self {
        self.iter().zip(other).map(|(a, b)| a & b).collect()
    }
    fn minus(&self, other: &Self) -> Self {
        self.iter().zip(other).map(|(a, b)| a & !b).collect()
    }
    fn union_with(&mut self, other: &Self) {
        for (a, b) in self.iter_mut().zip(other) {
            *a |= b;
        }
    }
    fn is_empty(&self) -> bool {
        self.iter().all(|&a| a == 0)
    }
    fn meets(&self, other: &Self) -> bool {
        self.iter().zip(other).any(|(a, b)| a & b != 0)
    }
    fn first(&self) -> Option<usize> {
        self.iter()
            .enumerate()
            .find(|(_, &a)| a != 0)
            .map(|(i, a)| i * 64 + a.trailing_zeros() as usize)
    }
}

/// Interned formulas and words, shared by both semantics.
struct Core {
    model: EpistemicModel,
    agents: Vec<Agent>,
    formulas: Vec<FNode>,
    terms: Vec<Formula>,
    formula_ids: FxHashMap<Formula, FormulaId>,
    nodes: Vec<Node>,
    /// Per word, the number of receptions of each agent.
    receptions: Vec<u32>,
    children: FxHashMap<(WordId, Step), WordId>,
    views_cache: FxHashMap<(WordId, u32), Rc<[WordId]>>,
    stats: EvalStats,
}

impl Core {
    fn clear(&mut self) {
        self.nodes.clear();
        self.nodes.push(Node {
            parent: WordId::EMPTY,
            step: None,
            len: 0,
            announcements: 0,
            history: true,
            size: 0,
            deg: 0,
            ann_word: WordId::EMPTY,
        });
        self.receptions = vec![0; self.agents.len()];
        self.children.clear();
        self.views_cache.clear();
        self.formulas.clear();
        self.terms.clear();
        self.formula_ids.clear();
    }

    fn agent(&self, a: &Agent) -> Result<u32, EvalError> {
        self.agents
            .iter()
            .position(|b| b == a)
            .map(|i| i as u32)
            .ok_or_else(|| EvalError::UnknownAgent(a.name().to_string()))
    }

    fn compile(&mut self, phi: &Formula) -> Result<FormulaId, EvalError> {
        if let Some(&id) = self.formula_ids.get(phi) {
            return Ok(id);
        }
        let shape = match phi.kind() {
            FormulaKind::Atom(p) => Shape::Atom(
                self.model
                    .signature()
                    .atoms()
                    .iter()
                    .position(|q| q == p)
                    .ok_or_else(|| EvalError::UnknownAtom(p.name().to_string()))?
                    as u32,
            ),
            FormulaKind::Top => Shape::Top,
            FormulaKind::Not(f) => Shape::Not(self.compile(f)?),
            FormulaKind::Or(f, g) => Shape::Or(self.compile(f)?, self.compile(g)?),
            FormulaKind::HatK(a, f) => Shape::HatK(self.agent(a)?, self.compile(f)?),
            FormulaKind::Send(m, f) => Shape::Send(self.compile(m)?, self.compile(f)?),
            FormulaKind::Recv(a, f) => Shape::Recv(self.agent(a)?, self.compile(f)?),
        };
        let id = FormulaId(self.formulas.len() as u32);
        self.formulas.push(FNode {
            shape,
            deg: phi.deg(),
            size: phi.size(),
        });
        self.terms.push(phi.clone());
        self.formula_ids.insert(phi.clone(), id);
        Ok(id)
    }

    fn intern(&mut self, alpha: &Word) -> Result<WordId, EvalError> {
        let mut w = WordId::EMPTY;
        for l in alpha.letters() {
            let step = match l {
                Letter::Agent(a) => Step::Agent(self.agent(a)?),
                Letter::Formula(f) => Step::Formula(self.compile(f)?),
            };
            w = self.child(w, step);
        }
        Ok(w)
    }

    fn child(&mut self, w: WordId, step: Step) -> WordId {
        if let Some(&c) = self.children.get(&(w, step)) {
            return c;
        }
        let parent_ann = self.nodes[w.0 as usize].ann_word;
        let ann_word = match step {
            Step::Agent(_) => Some(parent_ann),
            // a word of announcements only is its own projection
            Step::Formula(_) if parent_ann == w => None,
            Step::Formula(f) => Some(self.child(parent_ann, Step::Formula(f))),
        };
        let k = self.agents.len();
        let parent = &self.nodes[w.0 as usize];
        let base = w.0 as usize * k;
        let (announcements, history, size, deg) = match step {
            Step::Agent(i) => {
                let r = self.receptions[base + i as usize] + 1;
                (
                    parent.announcements,
                    parent.history && r <= parent.announcements,
                    parent.size + 1,
                    parent.deg,
                )
            }
            Step::Formula(f) => {
                let f = &self.formulas[f.0 as usize];
                (
                    parent.announcements + 1,
                    parent.history,
                    parent.size.saturating_add(f.size),
                    parent.deg + f.deg,
                )
            }
        };
        let len = parent.len + 1;
        let id = WordId(self.nodes.len() as u32);
        self.nodes.push(Node {
            parent: w,
            step: Some(step),
            len,
            announcements,
            history,
            size,
            deg,
            ann_word: ann_word.unwrap_or(id),
        });
        self.receptions.extend_from_within(base..base + k);
        if let Step::Agent(i) = step {
            self.receptions[id.0 as usize * k + i as usize] += 1;
        }
        self.children.insert((w, step), id);
        id
    }

    fn word(&self, w: WordId) -> Word {
        let mut letters = Vec::new();
        let mut cur = w;
        while cur != WordId::EMPTY {
            let n = &self.nodes[cur.0 as usize];
            letters.push(match n.step.expect("non-root") {
                Step::Agent(i) => Letter::Agent(self.agents[i as usize].clone()),
                Step::Formula(f) => Letter::Formula(self.terms[f.0 as usize].clone()),
            });
            cur = n.parent;
        }
        letters.reverse();
        Word::from_letters(letters)
    }

    #[inline]
    fn can_receive(&self, w: WordId, agent: usize) -> bool {
        self.receptions[w.0 as usize * self.agents.len() + agent]
            < self.nodes[w.0 as usize].announcements
    }

    #[inline]
    fn measure(&self, w: WordId, fdeg: u64, fsize: u64) -> Measure {
        let n = &self.nodes[w.0 as usize];
        Measure {
            deg: n.deg + fdeg,
            size: n.size.saturating_add(fsize),
        }
    }

    #[inline]
    fn note(&mut self, m: Measure, caller: Option<Measure>) {
        if let Some(c) = caller {
            if m >= c {
                self.stats.violations += 1;
                VIOLATIONS.fetch_add(1, Ordering::Relaxed);
            }
        }
        if self.stats.max_measure.map_or(true, |x| m > x) {
            self.stats.max_measure = Some(m);
        }
    }

    /// The announcements of `w` read by `agent`, as an interned word; it
    /// determines `view_agent(w)`.
    fn read_key(&self, w: WordId, agent: u32) -> WordId {
        let node = &self.nodes[w.0 as usize];
        let read = self.receptions[w.0 as usize * self.agents.len() + agent as usize]
            .min(node.announcements);
        let mut key = node.ann_word;
        while self.nodes[key.0 as usize].len > read {
            key = self.nodes[key.0 as usize].parent;
        }
        key
    }

    /// `view_agent(w)` as interned words, for the read word `key`.
    fn views_of(&mut self, key: WordId, agent: u32) -> Rc<[WordId]> {
        if let Some(v) = self.views_cache.get(&(key, agent)) {
            return v.clone();
        }
        // the read word holds announcements only, all of them read by `agent`
        let read_word = self.word(key);
        let read = read_word.len();
        let a = self.agents[agent as usize].clone();
        let full = read_word.concat(&Word::from_letters(vec![Letter::Agent(a.clone()); read]));
        let agents = self.agents.clone();
        let list: Vec<WordId> = views(&full, &a, agents.iter())
            .iter()
            .map(|beta| {
                self.intern(beta)
                    .expect("letters come from an interned word")
            })
            .collect();
        let list: Rc<[WordId]> = list.into();
        self.views_cache.insert((key, agent), list.clone());
        list
    }
}

/// Memoized results per word, as lists threaded through one arena; the
/// results at words with many of them are also indexed by a map.
struct Table<S> {
    /// Per word, one past the index of its latest entry, or 0.
    head: Vec<u32>,
    count: Vec<u32>,
    entries: Vec<(FormulaId, u32, S)>,
    many: FxHashMap<(WordId, FormulaId), u32>,
}

impl<S: Clone> Table<S> {
    const FEW: u32 = 12;

    fn new() -> Self {
        Table {
            head: Vec::new(),
            count: Vec::new(),
            entries: Vec::new(),
            many: FxHashMap::default(),
        }
    }

    #[inline]
    fn get(&self, w: WordId, f: FormulaId) -> Option<&S> {
        let i = w.0 as usize;
        let count = *self.count.get(i)?;
        if count > Self::FEW {
            return self.many.get(&(w, f)).map(|&e| &self.entries[e as usize].2);
        }
        let mut e = self.head[i];
        while e != 0 {
            let (g, next, x) = &self.entries[e as usize - 1];
            if *g == f {
                return Some(x);
            }
            e = *next;
        }
        None
    }

    fn insert(&mut self, w: WordId, f: FormulaId, x: S, words: usize) {
        let i = w.0 as usize;
        if self.head.len() <= i {
            self.head.resize(words, 0);
            self.count.resize(words, 0);
        }
        let e = self.entries.len() as u32;
        self.entries.push((f, self.head[i], x));
        self.head[i] = e + 1;
        self.count[i] += 1;
        if self.count[i] == Self::FEW + 1 {
            let mut e = self.head[i];
            while e != 0 {
                let (g, next, _) = self.entries[e as usize - 1];
                self.many.insert((w, g), e - 1);
                e = next;
            }
        } else if self.count[i] > Self::FEW {
            self.many.insert((w, f), e);
        }
    }
}

/// Memo tables for one representation of state sets.
struct Memo<S> {
    n: usize,
    valuation: Vec<S>,
    /// Per agent, its equivalence classes.
    classes: Vec<Vec<S>>,
    /// Per semantics, indexed by word.
    exec: [Vec<Option<S>>; 2],
    sat: [Table<S>; 2],
    /// Per semantics, read word, agent and formula `g`: the states `t` with
    /// `t, β ⊨ g` for some view `β`.
    seen: FxHashMap<(u8, WordId, u32, FormulaId), S>,
}

impl<S: StateSet> Memo<S> {
    fn new(model: &EpistemicModel) -> Self {
        let n = model.num_states();
        let sig = model.signature();
        let set_of = |states: &mut dyn Iterator<Item = usize>| {
            let mut x = S::none(n);
            for s in states {
                x.insert(s);
            }
            x
        };
        let valuation = sig
            .atoms()
            .iter()
            .map(|p| set_of(&mut (0..n).filter(|&s| model.holds(p, s).unwrap_or(false))))
            .collect();
        let classes = sig
            .agents()
            .iter()
            .map(|a| {
                let cells = model.partition(a).expect("agent of the model");
                cells
                    .iter()
                    .map(|c| set_of(&mut c.iter().copied()))
                    .collect()
            })
            .collect();
        Memo {
            n,
            valuation,
            classes,
            exec: [Vec::new(), Vec::new()],
            sat: [Table::new(), Table::new()],
            seen: FxHashMap::default(),
        }
    }

    /// Executability of `w` evaluated in the frame `(w, f)`, where `f` has
    /// degree `fdeg` and size `fsize`. The frame is checked against
    /// `caller` when there is one.
    fn exec(
        &mut self,
        core: &mut Core,
        sem: Sem,
        w: WordId,
        fdeg: u64,
        fsize: u64,
        caller: Option<Measure>,
    ) -> S {
        let m = core.measure(w, fdeg, fsize);
        core.note(m, caller);
        core.stats.exec_calls += 1;
        if w == WordId::EMPTY {
            return S::all(self.n);
        }
        let k = sem as usize;
        let i = w.0 as usize;
        if let Some(Some(v)) = self.exec[k].get(i) {
            core.stats.exec_hits += 1;
            return v.clone();
        }
        let node = &core.nodes[i];
        let parent = node.parent;
        let v = if !node.history {
            S::none(self.n)
        } else {
            match node.step.expect("non-root") {
                // on a history the reception is always enabled
                Step::Agent(_) => self.exec(core, sem, parent, fdeg, fsize, Some(m)),
                Step::Formula(psi) => {
                    let e = self.exec(core, sem, parent, fdeg, fsize, Some(m));
                    if e.is_empty() {
                        e
                    } else {
                        e.and(&self.sat(core, sem, parent, psi, Some(m)))
                    }
                }
            }
        };
        if self.exec[k].len() <= i {
            self.exec[k].resize(core.nodes.len(), None);
        }
        self.exec[k][i] = Some(v.clone());
        v
    }

    /// `α·ψ` when `t, α ⊨ ψ` for some `t`. Under `⊨` that set is exactly
    /// the states executing `α·ψ`, so it is stored for the child.
    fn extend_if_sat(&mut self, core: &mut Core, w: WordId, psi: FormulaId) -> Option<WordId> {
        let v = self.sat(core, Sem::Plus, w, psi, None);
        if v.is_empty() {
            return None;
        }
        let c = core.child(w, Step::Formula(psi));
        let i = c.0 as usize;
        let k = Sem::Plus as usize;
        if self.exec[k].len() <= i {
            self.exec[k].resize(core.nodes.len(), None);
        }
        if self.exec[k][i].is_none() && core.nodes[i].history {
            self.exec[k][i] = Some(v);
        }
        Some(c)
    }

    fn sat(
        &mut self,
        core: &mut Core,
        sem: Sem,
        w: WordId,
        f: FormulaId,
        caller: Option<Measure>,
    ) -> S {
        let (fdeg, fsize) = {
            let n = &core.formulas[f.0 as usize];
            (n.deg, n.size)
        };
        let m = core.measure(w, fdeg, fsize);
        core.note(m, caller);
        core.stats.sat_calls += 1;
        let k = sem as usize;
        if Self::boolean(core, f) {
            return match sem {
                Sem::Plus => {
                    let e = self.exec(core, sem, w, fdeg, fsize, None);
                    if e.is_empty() {
                        e
                    } else {
                        self.clause(core, sem, w, f, m, e)
                    }
                }
                Sem::Minus => self.clause(core, sem, w, f, m, S::all(self.n)),
            };
        }
        if let Some(v) = self.sat[k].get(w, f) {
            core.stats.sat_hits += 1;
            return v.clone();
        }
        let v = match sem {
            // every clause of ⊨ requires s ⋈ α, directly or through a
            // subformula, so it is checked once up front
            Sem::Plus => {
                let e = self.exec(core, sem, w, fdeg, fsize, None);
                if e.is_empty() {
                    e
                } else {
                    self.clause(core, sem, w, f, m, e)
                }
            }
            Sem::Minus => self.clause(core, sem, w, f, m, S::all(self.n)),
        };
        self.sat[k].insert(w, f, v.clone(), core.nodes.len());
        v
    }

    /// Boolean structure is cheaper to recompute than to memoize.
    #[inline]
    fn boolean(core: &Core, f: FormulaId) -> bool {
        matches!(
            core.formulas[f.0 as usize].shape,
            Shape::Atom(_) | Shape::Top | Shape::Not(_) | Shape::Or(..)
        )
    }

    /// `sat` for an immediate subformula at the same word, where `within`
    /// is already known to be the guard.
    fn sub(
        &mut self,
        core: &mut Core,
        sem: Sem,
        w: WordId,
        g: FormulaId,
        caller: Option<Measure>,
        within: &S,
    ) -> S {
        if !Self::boolean(core, g) {
            return self.sat(core, sem, w, g, caller);
        }
        let n = &core.formulas[g.0 as usize];
        let m = core.measure(w, n.deg, n.size);
        core.note(m, caller);
        core.stats.sat_calls += 1;
        self.clause(core, sem, w, g, m, within.clone())
    }

    /// The clause for `f` at `w`, restricted to `within`.
    fn clause(
        &mut self,
        core: &mut Core,
        sem: Sem,
        w: WordId,
        f: FormulaId,
        m: Measure,
        within: S,
    ) -> S {
        let m = Some(m);
        match core.formulas[f.0 as usize].shape {
            Shape::Atom(p) => self.valuation[p as usize].and(&within),
            Shape::Top => within,
            Shape::Not(g) => match core.formulas[g.0 as usize].shape {
                // results never leave `within`, so `~~h` is `h`
                Shape::Not(h) => self.sub(core, sem, w, h, m, &within),
                _ => within.minus(&self.sub(core, sem, w, g, m, &within)),
            },
            Shape::Or(g, h) => {
                let mut x = self.sub(core, sem, w, g, m, &within);
                if x != within {
                    x.union_with(&self.sub(core, sem, w, h, m, &within));
                }
                x
            }
            Shape::HatK(a, g) => {
                let key = core.read_key(w, a);
                let seen = match self.seen.get(&(sem as u8, key, a, g)) {
                    Some(x) => x.clone(),
                    None => {
                        let (gdeg, gsize) = {
                            let n = &core.formulas[g.0 as usize];
                            (n.deg, n.size)
                        };
                        let all = S::all(self.n);
                        let mut x = S::none(self.n);
                        for &beta in core.views_of(key, a).iter() {
                            let e = self.exec(core, sem, beta, gdeg, gsize, m);
                            if !e.is_empty() {
                                x.union_with(&e.and(&self.sat(core, sem, beta, g, m)));
                                if x == all {
                                    break;
                                }
                            }
                        }
                        self.seen.insert((sem as u8, key, a, g), x.clone());
                        x
                    }
                };
                let mut out = S::none(self.n);
                for c in &self.classes[a as usize] {
                    if c.meets(&seen) {
                        out.union_with(c);
                    }
                }
                out.and(&within)
            }
            Shape::Recv(a, g) => {
                if !core.can_receive(w, a as usize) {
                    return S::none(self.n);
                }
                let next = core.child(w, Step::Agent(a));
                self.sat(core, sem, next, g, m).and(&within)
            }
            Shape::Send(psi, g) => {
                let x = self.sat(core, sem, w, psi, m);
                if x.is_empty() {
                    return x;
                }
                let next = core.child(w, Step::Formula(psi));
                x.and(&self.sat(core, sem, next, g, m)).and(&within)
            }
        }
    }
}

enum Memos {
    Small(Memo<u64>),
    Large(Memo<Vec<u64>>),
}

impl Memos {
    fn new(model: &EpistemicModel) -> Self {
        if model.num_states() <= 64 {
            Memos::Small(Memo::new(model))
        } else {
            Memos::Large(Memo::new(model))
        }
    }
}

/// Runs `$body` with `$m` bound to the memo tables and `$core` to the
/// interning tables.
macro_rules! with_memo {
    ($self:ident, $m:ident, $core:ident => $body:expr) => {{
        let $core = &mut $self.core;
        match &mut $self.memo {
            Memos::Small($m) => $body,
            Memos::Large($m) => $body,
        }
    }};
}

/// A model together with interning and memo tables for evaluating on it.
pub struct EvalContext {
    core: Core,
    memo: Memos,
}

impl EvalContext {
    pub fn new(model: EpistemicModel) -> Self {
        let agents: Vec<Agent> = model.signature().agents().iter().cloned().collect();
        let memo = Memos::new(&model);
        let mut core = Core {
            model,
            agents,
            formulas: Vec::new(),
            terms: Vec::new(),
            formula_ids: FxHashMap::default(),
            nodes: Vec::new(),
            receptions: Vec::new(),
            children: FxHashMap::default(),
            views_cache: FxHashMap::default(),
            stats: EvalStats::default(),
        };
        core.clear();
        EvalContext { core, memo }
    }

    pub fn model(&self) -> &EpistemicModel {
        &self.core.model
    }

    pub fn stats(&self) -> EvalStats {
        self.core.stats
    }

    /// Drops memoized results and interned words and formulas.
    pub fn clear(&mut self) {
        self.core.clear();
        self.memo = Memos::new(&self.core.model);
    }

    // ---- checked public entry points ----

    /// `s ⋈ α`
    pub fn executable(&mut self, s: usize, alpha: &Word) -> Result<bool, EvalError> {
        self.check_state(s)?;
        let w = self.intern(alpha)?;
        Ok(self.exec_id(s, w))
    }

    /// `s, α ⊨ φ`
    pub fn eval(&mut self, s: usize, alpha: &Word, phi: &Formula) -> Result<bool, EvalError> {
        self.check_state(s)?;
        let f = self.compile(phi)?;
        let w = self.intern(alpha)?;
        Ok(self.sat(s, w, f))
    }

    /// `s ⋈₋ α`
    pub fn executable_minus(&mut self, s: usize, alpha: &Word) -> Result<bool, EvalError> {
        self.check_state(s)?;
        let w = self.intern(alpha)?;
        if !self.is_history(w) {
            return Err(EvalError::NotAHistory(alpha.to_string()));
        }
        Ok(self.exec_minus_id(s, w))
    }

    /// `s, α ⊨₋ φ`
    pub fn eval_minus(&mut self, s: usize, alpha: &Word, phi: &Formula) -> Result<bool, EvalError> {
        self.check_state(s)?;
        let f = self.compile(phi)?;
        let w = self.intern(alpha)?;
        if !self.is_history(w) {
            return Err(EvalError::NotAHistory(alpha.to_string()));
        }
        Ok(self.sat_minus(s, w, f))
    }

    fn check_state(&self, s: usize) -> Result<(), EvalError> {
        if s < self.core.model.num_states() {
            Ok(())
        } else {
            Err(EvalError::UnknownState(s))
        }
    }

    // ---- interning ----

    /// Interns `φ`, failing on undeclared atoms or agents.
    pub fn compile(&mut self, phi: &Formula) -> Result<FormulaId, EvalError> {
        self.core.compile(phi)
    }

    /// The formula behind an id.
    pub fn formula(&self, f: FormulaId) -> &Formula {
        &self.core.terms[f.0 as usize]
    }

    pub fn intern(&mut self, alpha: &Word) -> Result<WordId, EvalError> {
        self.core.intern(alpha)
    }

    /// `α·l`
    pub fn extend(&mut self, w: WordId, l: &Letter) -> Result<WordId, EvalError> {
        let step = match l {
            Letter::Agent(a) => Step::Agent(self.core.agent(a)?),
            Letter::Formula(f) => Step::Formula(self.core.compile(f)?),
        };
        Ok(self.core.child(w, step))
    }

    /// `α·a` for the agent at position `agent` in the signature.
    pub fn extend_agent(&mut self, w: WordId, agent: usize) -> WordId {
        self.core.child(w, Step::Agent(agent as u32))
    }

    /// `α·ψ`
    pub fn extend_formula(&mut self, w: WordId, psi: FormulaId) -> WordId {
        self.core.child(w, Step::Formula(psi))
    }

    /// The interned word as letters.
    pub fn word(&self, w: WordId) -> Word {
        self.core.word(w)
    }

    pub fn is_history(&self, w: WordId) -> bool {
        self.core.nodes[w.0 as usize].history
    }

    pub fn word_len(&self, w: WordId) -> usize {
        self.core.nodes[w.0 as usize].len as usize
    }

    /// `|α|_a < |α|_!` for the agent at position `agent`.
    pub fn can_receive(&self, w: WordId, agent: usize) -> bool {
        self.core.can_receive(w, agent)
    }

    pub fn agents(&self) -> &[Agent] {
        &self.core.agents
    }

    // ---- the relations on interned words and formulas ----

    /// `s ⋈ α`; `s` must be a state.
    pub fn exec_id(&mut self, s: usize, w: WordId) -> bool {
        with_memo!(self, m, core => m.exec(core, Sem::Plus, w, 0, 1, None).contains(s))
    }

    /// `s, α ⊨ φ`; `s` must be a state.
    pub fn sat(&mut self, s: usize, w: WordId, f: FormulaId) -> bool {
        with_memo!(self, m, core => m.sat(core, Sem::Plus, w, f, None).contains(s))
    }

    /// `s, α ⊨ φ` for a formula not yet interned; `φ` must be over the
    /// model's signature.
    pub fn sat_id(&mut self, s: usize, w: WordId, phi: &Formula) -> bool {
        let f = self.compile(phi).expect("formula over the model signature");
        self.sat(s, w, f)
    }

    /// `s ⋈₋ α` on an interned history.
    pub fn exec_minus_id(&mut self, s: usize, w: WordId) -> bool {
        with_memo!(self, m, core => m.exec(core, Sem::Minus, w, 0, 1, None).contains(s))
    }

    /// `s, α ⊨₋ φ` on an interned history.
    pub fn sat_minus(&mut self, s: usize, w: WordId, f: FormulaId) -> bool {
        with_memo!(self, m, core => m.sat(core, Sem::Minus, w, f, None).contains(s))
    }

    /// Whether `t, α ⊨ φ` for some state `t`.
    pub fn sat_somewhere(&mut self, w: WordId, f: FormulaId) -> bool {
        with_memo!(self, m, core => !m.sat(core, Sem::Plus, w, f, None).is_empty())
    }

    /// `α·ψ` if `t, α ⊨ ψ` for some state `t`.
    pub fn extend_if_sat(&mut self, w: WordId, psi: FormulaId) -> Option<WordId> {
        with_memo!(self, m, core => m.extend_if_sat(core, w, psi))
    }

    /// The least state `t` with `t ⋈ α` and `t, α ⊭ φ`.
    pub fn first_failing_state(&mut self, w: WordId, f: FormulaId) -> Option<usize> {
        with_memo!(self, m, core => {
            let e = m.exec(core, Sem::Plus, w, 0, 1, None);
            e.minus(&m.sat(core, Sem::Plus, w, f, None)).first()
        })
    }

    /// States `s` with `s ⋈ α`, in order.
    pub fn surviving_states(&mut self, alpha: &Word) -> Result<Vec<usize>, EvalError> {
        let w = self.intern(alpha)?;
        Ok((0..self.core.model.num_states())
            .filter(|&s| self.exec_id(s, w))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{load_model, random_model};
    use crate::syntax::{parse_formula, parse_word, Atom, Signature};

    const FIGURE: &str = include_str!("../fixtures/figure1.toml");

    fn figure() -> EvalContext {
        EvalContext::new(load_model(FIGURE).unwrap())
    }

    #[test]
    fn figure_executability() {
        let mut ctx = figure();
        let sig = ctx.model().signature().clone();
        let npnq = ctx.model().state_index("npnq").unwrap();
        let w = parse_word("(p|q)", &sig).unwrap();
        assert!(!ctx.executable(npnq, &w).unwrap());
        assert!(ctx.executable(npnq, &Word::empty()).unwrap());
        let pq = ctx.model().state_index("pq").unwrap();
        let w = parse_word("(p|q).a", &sig).unwrap();
        let f = parse_formula("K a (p|q)", &sig).unwrap();
        assert!(ctx.eval(pq, &w, &f).unwrap());
        assert!(ctx
            .eval(pq, &w, &parse_formula("K a p", &sig).unwrap())
            .unwrap());
        assert!(!ctx
            .eval(pq, &w, &parse_formula("K a q", &sig).unwrap())
            .unwrap());
    }

    #[test]
    fn unguarded_negation() {
        let mut ctx = figure();
        let sig = ctx.model().signature().clone();
        let npnq = ctx.model().state_index("npnq").unwrap();
        let w = parse_word("(p|q)", &sig).unwrap();
        let notbot = parse_formula("~F", &sig).unwrap();
        assert!(!ctx.eval(npnq, &w, &notbot).unwrap());
        assert!(!ctx.eval(npnq, &w, &Formula::bot()).unwrap());
        assert!(ctx.eval_minus(npnq, &w, &notbot).unwrap());
        assert!(!ctx.executable_minus(npnq, &w).unwrap());
        let pq = ctx.model().state_index("pq").unwrap();
        assert!(ctx
            .executable_minus(pq, &parse_word("p.a", &sig).unwrap())
            .unwrap());
    }

    #[test]
    fn errors() {
        let mut ctx = figure();
        let sig = ctx.model().signature().clone();
        assert_eq!(
            ctx.executable(9, &Word::empty()),
            Err(EvalError::UnknownState(9))
        );
        let bad = parse_word("p.a.a", &sig).unwrap();
        assert!(matches!(
            ctx.eval_minus(0, &bad, &Formula::top()),
            Err(EvalError::NotAHistory(_))
        ));
        assert!(!ctx.eval(0, &bad, &Formula::top()).unwrap());
        let r = Formula::atom(Atom::new("r"));
        assert_eq!(
            ctx.eval(0, &Word::empty(), &r),
            Err(EvalError::UnknownAtom("r".into()))
        );
        let c = Formula::hat_k(Agent::new("c"), Formula::top());
        assert_eq!(
            ctx.eval(0, &Word::empty(), &c),
            Err(EvalError::UnknownAgent("c".into()))
        );
    }

    #[test]
    fn inconsistent_history() {
        let sig = Signature::from_names(&["a", "b"], &["p"]).unwrap();
        let m = random_model(3, &sig, 5);
        let mut ctx = EvalContext::new(m);
        let w = parse_word("p.b.(~K b p)", &sig).unwrap();
        for s in 0..3 {
            assert!(!ctx.executable(s, &w).unwrap());
        }
    }

    #[test]
    fn folding() {
        let sig = Signature::from_names(&["a"], &["p", "q"]).unwrap();
        let p = parse_formula("p", &sig).unwrap();
        assert_eq!(fold_word(&Word::empty(), p.clone(), Mode::Diamond), p);
        assert_eq!(
            fold_word(
                &parse_word("p.a", &sig).unwrap(),
                parse_formula("q", &sig).unwrap(),
                Mode::Diamond
            ),
            parse_formula("<p><a>q", &sig).unwrap()
        );
        assert_eq!(
            fold_word(&parse_word("T", &sig).unwrap(), Formula::bot(), Mode::Box),
            parse_formula("~<T>~F", &sig).unwrap()
        );
    }

    #[test]
    fn interned_words_round_trip() {
        let mut ctx = figure();
        let sig = ctx.model().signature().clone();
        for text in ["eps", "p.a", "(p|q).b.a.(K a p).a", "a.a.p"] {
            let w = parse_word(text, &sig).unwrap();
            let id = ctx.intern(&w).unwrap();
            assert_eq!(ctx.word(id), w);
            assert_eq!(ctx.is_history(id), w.is_history());
            assert_eq!(ctx.intern(&w).unwrap(), id);
        }
    }
}
