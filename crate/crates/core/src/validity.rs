//! ε-validity, bounded ∗-validity, the `empty` formula and the axiom
//! schemas of AA*.
//!
//! ∗-validity quantifies over every word, so [`check_star`] only searches
//! histories up to a length bound over a finite announcement vocabulary. A
//! counterexample is definitive; `ValidUpToBound` is evidence only.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::models::{random_model_with, EpistemicModel, ModelDocument};
use crate::semantics::{EvalContext, FormulaId, WordId};
use crate::syntax::{Agent, Atom, Formula, Signature};
use crate::words::{views, Letter, Word};

/// Raised alongside `empty` when there are fewer than two agents: the
/// formula then no longer characterizes the empty history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingleAgentWarning;

impl fmt::Display for SingleAgentWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("with fewer than two agents `empty` holds after some non-empty histories too")
    }
}

/// `⋀_a [a]⊥ ∧ ⋀_{a,b} K_a [b]⊥`, conjoined left to right with the
/// reception conjuncts first and the pairs in lexicographic order.
pub fn empty_formula(sig: &Signature) -> (Formula, Option<SingleAgentWarning>) {
    let agents: Vec<&Agent> = sig.agents().iter().collect();
    let mut parts: Vec<Formula> = agents
        .iter()
        .map(|a| Formula::box_recv((*a).clone(), Formula::bot()))
        .collect();
    for a in &agents {
        for b in &agents {
            parts.push(Formula::k(
                (*a).clone(),
                Formula::box_recv((*b).clone(), Formula::bot()),
            ));
        }
    }
    let warning = (agents.len() < 2).then_some(SingleAgentWarning);
    (Formula::and_all(parts), warning)
}

/// Every history of length at most `max_len` whose formula letters are
/// drawn from `vocab`, ordered by length and then lexicographically.
pub fn enumerate_histories<'a>(
    vocab: impl IntoIterator<Item = &'a Formula>,
    agents: impl IntoIterator<Item = &'a Agent>,
    max_len: usize,
) -> Vec<Word> {
    let letters = alphabet(vocab, agents);
    let mut out = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for l in &letters {
                let ext = w.with(l.clone());
                let ok = match l {
                    Letter::Agent(a) => ext.receptions(a) <= ext.announcements(),
                    Letter::Formula(_) => true,
                };
                if ok {
                    next.push(ext);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn alphabet<'a>(
    vocab: impl IntoIterator<Item = &'a Formula>,
    agents: impl IntoIterator<Item = &'a Agent>,
) -> Vec<Letter> {
    let mut letters: BTreeSet<Letter> = agents.into_iter().cloned().map(Letter::Agent).collect();
    letters.extend(vocab.into_iter().cloned().map(Letter::Formula));
    letters.into_iter().collect()
}

/// Subformulas of `φ` together with `⊤`.
pub fn default_vocabulary(phi: &Formula) -> Vec<Formula> {
    let mut v = phi.subformulas();
    v.insert(Formula::top());
    v.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidityMode {
    Epsilon,
    Star,
}

#[derive(Debug, Clone)]
pub enum ModelFamily {
    Explicit(Vec<EpistemicModel>),
    /// `count` models over the query signature, each with between one and
    /// `max_states` states, all drawn from one seeded stream.
    Random {
        count: usize,
        max_states: usize,
        seed: u64,
    },
}

impl ModelFamily {
    pub fn materialize(&self, sig: &Signature) -> Vec<EpistemicModel> {
        match self {
            ModelFamily::Explicit(ms) => ms.clone(),
            ModelFamily::Random {
                count,
                max_states,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..*count)
                    .map(|_| {
                        let n = rng.gen_range(1..=(*max_states).max(1));
                        random_model_with(n, sig, &mut rng)
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValidityQuery {
    pub formula: Formula,
    pub signature: Signature,
    pub models: ModelFamily,
    /// Candidate announcements; `None` means [`default_vocabulary`].
    pub vocabulary: Option<Vec<Formula>>,
    pub max_len: usize,
    pub mode: ValidityMode,
}

impl ValidityQuery {
    pub fn new(
        formula: Formula,
        signature: Signature,
        models: ModelFamily,
        mode: ValidityMode,
    ) -> Self {
        ValidityQuery {
            formula,
            signature,
            models,
            vocabulary: None,
            max_len: 3,
            mode,
        }
    }

    pub fn with_bound(mut self, max_len: usize) -> Self {
        self.max_len = max_len;
        self
    }

    pub fn with_vocabulary(mut self, vocab: Vec<Formula>) -> Self {
        self.vocabulary = Some(vocab);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    ValidUpToBound,
    Counterexample {
        model_index: usize,
        model: EpistemicModel,
        state: usize,
        word: Word,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityReport {
    pub mode: ValidityMode,
    pub verdict: Verdict,
    pub checked_models: usize,
    pub checked_histories: u64,
    pub bound_used: usize,
    pub vocabulary: Vec<Formula>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::ValidUpToBound
    }

    pub fn witness(&self) -> Option<&Word> {
        match &self.verdict {
            Verdict::Counterexample { word, .. } => Some(word),
            Verdict::ValidUpToBound => None,
        }
    }
}

/// Versioned structured form of a report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub format: u32,
    pub formula: String,
    pub mode: ValidityMode,
    pub verdict: &'static str,
    pub checked_models: usize,
    pub checked_histories: u64,
    pub bound: usize,
    pub vocabulary: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleDocument>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleDocument {
    pub model_index: usize,
    pub state: String,
    pub word: String,
    pub model: ModelDocument,
    pub replay: String,
}

impl ValidityReport {
    /// `model_path` is used in the replay command line; pass a placeholder
    /// when the model only exists in memory.
    pub fn to_document(&self, formula: &Formula, model_path: &str) -> ReportDocument {
        let counterexample = match &self.verdict {
            Verdict::ValidUpToBound => None,
            Verdict::Counterexample {
                model_index,
                model,
                state,
                word,
            } => Some(CounterexampleDocument {
                model_index: *model_index,
                state: model.state_name(*state).to_string(),
                word: word.to_string(),
                model: model.to_document(),
                replay: format!(
                    "aalogic eval --model {} --state {} --word '{}' '{}'",
                    model_path,
                    model.state_name(*state),
                    word,
                    formula
                ),
            }),
        };
        ReportDocument {
            format: 1,
            formula: formula.to_string(),
            mode: self.mode,
            verdict: if self.is_valid() {
                "valid-up-to-bound"
            } else {
                "counterexample"
            },
            checked_models: self.checked_models,
            checked_histories: self.checked_histories,
            bound: self.bound_used,
            vocabulary: self.vocabulary.iter().map(|f| f.to_string()).collect(),
            counterexample,
        }
    }
}

/// Runs the query in its own mode.
pub fn check(q: &ValidityQuery) -> ValidityReport {
    match q.mode {
        ValidityMode::Epsilon => check_epsilon(q),
        ValidityMode::Star => check_star(q),
    }
}

/// `s, ε ⊨ φ` at every state of every model in the family.
pub fn check_epsilon(q: &ValidityQuery) -> ValidityReport {
    let models = q.models.materialize(&q.signature);
    let mut checked = 0u64;
    // isomorphic models agree on every formula
    let mut done = HashSet::new();
    for (i, m) in models.iter().enumerate() {
        if let Some(key) = m.shape_key() {
            if !done.insert(key) {
                continue;
            }
        }
        let mut ctx = EvalContext::new(m.clone());
        for s in 0..m.num_states() {
            checked += 1;
            if !ctx.sat_id(s, WordId::EMPTY, &q.formula) {
                return ValidityReport {
                    mode: ValidityMode::Epsilon,
                    verdict: Verdict::Counterexample {
                        model_index: i,
                        model: m.clone(),
                        state: s,
                        word: Word::empty(),
                    },
                    checked_models: i + 1,
                    checked_histories: checked,
                    bound_used: 0,
                    vocabulary: vec![],
                };
            }
        }
    }
    ValidityReport {
        mode: ValidityMode::Epsilon,
        verdict: Verdict::ValidUpToBound,
        checked_models: models.len(),
        checked_histories: checked,
        bound_used: 0,
        vocabulary: vec![],
    }
}

/// `s, α ⊨ φ` for every state and every history `α` executable at it, up
/// to the bound. Histories executable nowhere are pruned.
pub fn check_star(q: &ValidityQuery) -> ValidityReport {
    let models = q.models.materialize(&q.signature);
    let vocab: Vec<Formula> = {
        let v: BTreeSet<Formula> = q
            .vocabulary
            .clone()
            .unwrap_or_else(|| default_vocabulary(&q.formula))
            .into_iter()
            .collect();
        v.into_iter().collect()
    };
    let mut checked = 0u64;
    // isomorphic models agree on every formula
    let mut done = HashSet::new();
    for (i, m) in models.iter().enumerate() {
        if let Some(key) = m.shape_key() {
            if !done.insert(key) {
                continue;
            }
        }
        let mut ctx = EvalContext::new(m.clone());
        if let Some((s, w)) = first_failure(&mut ctx, &q.formula, &vocab, q.max_len, &mut checked) {
            return ValidityReport {
                mode: ValidityMode::Star,
                verdict: Verdict::Counterexample {
                    model_index: i,
                    model: m.clone(),
                    state: s,
                    word: w,
                },
                checked_models: i + 1,
                checked_histories: checked,
                bound_used: q.max_len,
                vocabulary: vocab,
            };
        }
    }
    ValidityReport {
        mode: ValidityMode::Star,
        verdict: Verdict::ValidUpToBound,
        checked_models: models.len(),
        checked_histories: checked,
        bound_used: q.max_len,
        vocabulary: vocab,
    }
}

/// The first history, in canonical order, executable at some state where
/// `φ` fails, with the least such state. `vocab` must be sorted.
pub fn first_failure(
    ctx: &mut EvalContext,
    phi: &Formula,
    vocab: &[Formula],
    max_len: usize,
    checked: &mut u64,
) -> Option<(usize, Word)> {
    let n_agents = ctx.agents().len();
    let phi = ctx.compile(phi).expect("formula over the model signature");
    let vocab: Vec<FormulaId> = vocab
        .iter()
        .map(|f| ctx.compile(f).expect("vocabulary over the model signature"))
        .collect();
    let mut frontier = vec![WordId::EMPTY];
    for depth in 0..=max_len {
        for &w in &frontier {
            *checked += 1;
            if let Some(s) = ctx.first_failing_state(w, phi) {
                return Some((s, ctx.word(w)));
            }
        }
        if depth == max_len {
            break;
        }
        let mut next = Vec::new();
        for &w in &frontier {
            // agent letters sort before formula letters
            for i in 0..n_agents {
                if ctx.can_receive(w, i) {
                    next.push(ctx.extend_agent(w, i));
                }
            }
            for &psi in &vocab {
                if let Some(c) = ctx.extend_if_sat(w, psi) {
                    next.push(c);
                }
            }
        }
        frontier = next;
    }
    None
}

// ---- axiom schemas ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum AxiomSchema {
    Dist,
    DistBang,
    EmptyK,
    EmptyT,
    Four,
    Five,
    Exec1,
    Exec2,
    Exec3,
    Func,
    Perm,
    EmptyBang,
}

impl AxiomSchema {
    pub const ALL: [AxiomSchema; 12] = [
        AxiomSchema::Dist,
        AxiomSchema::DistBang,
        AxiomSchema::EmptyK,
        AxiomSchema::EmptyT,
        AxiomSchema::Four,
        AxiomSchema::Five,
        AxiomSchema::Exec1,
        AxiomSchema::Exec2,
        AxiomSchema::Exec3,
        AxiomSchema::Func,
        AxiomSchema::Perm,
        AxiomSchema::EmptyBang,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomSchema::Dist => "Dist",
            AxiomSchema::DistBang => "Dist!",
            AxiomSchema::EmptyK => "emptyK",
            AxiomSchema::EmptyT => "emptyT",
            AxiomSchema::Four => "4",
            AxiomSchema::Five => "5",
            AxiomSchema::Exec1 => "Exec!1",
            AxiomSchema::Exec2 => "Exec!2",
            AxiomSchema::Exec3 => "Exec!3",
            AxiomSchema::Func => "Func!",
            AxiomSchema::Perm => "Perm!",
            AxiomSchema::EmptyBang => "empty!",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    /// The schema text with metavariables `phi`, `psi`, `alpha`, `a`, `p`.
    pub fn shape(self) -> &'static str {
        match self {
            AxiomSchema::Dist => "K a (phi -> psi) -> (K a phi -> K a psi)",
            AxiomSchema::DistBang => "[alpha](phi -> psi) -> ([alpha]phi -> [alpha]psi)",
            AxiomSchema::EmptyK => "empty -> K a empty",
            AxiomSchema::EmptyT => "empty -> (K a phi -> phi)",
            AxiomSchema::Four => "K a phi -> K a K a phi",
            AxiomSchema::Five => "Khat a phi -> K a Khat a phi",
            AxiomSchema::Exec1 => "<phi>T <-> phi",
            AxiomSchema::Exec2 => "[alpha]<a>T   if |alpha|_a < |alpha|_!",
            AxiomSchema::Exec3 => "empty -> [alpha][a]F   if |alpha|_a >= |alpha|_!",
            AxiomSchema::Func => "<alpha>phi -> [alpha]phi",
            AxiomSchema::Perm => "(p -> [alpha]p) & (~p -> [alpha]~p)",
            AxiomSchema::EmptyBang => {
                "empty -> ([alpha]K a phi <-> ([alpha]F | AND_{alpha |>_a beta} K a [beta]phi))"
            }
        }
    }

    /// Which metavariables the schema uses: (phi, psi, alpha, agent, atom).
    pub fn metavariables(self) -> (bool, bool, bool, bool, bool) {
        match self {
            AxiomSchema::Dist => (true, true, false, true, false),
            AxiomSchema::DistBang => (true, true, true, false, false),
            AxiomSchema::EmptyK => (false, false, false, true, false),
            AxiomSchema::EmptyT | AxiomSchema::Four | AxiomSchema::Five => {
                (true, false, false, true, false)
            }
            AxiomSchema::Exec1 => (true, false, false, false, false),
            AxiomSchema::Exec2 | AxiomSchema::Exec3 => (false, false, true, true, false),
            AxiomSchema::Func => (true, false, true, false, false),
            AxiomSchema::Perm => (false, false, true, false, true),
            AxiomSchema::EmptyBang => (true, false, true, true, false),
        }
    }
}

impl fmt::Display for AxiomSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Values for the metavariables of a schema. Unused fields stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings {
    pub phi: Option<Formula>,
    pub psi: Option<Formula>,
    pub alpha: Option<Word>,
    pub agent: Option<Agent>,
    pub atom: Option<Atom>,
}

impl Bindings {
    /// Drops the fields `schema` does not use.
    pub fn restricted_to(&self, schema: AxiomSchema) -> Bindings {
        let (phi, psi, alpha, agent, atom) = schema.metavariables();
        Bindings {
            phi: self.phi.clone().filter(|_| phi),
            psi: self.psi.clone().filter(|_| psi),
            alpha: self.alpha.clone().filter(|_| alpha),
            agent: self.agent.clone().filter(|_| agent),
            atom: self.atom.clone().filter(|_| atom),
        }
    }
}

impl fmt::Display for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(x) = &self.phi {
            parts.push(format!("phi := {}", x));
        }
        if let Some(x) = &self.psi {
            parts.push(format!("psi := {}", x));
        }
        if let Some(x) = &self.alpha {
            parts.push(format!("alpha := {}", x));
        }
        if let Some(x) = &self.agent {
            parts.push(format!("a := {}", x));
        }
        if let Some(x) = &self.atom {
            parts.push(format!("p := {}", x));
        }
        f.write_str(&parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("side condition of {schema} violated: {detail}")]
    SideConditionViolated { schema: AxiomSchema, detail: String },
    #[error("{schema} needs a binding for `{var}`")]
    IncompleteBindings {
        schema: AxiomSchema,
        var: &'static str,
    },
    #[error("agent `{0}` is not declared")]
    UnknownAgent(String),
}

fn need<T: Clone>(v: &Option<T>, schema: AxiomSchema, var: &'static str) -> Result<T, AxiomError> {
    v.clone()
        .ok_or(AxiomError::IncompleteBindings { schema, var })
}

/// The primitive-form instance of `schema` under `b`.
pub fn instantiate_axiom(
    sig: &Signature,
    schema: AxiomSchema,
    b: &Bindings,
) -> Result<Formula, AxiomError> {
    use AxiomSchema::*;
    let phi = || need(&b.phi, schema, "phi");
    let psi = || need(&b.psi, schema, "psi");
    let alpha = || need(&b.alpha, schema, "alpha");
    let agent = || -> Result<Agent, AxiomError> {
        let a = need(&b.agent, schema, "a")?;
        if sig.agents().contains(&a) {
            Ok(a)
        } else {
            Err(AxiomError::UnknownAgent(a.name().to_string()))
        }
    };
    let empty = || empty_formula(sig).0;
    Ok(match schema {
        Dist => {
            let (a, f, g) = (agent()?, phi()?, psi()?);
            Formula::implies(
                Formula::k(a.clone(), Formula::implies(f.clone(), g.clone())),
                Formula::implies(Formula::k(a.clone(), f), Formula::k(a, g)),
            )
        }
        DistBang => {
            let (w, f, g) = (alpha()?, phi()?, psi()?);
            Formula::implies(
                w.boxed(Formula::implies(f.clone(), g.clone())),
                Formula::implies(w.boxed(f), w.boxed(g)),
            )
        }
        EmptyK => {
            let a = agent()?;
            Formula::implies(empty(), Formula::k(a, empty()))
        }
        EmptyT => {
            let (a, f) = (agent()?, phi()?);
            Formula::implies(empty(), Formula::implies(Formula::k(a, f.clone()), f))
        }
        Four => {
            let (a, f) = (agent()?, phi()?);
            Formula::implies(
                Formula::k(a.clone(), f.clone()),
                Formula::k(a.clone(), Formula::k(a, f)),
            )
        }
        Five => {
            let (a, f) = (agent()?, phi()?);
            Formula::implies(
                Formula::hat_k(a.clone(), f.clone()),
                Formula::k(a.clone(), Formula::hat_k(a, f)),
            )
        }
        Exec1 => {
            let f = phi()?;
            Formula::iff(Formula::send(f.clone(), Formula::top()), f)
        }
        Exec2 => {
            let (w, a) = (alpha()?, agent()?);
            if w.receptions(&a) >= w.announcements() {
                return Err(AxiomError::SideConditionViolated {
                    schema,
                    detail: format!(
                        "|{}|_{} = {} is not below |{}|_! = {}",
                        w,
                        a,
                        w.receptions(&a),
                        w,
                        w.announcements()
                    ),
                });
            }
            w.boxed(Formula::recv(a, Formula::top()))
        }
        Exec3 => {
            let (w, a) = (alpha()?, agent()?);
            if w.receptions(&a) < w.announcements() {
                return Err(AxiomError::SideConditionViolated {
                    schema,
                    detail: format!(
                        "|{}|_{} = {} is below |{}|_! = {}",
                        w,
                        a,
                        w.receptions(&a),
                        w,
                        w.announcements()
                    ),
                });
            }
            Formula::implies(empty(), w.boxed(Formula::box_recv(a, Formula::bot())))
        }
        Func => {
            let (w, f) = (alpha()?, phi()?);
            Formula::implies(w.diamond(f.clone()), w.boxed(f))
        }
        Perm => {
            let (w, p) = (alpha()?, need(&b.atom, schema, "p")?);
            let p = Formula::atom(p);
            let np = Formula::not(p.clone());
            Formula::and(
                Formula::implies(p.clone(), w.boxed(p)),
                Formula::implies(np.clone(), w.boxed(np)),
            )
        }
        EmptyBang => {
            let (w, a, f) = (alpha()?, agent()?, phi()?);
            let conj = Formula::and_all(
                views(&w, &a, sig.agents())
                    .iter()
                    .map(|beta| Formula::k(a.clone(), beta.boxed(f.clone()))),
            );
            Formula::implies(
                empty(),
                Formula::iff(
                    w.boxed(Formula::k(a, f)),
                    Formula::or(w.boxed(Formula::bot()), conj),
                ),
            )
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_word};

    fn sig2() -> Signature {
        Signature::from_names(&["a", "b"], &["p", "q"]).unwrap()
    }

    #[test]
    fn empty_shape() {
        let s = sig2();
        let (e, w) = empty_formula(&s);
        assert!(w.is_none());
        let expected = parse_formula(
            "[a]F & [b]F & K a [a]F & K a [b]F & K b [a]F & K b [b]F",
            &s,
        )
        .unwrap();
        assert_eq!(e, expected);
        let one = Signature::from_names(&["a"], &["p"]).unwrap();
        let (e, w) = empty_formula(&one);
        assert_eq!(w, Some(SingleAgentWarning));
        assert_eq!(e, parse_formula("[a]F & K a [a]F", &one).unwrap());
    }

    #[test]
    fn history_enumeration() {
        let s = Signature::from_names(&["a"], &["p"]).unwrap();
        let vocab = [parse_formula("p", &s).unwrap()];
        let got: Vec<String> = enumerate_histories(&vocab, s.agents(), 2)
            .iter()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(got, vec!["eps", "p", "p.a", "p.p"]);
        assert_eq!(
            enumerate_histories(&vocab, s.agents(), 0),
            vec![Word::empty()]
        );
        let s = sig2();
        let vocab = [Formula::top(), parse_formula("p", &s).unwrap()];
        let all = enumerate_histories(&vocab, s.agents(), 4);
        assert!(all.iter().all(Word::is_history));
        let distinct: BTreeSet<&Word> = all.iter().collect();
        assert_eq!(distinct.len(), all.len());
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn validity_split_for_box_receive() {
        let s = sig2();
        let f = parse_formula("[a]F", &s).unwrap();
        let fam = ModelFamily::Random {
            count: 10,
            max_states: 4,
            seed: 1,
        };
        let eps = check_epsilon(&ValidityQuery::new(
            f.clone(),
            s.clone(),
            fam.clone(),
            ValidityMode::Epsilon,
        ));
        assert!(eps.is_valid());
        let star =
            check_star(&ValidityQuery::new(f, s.clone(), fam, ValidityMode::Star).with_bound(2));
        assert_eq!(star.witness(), Some(&parse_word("T", &s).unwrap()));
    }

    #[test]
    fn empty_is_valid_but_not_always() {
        let s = sig2();
        let e = empty_formula(&s).0;
        let fam = ModelFamily::Random {
            count: 10,
            max_states: 4,
            seed: 2,
        };
        assert!(check_epsilon(&ValidityQuery::new(
            e.clone(),
            s.clone(),
            fam.clone(),
            ValidityMode::Epsilon
        ))
        .is_valid());
        assert!(
            !check_star(&ValidityQuery::new(e, s, fam, ValidityMode::Star).with_bound(1))
                .is_valid()
        );
    }

    #[test]
    fn counterexample_for_atoms() {
        let s = sig2();
        let p = parse_formula("p", &s).unwrap();
        let fam = ModelFamily::Random {
            count: 5,
            max_states: 4,
            seed: 3,
        };
        let r = check_epsilon(&ValidityQuery::new(
            p.clone(),
            s.clone(),
            fam,
            ValidityMode::Epsilon,
        ));
        let Verdict::Counterexample {
            model, state, word, ..
        } = r.verdict
        else {
            panic!("p is not valid")
        };
        let mut ctx = EvalContext::new(model);
        assert!(!ctx.eval(state, &word, &p).unwrap());
    }

    #[test]
    fn axiom_instances() {
        let s = sig2();
        let p = parse_formula("p", &s).unwrap();
        let b = Bindings {
            phi: Some(p.clone()),
            ..Default::default()
        };
        assert_eq!(
            instantiate_axiom(&s, AxiomSchema::Exec1, &b).unwrap(),
            parse_formula("<p>T <-> p", &s).unwrap()
        );
        let b = Bindings {
            alpha: Some(parse_word("a", &s).unwrap()),
            agent: Some(Agent::new("a")),
            ..Default::default()
        };
        assert_eq!(
            instantiate_axiom(&s, AxiomSchema::Exec3, &b).unwrap(),
            parse_formula("empty -> [a][a]F", &s).unwrap()
        );
        assert!(matches!(
            instantiate_axiom(&s, AxiomSchema::Exec2, &b),
            Err(AxiomError::SideConditionViolated { .. })
        ));
        let b = Bindings {
            alpha: Some(parse_word("p.a", &s).unwrap()),
            agent: Some(Agent::new("a")),
            phi: Some(parse_formula("q", &s).unwrap()),
            ..Default::default()
        };
        assert_eq!(
            instantiate_axiom(&s, AxiomSchema::EmptyBang, &b).unwrap(),
            parse_formula(
                "empty -> (@[p.a]K a q <-> (@[p.a]F | (K a @[p.a]q & K a @[p.a.b]q & K a @[p.b.a]q)))",
                &s
            )
            .unwrap()
        );
        assert!(matches!(
            instantiate_axiom(&s, AxiomSchema::Dist, &Bindings::default()),
            Err(AxiomError::IncompleteBindings { .. })
        ));
        for schema in AxiomSchema::ALL {
            assert_eq!(AxiomSchema::from_name(schema.name()), Some(schema));
        }
    }
}
