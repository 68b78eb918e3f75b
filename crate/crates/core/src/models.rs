//! Finite multi-agent epistemic models.
//!
//! Accessibility is stored as one partition of the states per agent, so
//! every relation is an equivalence relation by construction. Models are
//! read from and written to TOML:
//!
//! ```toml
//! version = 1
//! states = ["s", "t"]
//! agents = ["a"]
//! atoms = ["p", "q"]
//!
//! [partitions]
//! a = [["s", "t"]]
//!
//! [valuation]
//! p = ["s", "t"]
//! q = ["s"]
//! ```
//!
//! An agent missing from `[partitions]` is an error; an atom missing from
//! `[valuation]` is false everywhere.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::semantics::{EvalContext, EvalError};
use crate::syntax::{Agent, Atom, Signature, SignatureError};
use crate::words::Word;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("partition error: {0}")]
    Partition(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("no state survives the update")]
    EmptyUpdate,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// On-disk form of a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub version: u32,
    pub states: Vec<String>,
    pub agents: Vec<String>,
    pub atoms: Vec<String>,
    #[serde(default)]
    pub partitions: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

/// The largest model [`EpistemicModel::shape_key`] canonicalizes.
pub const SHAPE_KEY_MAX: usize = 7;

/// Steps `v` to the next permutation in lexicographic order.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("a larger element");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `M = (W, ∼, V)` with states numbered `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpistemicModel {
    sig: Signature,
    names: Vec<String>,
    /// Indexed like `sig.agents()`. Classes are sorted and each is sorted.
    partitions: Vec<Vec<Vec<usize>>>,
    /// `class_of[agent][state]`, `usize::MAX` when the state is unassigned.
    class_of: Vec<Vec<usize>>,
    valuation: BTreeMap<Atom, Vec<bool>>,
    ids: Vec<usize>,
}

impl EpistemicModel {
    /// Builds and validates a model.
    pub fn new(
        sig: Signature,
        names: Vec<String>,
        partitions: BTreeMap<Agent, Vec<Vec<usize>>>,
        valuation: BTreeMap<Atom, BTreeSet<usize>>,
    ) -> Result<Self, ModelError> {
        if names.is_empty() {
            return Err(ModelError::Schema(
                "a model needs at least one state".into(),
            ));
        }
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != names.len() {
            return Err(ModelError::Schema("duplicate state names".into()));
        }
        for a in partitions.keys() {
            if !sig.agents().contains(a) {
                return Err(ModelError::Schema(format!(
                    "partition for undeclared agent `{}`",
                    a
                )));
            }
        }
        for p in valuation.keys() {
            if !sig.atoms().contains(p) {
                return Err(ModelError::UnknownAtom(p.name().to_string()));
            }
        }
        let m = Self::new_unchecked(sig, names, partitions, valuation);
        if let Some(d) = validate_model(&m).into_iter().next() {
            return Err(ModelError::Partition(d));
        }
        Ok(m)
    }

    /// Builds a model without checking it. `validate_model` reports what,
    /// if anything, is wrong with the result.
    pub fn new_unchecked(
        sig: Signature,
        names: Vec<String>,
        partitions: BTreeMap<Agent, Vec<Vec<usize>>>,
        valuation: BTreeMap<Atom, BTreeSet<usize>>,
    ) -> Self {
        let n = names.len();
        let mut parts = Vec::new();
        let mut class_of = Vec::new();
        for a in sig.agents() {
            let mut classes: Vec<Vec<usize>> = partitions.get(a).cloned().unwrap_or_default();
            for c in &mut classes {
                c.sort_unstable();
            }
            classes.sort();
            let mut owner = vec![usize::MAX; n];
            for (i, c) in classes.iter().enumerate() {
                for &s in c {
                    if s < n && owner[s] == usize::MAX {
                        owner[s] = i;
                    }
                }
            }
            parts.push(classes);
            class_of.push(owner);
        }
        let valuation = sig
            .atoms()
            .iter()
            .map(|p| {
                let mut row = vec![false; n];
                if let Some(set) = valuation.get(p) {
                    for &s in set {
                        if s < n {
                            row[s] = true;
                        }
                    }
                }
                (p.clone(), row)
            })
            .collect();
        EpistemicModel {
            sig,
            names,
            partitions: parts,
            class_of,
            valuation,
            ids: (0..n).collect(),
        }
    }

    /// A key shared by exactly the models that differ only in state names
    /// and numbering. `None` for invalid models and above `SHAPE_KEY_MAX`
    /// states.
    pub fn shape_key(&self) -> Option<Vec<usize>> {
        let n = self.num_states();
        if n > SHAPE_KEY_MAX || !is_valid_model(self) {
            return None;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best: Option<Vec<usize>> = None;
        loop {
            let key = self.encode(&perm);
            if best.as_ref().map_or(true, |b| key < *b) {
                best = Some(key);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        best
    }

    /// The model with state `s` renamed to `perm[s]`, as a flat vector.
    fn encode(&self, perm: &[usize]) -> Vec<usize> {
        let n = perm.len();
        let mut out = vec![n];
        let mut inv = vec![0; n];
        for (s, &t) in perm.iter().enumerate() {
            inv[t] = s;
        }
        for owner in &self.class_of {
            // each new state points at the least new state in its class
            let mut least = vec![usize::MAX; n];
            for t in 0..n {
                let c = owner[inv[t]];
                if least[c] == usize::MAX {
                    least[c] = t;
                }
                out.push(least[c]);
            }
        }
        for row in self.valuation.values() {
            out.extend((0..n).map(|t| row[inv[t]] as usize));
        }
        out
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn agent_index(&self, a: &Agent) -> Option<usize> {
        self.sig.agents().iter().position(|b| b == a)
    }

    /// The equivalence classes of `a`, or `None` for an undeclared agent.
    pub fn partition(&self, a: &Agent) -> Option<&[Vec<usize>]> {
        self.agent_index(a).map(|i| self.partitions[i].as_slice())
    }

    /// States `a` cannot tell apart from `s`, `s` included. Agents are
    /// addressed by their position in the signature.
    pub fn class(&self, agent_idx: usize, s: usize) -> &[usize] {
        match self.class_of[agent_idx].get(s) {
            Some(&c) if c != usize::MAX => &self.partitions[agent_idx][c],
            // unassigned states of an unvalidated model see only themselves
            _ => std::slice::from_ref(&self.ids[s]),
        }
    }

    /// `s ∼_a t`
    pub fn related(&self, a: &Agent, s: usize, t: usize) -> bool {
        match self.agent_index(a) {
            Some(i) => {
                let c = &self.class_of[i];
                s == t || (c.get(s).is_some_and(|&x| x != usize::MAX) && c.get(s) == c.get(t))
            }
            None => false,
        }
    }

    /// `s ∈ V(p)`; `None` for an undeclared atom.
    pub fn holds(&self, p: &Atom, s: usize) -> Option<bool> {
        self.valuation
            .get(p)
            .map(|row| row.get(s).copied().unwrap_or(false))
    }

    /// `V(p)` as a sorted list of states.
    pub fn extension(&self, p: &Atom) -> Option<Vec<usize>> {
        self.valuation.get(p).map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(s, _)| s)
                .collect()
        })
    }

    /// The submodel on `keep`, states renumbered in order.
    pub fn restrict(&self, keep: &[usize]) -> Result<EpistemicModel, ModelError> {
        if keep.is_empty() {
            return Err(ModelError::EmptyUpdate);
        }
        let index: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let names = keep.iter().map(|&s| self.names[s].clone()).collect();
        let partitions = self
            .sig
            .agents()
            .iter()
            .zip(&self.partitions)
            .map(|(a, classes)| {
                let kept = classes
                    .iter()
                    .map(|c| {
                        c.iter()
                            .filter_map(|s| index.get(s).copied())
                            .collect::<Vec<_>>()
                    })
                    .filter(|c| !c.is_empty())
                    .collect();
                (a.clone(), kept)
            })
            .collect();
        let valuation = self
            .valuation
            .iter()
            .map(|(p, row)| {
                let set = keep
                    .iter()
                    .enumerate()
                    .filter(|(_, &s)| row[s])
                    .map(|(i, _)| i)
                    .collect();
                (p.clone(), set)
            })
            .collect();
        EpistemicModel::new(self.sig.clone(), names, partitions, valuation)
    }

    pub fn to_document(&self) -> ModelDocument {
        let name = |s: &usize| self.names[*s].clone();
        ModelDocument {
            version: MODEL_FORMAT_VERSION,
            states: self.names.clone(),
            agents: self
                .sig
                .agents()
                .iter()
                .map(|a| a.name().to_string())
                .collect(),
            atoms: self
                .sig
                .atoms()
                .iter()
                .map(|p| p.name().to_string())
                .collect(),
            partitions: self
                .sig
                .agents()
                .iter()
                .zip(&self.partitions)
                .map(|(a, cs)| {
                    (
                        a.name().to_string(),
                        cs.iter().map(|c| c.iter().map(name).collect()).collect(),
                    )
                })
                .collect(),
            valuation: self
                .valuation
                .iter()
                .map(|(p, row)| {
                    let states = row
                        .iter()
                        .enumerate()
                        .filter(|(_, &b)| b)
                        .map(|(s, _)| self.names[s].clone())
                        .collect();
                    (p.name().to_string(), states)
                })
                .collect(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_document()).expect("model documents always serialize")
    }
}

/// `M_α`: the submodel of states where `α` is executable. Evaluation never
/// uses it; knowledge after `α` is still computed on the full model.
pub fn update_model(ctx: &mut EvalContext, alpha: &Word) -> Result<EpistemicModel, ModelError> {
    let keep = ctx.surviving_states(alpha)?;
    ctx.model().restrict(&keep)
}

/// Parses and validates a model file.
pub fn load_model(text: &str) -> Result<EpistemicModel, ModelError> {
    let doc: ModelDocument = toml::from_str(text).map_err(|e| ModelError::Schema(e.to_string()))?;
    from_document(&doc)
}

pub fn from_document(doc: &ModelDocument) -> Result<EpistemicModel, ModelError> {
    if doc.version != MODEL_FORMAT_VERSION {
        return Err(ModelError::Schema(format!(
            "unsupported version {} (expected {})",
            doc.version, MODEL_FORMAT_VERSION
        )));
    }
    let agents: Vec<&str> = doc.agents.iter().map(String::as_str).collect();
    let atoms: Vec<&str> = doc.atoms.iter().map(String::as_str).collect();
    let sig = Signature::from_names(&agents, &atoms)?;
    let state = |name: &String| {
        doc.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| ModelError::UnknownState(name.clone()))
    };
    let mut partitions = BTreeMap::new();
    for (a, classes) in &doc.partitions {
        let agent = sig
            .agent(a)
            .ok_or_else(|| ModelError::Schema(format!("partition for undeclared agent `{}`", a)))?;
        let classes = classes
            .iter()
            .map(|c| c.iter().map(state).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        partitions.insert(agent, classes);
    }
    for a in sig.agents() {
        if !partitions.contains_key(a) {
            return Err(ModelError::Partition(format!(
                "no partition given for agent `{}`",
                a
            )));
        }
    }
    let mut valuation = BTreeMap::new();
    for (p, states) in &doc.valuation {
        let atom = sig
            .atom(p)
            .ok_or_else(|| ModelError::UnknownAtom(p.clone()))?;
        let set = states
            .iter()
            .map(state)
            .collect::<Result<BTreeSet<_>, _>>()?;
        valuation.insert(atom, set);
    }
    EpistemicModel::new(sig, doc.states.clone(), partitions, valuation)
}

/// Everything wrong with `m`; empty when the model is well formed.
pub fn validate_model(m: &EpistemicModel) -> Vec<String> {
    let mut out = Vec::new();
    let n = m.names.len();
    if n == 0 {
        out.push("the state set is empty".to_string());
    }
    for (a, classes) in m.sig.agents().iter().zip(&m.partitions) {
        let mut seen = vec![0usize; n];
        for c in classes {
            if c.is_empty() {
                out.push(format!("agent {} has an empty class", a));
            }
            for &s in c {
                match seen.get_mut(s) {
                    Some(k) => *k += 1,
                    None => out.push(format!("agent {} mentions state #{} out of range", a, s)),
                }
            }
        }
        for (s, &k) in seen.iter().enumerate() {
            if k == 0 {
                out.push(format!(
                    "state {} is missing from the partition of {}",
                    m.names[s], a
                ));
            } else if k > 1 {
                out.push(format!(
                    "state {} lies in overlapping classes of {}",
                    m.names[s], a
                ));
            }
        }
    }
    out
}

pub fn is_valid_model(m: &EpistemicModel) -> bool {
    validate_model(m).is_empty()
}

/// A random model on `n ≥ 1` states named `s0..`. Each agent groups the
/// states by a uniformly drawn label; each atom holds at each state with
/// probability one half.
pub fn random_model(n: usize, sig: &Signature, seed: u64) -> EpistemicModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_model_with(n.max(1), sig, &mut rng)
}

pub fn random_model_with<R: Rng>(n: usize, sig: &Signature, rng: &mut R) -> EpistemicModel {
    let n = n.max(1);
    let names = (0..n).map(|i| format!("s{}", i)).collect();
    let mut partitions = BTreeMap::new();
    for a in sig.agents() {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for s in 0..n {
            groups.entry(rng.gen_range(0..n)).or_default().push(s);
        }
        partitions.insert(a.clone(), groups.into_values().collect());
    }
    let mut valuation = BTreeMap::new();
    for p in sig.atoms() {
        let set = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        valuation.insert(p.clone(), set);
    }
    EpistemicModel::new(sig.clone(), names, partitions, valuation)
        .expect("generated partitions are always valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIGURE: &str = include_str!("../fixtures/figure1.toml");

    #[test]
    fn loads_the_four_state_fixture() {
        let m = load_model(FIGURE).unwrap();
        assert_eq!(m.num_states(), 4);
        assert!(is_valid_model(&m));
        let a = Agent::new("a");
        let b = Agent::new("b");
        let (pq, pnq, npq, npnq) = (
            m.state_index("pq").unwrap(),
            m.state_index("pnq").unwrap(),
            m.state_index("npq").unwrap(),
            m.state_index("npnq").unwrap(),
        );
        assert!(m.related(&a, npnq, npq) && m.related(&a, pnq, pq));
        assert!(!m.related(&a, pq, npq));
        assert!(m.related(&b, npnq, pnq) && m.related(&b, npq, pq));
        assert!(!m.related(&b, pq, pnq));
    }

    #[test]
    fn one_state() {
        let text = r#"
            version = 1
            states = ["s"]
            agents = ["a"]
            atoms = ["p"]
            [partitions]
            a = [["s"]]
            [valuation]
            p = ["s"]
        "#;
        let m = load_model(text).unwrap();
        assert_eq!(m.num_states(), 1);
        assert_eq!(m.holds(&Atom::new("p"), 0), Some(true));
    }

    #[test]
    fn rejects_bad_documents() {
        let overlapping = r#"
            version = 1
            states = ["s", "t"]
            agents = ["a"]
            atoms = []
            [partitions]
            a = [["s", "t"], ["t"]]
        "#;
        assert!(matches!(
            load_model(overlapping),
            Err(ModelError::Partition(_))
        ));
        let missing = overlapping.replace(r#"[["s", "t"], ["t"]]"#, r#"[["s"]]"#);
        assert!(matches!(
            load_model(&missing),
            Err(ModelError::Partition(_))
        ));
        let atom = r#"
            version = 1
            states = ["s"]
            agents = []
            atoms = ["p"]
            [valuation]
            q = ["s"]
        "#;
        assert!(matches!(load_model(atom), Err(ModelError::UnknownAtom(_))));
        let version = FIGURE.replace("version = 1", "version = 9");
        assert!(matches!(load_model(&version), Err(ModelError::Schema(_))));
        let empty = r#"
            version = 1
            states = []
            agents = []
            atoms = []
        "#;
        assert!(matches!(load_model(empty), Err(ModelError::Schema(_))));
    }

    #[test]
    fn diagnostics_for_unchecked_models() {
        let sig = Signature::from_names(&["a"], &["p"]).unwrap();
        let mut parts = BTreeMap::new();
        parts.insert(Agent::new("a"), vec![vec![0]]);
        let m = EpistemicModel::new_unchecked(
            sig.clone(),
            vec!["s".into(), "t".into()],
            parts,
            BTreeMap::new(),
        );
        assert!(!is_valid_model(&m));
        let m = EpistemicModel::new_unchecked(sig, vec![], BTreeMap::new(), BTreeMap::new());
        assert!(!is_valid_model(&m));
    }

    #[test]
    fn round_trip() {
        let m = load_model(FIGURE).unwrap();
        assert_eq!(load_model(&m.to_toml()).unwrap(), m);
    }

    #[test]
    fn random_models_are_deterministic_and_valid() {
        let sig = Signature::from_names(&["a", "b"], &["p", "q"]).unwrap();
        assert_eq!(random_model(1, &sig, 3).num_states(), 1);
        assert_eq!(random_model(4, &sig, 11), random_model(4, &sig, 11));
        for seed in 0..50 {
            let m = random_model(1 + (seed as usize % 6), &sig, seed);
            assert!(is_valid_model(&m));
            // partition-derived relations are equivalences
            for a in sig.agents() {
                let n = m.num_states();
                for s in 0..n {
                    assert!(m.related(a, s, s));
                    for t in 0..n {
                        assert_eq!(m.related(a, s, t), m.related(a, t, s));
                        for u in 0..n {
                            if m.related(a, s, t) && m.related(a, t, u) {
                                assert!(m.related(a, s, u));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn restriction() {
        let m = load_model(FIGURE).unwrap();
        let keep: Vec<usize> = (0..4)
            .filter(|&s| s != m.state_index("npnq").unwrap())
            .collect();
        let r = m.restrict(&keep).unwrap();
        assert_eq!(r.num_states(), 3);
        assert!(r.state_index("npnq").is_none());
        assert!(is_valid_model(&r));
        assert_eq!(m.restrict(&[]), Err(ModelError::EmptyUpdate));
    }

    #[test]
    fn updates() {
        let m = load_model(FIGURE).unwrap();
        let sig = m.signature().clone();
        let mut ctx = EvalContext::new(m.clone());
        let u = update_model(&mut ctx, &crate::syntax::parse_word("(p|q)", &sig).unwrap()).unwrap();
        assert_eq!(u.state_names(), ["pq", "pnq", "npq"]);
        assert_eq!(update_model(&mut ctx, &Word::empty()).unwrap(), m);
        let one = Signature::from_names(&["a"], &["p"]).unwrap();
        let mut parts = BTreeMap::new();
        parts.insert(Agent::new("a"), vec![vec![0]]);
        let np =
            EpistemicModel::new(one.clone(), vec!["s".into()], parts, BTreeMap::new()).unwrap();
        let mut ctx = EvalContext::new(np);
        let w = crate::syntax::parse_word("p", &one).unwrap();
        assert_eq!(update_model(&mut ctx, &w), Err(ModelError::EmptyUpdate));
    }
}
