//! Formulas of asynchronous announcement logic: the AST, the text grammar,
//! and the size and degree measures that drive the termination order.

mod formula;
mod parse;
mod print;

use std::collections::BTreeSet;

use thiserror::Error;

pub use formula::{Agent, Atom, Formula, FormulaKind};
pub use parse::{parse_formula, parse_word, ParseError};
pub(crate) use print::write_letter_formula;
pub use print::{pretty_formula, print_formula};

const RESERVED: &[&str] = &["eps", "empty"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("`{0}` is declared both as an agent and as an atom")]
    Overlap(String),
    #[error("`{0}` is not a lowercase identifier")]
    BadIdentifier(String),
    #[error("`{0}` is a reserved word")]
    Reserved(String),
}

/// The declared agent set and atom set a formula or model lives over.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    agents: BTreeSet<Agent>,
    atoms: BTreeSet<Atom>,
}

fn check_ident(name: &str) -> Result<(), SignatureError> {
    let mut chars = name.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_lowercase() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
    if !ok {
        return Err(SignatureError::BadIdentifier(name.to_string()));
    }
    if RESERVED.contains(&name) {
        return Err(SignatureError::Reserved(name.to_string()));
    }
    Ok(())
}

impl Signature {
    pub fn new(
        agents: impl IntoIterator<Item = Agent>,
        atoms: impl IntoIterator<Item = Atom>,
    ) -> Result<Self, SignatureError> {
        let agents: BTreeSet<Agent> = agents.into_iter().collect();
        let atoms: BTreeSet<Atom> = atoms.into_iter().collect();
        for a in &agents {
            check_ident(a.name())?;
        }
        for p in &atoms {
            check_ident(p.name())?;
            if agents.iter().any(|a| a.name() == p.name()) {
                return Err(SignatureError::Overlap(p.name().to_string()));
            }
        }
        Ok(Signature { agents, atoms })
    }

    pub fn from_names(agents: &[&str], atoms: &[&str]) -> Result<Self, SignatureError> {
        Self::new(
            agents.iter().map(|a| Agent::new(a)),
            atoms.iter().map(|p| Atom::new(p)),
        )
    }

    pub fn agents(&self) -> &BTreeSet<Agent> {
        &self.agents
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    pub fn agent(&self, name: &str) -> Option<Agent> {
        self.agents.iter().find(|a| a.name() == name).cloned()
    }

    pub fn atom(&self, name: &str) -> Option<Atom> {
        self.atoms.iter().find(|p| p.name() == name).cloned()
    }

    /// True when every agent and atom of `f` is declared.
    pub fn covers(&self, f: &Formula) -> bool {
        f.atoms().iter().all(|p| self.atoms.contains(p))
            && f.agents().iter().all(|a| self.agents.contains(a))
    }
}
