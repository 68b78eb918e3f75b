//! Seeded random formulas, words and axiom instances for property tests
//! and sweeps.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::syntax::{Agent, Atom, Formula, Signature};
use crate::validity::{instantiate_axiom, AxiomSchema, Bindings};
use crate::words::{Letter, Word};

/// A formula over `sig` of modal nesting depth at most `max_depth`, where
/// depth counts every constructor. Leaves are atoms and `⊤`.
pub fn random_formula<R: Rng>(rng: &mut R, sig: &Signature, max_depth: usize) -> Formula {
    let atoms: Vec<&Atom> = sig.atoms().iter().collect();
    let agents: Vec<&Agent> = sig.agents().iter().collect();
    if max_depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng, &atoms);
    }
    let d = max_depth - 1;
    let pick = rng.gen_range(0..if agents.is_empty() { 3 } else { 6 });
    match pick {
        0 => Formula::not(random_formula(rng, sig, d)),
        1 => Formula::or(random_formula(rng, sig, d), random_formula(rng, sig, d)),
        2 => Formula::send(random_formula(rng, sig, d), random_formula(rng, sig, d)),
        3 => Formula::hat_k(
            (*agents.choose(rng).unwrap()).clone(),
            random_formula(rng, sig, d),
        ),
        4 => Formula::recv(
            (*agents.choose(rng).unwrap()).clone(),
            random_formula(rng, sig, d),
        ),
        _ => Formula::not(random_formula(rng, sig, d)),
    }
}

fn leaf<R: Rng>(rng: &mut R, atoms: &[&Atom]) -> Formula {
    if atoms.is_empty() || rng.gen_bool(0.2) {
        Formula::top()
    } else {
        Formula::atom((*atoms.choose(rng).unwrap()).clone())
    }
}

/// A word of length at most `max_len`; formula letters have depth at most
/// `letter_depth`. Not necessarily a history.
pub fn random_word<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    max_len: usize,
    letter_depth: usize,
) -> Word {
    let agents: Vec<&Agent> = sig.agents().iter().collect();
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| {
            if !agents.is_empty() && rng.gen_bool(0.5) {
                Letter::Agent((*agents.choose(rng).unwrap()).clone())
            } else {
                Letter::Formula(random_formula(rng, sig, letter_depth))
            }
        })
        .collect()
}

/// A random history: receptions are only drawn when some announcement is
/// still unread by the chosen agent.
pub fn random_history<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    max_len: usize,
    letter_depth: usize,
) -> Word {
    let agents: Vec<&Agent> = sig.agents().iter().collect();
    let len = rng.gen_range(0..=max_len);
    let mut w = Word::empty();
    for _ in 0..len {
        let ready: Vec<&&Agent> = agents
            .iter()
            .filter(|a| w.receptions(a) < w.announcements())
            .collect();
        if !ready.is_empty() && rng.gen_bool(0.5) {
            w.push(Letter::Agent((**ready.choose(rng).unwrap()).clone()));
        } else {
            w.push(Letter::Formula(random_formula(rng, sig, letter_depth)));
        }
    }
    w
}

/// Random bindings for `schema` that respect its side condition, and the
/// resulting instance.
pub fn random_axiom_instance<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    schema: AxiomSchema,
    formula_depth: usize,
    word_len: usize,
    letter_depth: usize,
) -> (Bindings, Formula) {
    let agents: Vec<&Agent> = sig.agents().iter().collect();
    let atoms: Vec<&Atom> = sig.atoms().iter().collect();
    loop {
        let b = Bindings {
            phi: Some(random_formula(rng, sig, formula_depth)),
            psi: Some(random_formula(rng, sig, formula_depth)),
            alpha: Some(random_word(rng, sig, word_len, letter_depth)),
            agent: agents.choose(rng).map(|a| (*a).clone()),
            atom: atoms.choose(rng).map(|p| (*p).clone()),
        }
        .restricted_to(schema);
        if let Ok(f) = instantiate_axiom(sig, schema, &b) {
            return (b, f);
        }
    }
}
