//! Asynchronous announcement logic: agents broadcast formulas and each
//! agent receives them later, in order, at its own pace.
//!
//! * [`syntax`] parses and prints formulas.
//! * [`words`] covers words, histories and the view relation.
//! * [`models`] loads, validates and generates epistemic models.
//! * [`semantics`] decides executability and satisfaction.
//! * [`validity`] searches for counterexamples to ε- and ∗-validity and
//!   instantiates the axiom schemas.
//! * [`proof`] checks Hilbert-style derivations.

pub mod gen;
pub mod models;
pub mod proof;
pub mod semantics;
pub mod syntax;
pub mod validity;
pub mod words;

pub use models::{
    load_model, random_model, update_model, validate_model, EpistemicModel, ModelError,
};
pub use proof::{
    check_proof, check_tautology, load_proof, match_axiom, parse_proof, Proof, ProofReport,
    ProofVerdict,
};
pub use semantics::{fold_word, EvalContext, EvalError, Mode};
pub use syntax::{
    parse_formula, parse_word, pretty_formula, print_formula, Agent, Atom, Formula, ParseError,
    Signature,
};
pub use validity::{
    check_epsilon, check_star, empty_formula, enumerate_histories, instantiate_axiom, AxiomSchema,
    Bindings, ValidityQuery, ValidityReport, Verdict,
};
pub use words::{ll_less, view_rel, views, Letter, Word};
