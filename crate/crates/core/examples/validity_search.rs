//! Bounded validity search, with and without prior histories.
//!
//! ```text
//! cargo run --example validity_search
//! ```

use aalogic::validity::{check, ModelFamily, ValidityMode};
use aalogic::{parse_formula, pretty_formula, Signature, ValidityQuery, Verdict};

fn main() {
    let sig = Signature::from_names(&["a", "b"], &["p", "q"]).unwrap();
    let family = ModelFamily::Random {
        count: 30,
        max_states: 4,
        seed: 1,
    };
    for text in [
        "[a]F",
        "empty",
        "K a [a]F",
        "K a p -> p",
        "p -> [q]p",
        "<p>T <-> p",
        "K a p -> [q]K a p",
    ] {
        let f = parse_formula(text, &sig).unwrap();
        for mode in [ValidityMode::Epsilon, ValidityMode::Star] {
            let q = ValidityQuery::new(f.clone(), sig.clone(), family.clone(), mode).with_bound(3);
            let r = check(&q);
            let verdict = match &r.verdict {
                Verdict::ValidUpToBound => "valid up to the bound".to_string(),
                Verdict::Counterexample {
                    model_index,
                    model,
                    state,
                    word,
                } => format!(
                    "fails in model {} at {} after {}",
                    model_index,
                    model.state_name(*state),
                    word
                ),
            };
            println!(
                "{:20} {:?}: {}",
                pretty_formula(&f, Some(&sig)),
                mode,
                verdict
            );
        }
    }
}
