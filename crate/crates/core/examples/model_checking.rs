//! Replays the two-agent example: `p | q` is announced, then read by `a`
//! and by `b`. Agent `a` observes `p`, agent `b` observes `q`.
//!
//! ```text
//! cargo run --example model_checking
//! ```

use std::path::Path;

use aalogic::{load_model, parse_formula, parse_word, update_model, EvalContext};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/figure1.toml");
    let model = load_model(&std::fs::read_to_string(path).unwrap()).unwrap();
    let sig = model.signature().clone();
    let mut ctx = EvalContext::new(model.clone());

    let questions = [
        "K a (p | q)",
        "K b (p | q)",
        "K a K b (p | q)",
        "K b K a (p | q)",
    ];
    for w in ["eps", "(p|q)", "(p|q).a", "(p|q).a.b"] {
        let alpha = parse_word(w, &sig).unwrap();
        let updated = update_model(&mut ctx, &alpha).unwrap();
        println!("after {}: {} states remain", alpha, updated.num_states());
        for q in questions {
            let f = parse_formula(q, &sig).unwrap();
            let at: Vec<&str> = (0..model.num_states())
                .filter(|&s| ctx.eval(s, &alpha, &f).unwrap())
                .map(|s| model.state_name(s))
                .collect();
            println!("  {:18} holds at {:?}", q, at);
        }
    }

    // the two semantics agree wherever the history is executable
    let f = parse_formula("~K b p", &sig).unwrap();
    let alpha = parse_word("(p|q).a", &sig).unwrap();
    for s in 0..model.num_states() {
        println!(
            "{}: executable {}, plus {}, minus {}",
            model.state_name(s),
            ctx.executable(s, &alpha).unwrap(),
            ctx.eval(s, &alpha, &f).unwrap(),
            ctx.eval_minus(s, &alpha, &f).unwrap()
        );
    }
}
