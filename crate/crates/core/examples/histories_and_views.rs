//! Words, histories and what an agent can tell apart.
//!
//! ```text
//! cargo run --example histories_and_views
//! ```

use aalogic::{parse_word, view_rel, views, Agent, Signature};

fn main() {
    let sig = Signature::from_names(&["a", "b"], &["p", "q"]).unwrap();
    for text in ["p.q.a.a", "p.a.q", "p.a.a.q", "p.q.a.a.a"] {
        let w = parse_word(text, &sig).unwrap();
        let a = Agent::new("a");
        println!(
            "{:10} history: {:5}  announcements: {}  read by a: {}",
            text,
            w.is_history(),
            w.announcements(),
            w.read_by(&a)
        );
    }

    let alpha = parse_word("p.a.q", &sig).unwrap();
    for agent in sig.agents() {
        let vs: Vec<String> = views(&alpha, agent, sig.agents())
            .iter()
            .map(|v| v.to_string())
            .collect();
        println!("views of {} for {}: {}", alpha, agent, vs.join(", "));
    }
    let a = Agent::new("a");
    println!(
        "{} sees itself for a: {}",
        alpha,
        view_rel(&alpha, &alpha, &a)
    );
}
