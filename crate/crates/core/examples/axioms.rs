//! Instantiates every axiom schema and recognizes the instances again.
//!
//! ```text
//! cargo run --example axioms
//! ```

use aalogic::gen::random_axiom_instance;
use aalogic::proof::match_axiom;
use aalogic::{
    instantiate_axiom, parse_formula, parse_word, pretty_formula, Agent, AxiomSchema, Bindings,
    Signature,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let sig = Signature::from_names(&["a", "b"], &["p", "q"]).unwrap();
    let b = Bindings {
        phi: Some(parse_formula("p", &sig).unwrap()),
        psi: Some(parse_formula("q", &sig).unwrap()),
        alpha: Some(parse_word("p.a", &sig).unwrap()),
        agent: Some(Agent::new("a")),
        atom: sig.atom("q"),
    };
    for schema in AxiomSchema::ALL {
        let b = b.restricted_to(schema);
        match instantiate_axiom(&sig, schema, &b) {
            Ok(f) => println!("{:8} {}", schema, pretty_formula(&f, Some(&sig))),
            Err(e) => println!("{:8} {}", schema, e),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for schema in AxiomSchema::ALL {
        let (_, f) = random_axiom_instance(&mut rng, &sig, schema, 2, 2, 1);
        let found = match_axiom(&sig, &f, schema).expect("instances are recognized");
        println!("{:8} recognized with {}", schema, found);
    }
}
