//! Seeded random models, written in the model file format.
//!
//! ```text
//! cargo run --example random_models -- 3 42
//! ```

use aalogic::{load_model, random_model, validate_model, Signature};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let sig = Signature::from_names(&["a", "b"], &["p", "q"]).unwrap();
    let m = random_model(n, &sig, seed);
    let text = m.to_toml();
    print!("{}", text);
    let back = load_model(&text).unwrap();
    assert_eq!(back, m);
    assert!(validate_model(&back).is_empty());
}
