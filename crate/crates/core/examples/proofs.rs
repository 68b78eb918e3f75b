//! Checks the proof files under `fixtures/proofs`, or prints the
//! know-all-read derivation for a word:
//!
//! ```text
//! cargo run --example proofs
//! cargo run --example proofs -- know-all-read p.q.a
//! ```

use std::path::Path;

use aalogic::proof::know_all_read;
use aalogic::{check_proof, load_proof, parse_word, Agent, ProofVerdict, Signature};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.first().map(String::as_str) == Some("know-all-read") {
        let sig = Signature::from_names(&["a", "b"], &["p", "q"]).unwrap();
        let alpha = parse_word(args.get(1).map_or("eps", String::as_str), &sig).expect("a word");
        print!(
            "{}",
            know_all_read(&sig, &alpha, &Agent::new("a")).to_text()
        );
        return;
    }
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/proofs");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    for path in paths.iter().filter(|p| !p.ends_with("top_template.prf")) {
        let proof = load_proof(path).unwrap();
        let report = check_proof(&proof);
        let name = path.file_name().unwrap().to_string_lossy();
        match report.verdict {
            ProofVerdict::Rejected { line } => {
                println!(
                    "{:28} rejected at line {}: {:?}",
                    name,
                    line,
                    report.first_rejected().unwrap().status
                )
            }
            v => println!("{:28} {:?}, {} lines", name, v, proof.lines.len()),
        }
    }
}
