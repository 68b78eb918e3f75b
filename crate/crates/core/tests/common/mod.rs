#![allow(dead_code)]

use std::path::{Path, PathBuf};

use aalogic::{parse_proof, Proof};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

/// Single-line edits to the proof fixtures: (file, line number, from, to).
/// Each breaks exactly the edited line.
pub const MUTATIONS: [(&str, usize, &str, &str); 20] = [
    ("box_diamond.prf", 1, "(p -> (~p -> F))", "(p -> (p -> F))"),
    ("box_diamond.prf", 2, "nec! 1 T", "nec! 1 p"),
    ("box_diamond.prf", 3, "axiom Dist!", "axiom Dist"),
    ("box_diamond.prf", 4, "mp 2 3", "mp 3 2"),
    ("box_diamond.prf", 6, "(([T]p", "(([T]q"),
    ("box_diamond.prf", 8, "mp 5 7", "mp 4 7"),
    ("box_diamond.prf", 9, "(~[T]~p | [T]F)", "([T]~p | [T]F)"),
    ("box_diamond.prf", 11, "def 10", "def 4"),
    ("box_diamond.prf", 11, "(<T>p | [T]F)", "(<T>q | [T]F)"),
    ("diamond_box.prf", 1, "axiom Func!", "axiom Perm!"),
    ("diamond_box.prf", 1, "(<T>p -> [T]p)", "([T]p -> <T>p)"),
    ("diamond_box.prf", 2, "(F -> p)", "(p -> F)"),
    ("diamond_box.prf", 3, "[T](F -> p)", "[p](F -> p)"),
    ("diamond_box.prf", 5, "mp 3 4", "mp 4 3"),
    ("diamond_box.prf", 7, "mp 1 6", "mp 2 6"),
    ("diamond_box.prf", 8, "-> [T]p)", "-> <T>p)"),
    ("know_all_read_p_a.prf", 1, "Exec!3", "Exec!2"),
    ("know_all_read_p_a.prf", 2, "neck 1 a", "neck 1 b"),
    ("know_all_read_p_a.prf", 13, "axiom emptyK", "axiom emptyT"),
    ("know_all_read_p_a.prf", 3, "(K a empty ->", "(K b empty ->"),
];

/// The fixture text with one edit applied to the numbered line.
pub fn mutate(text: &str, line: usize, from: &str, to: &str) -> String {
    let prefix = format!("{}. ", line);
    let mut hit = false;
    let out: Vec<String> = text
        .lines()
        .map(|l| {
            if l.starts_with(&prefix) && l.contains(from) {
                hit = true;
                l.replacen(from, to, 1)
            } else {
                l.to_string()
            }
        })
        .collect();
    assert!(hit, "line {} has no `{}`", line, from);
    out.join("\n") + "\n"
}

pub fn proof_fixture(name: &str, text: &str) -> Proof {
    parse_proof(text, fixture(name).parent()).unwrap()
}
