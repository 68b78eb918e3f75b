//! Hilbert-style derivations in AA*: a line-oriented proof format, axiom
//! recognition, tautology checking and the finitary rules. The infinitary
//! rule R* is only approximated, over every history up to a length bound,
//! and lines using it get their own verdict.
//!
//! ```text
//! # comment
//! agents a b
//! atoms p q
//! 1. (p -> (~p -> F)) ; taut
//! 2. [T](p -> (~p -> F)) ; nec! 1 T
//! ```
//!
//! Justifications:
//!
//! ```text
//! taut                      substitution instance of a propositional tautology
//! axiom NAME                instance of an axiom schema (Dist, Dist!, emptyK, ...)
//! mp I J                    line I is φ and line J is φ -> ψ
//! neck I AGENT              K_a of line I
//! nec! I WORD               [w] of line I
//! def I                     line I up to double negations
//! hyp LABEL                 unproved assumption
//! rstar TEMPLATE bound N vocab F1, F2, ...
//! ```
//!
//! `rstar` derives φ when the template yields a derivation of
//! `empty -> [α]φ` for every history `α` of length at most `N` whose
//! announcements come from the vocabulary. Templates are
//! `know-all-read:AGENT`, the built-in derivation of
//! `empty -> [α]K_a[a]F`, or `file:PATH`, a proof file in which `$alpha`
//! stands for the word.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::syntax::{
    parse_formula, parse_word, pretty_formula, Agent, Formula, FormulaKind, ParseError, Signature,
};
use crate::validity::{
    empty_formula, enumerate_histories, instantiate_axiom, AxiomSchema, Bindings,
};
use crate::words::{views, Letter, Word};

/// Most opaque letters a tautology check will enumerate.
pub const MAX_LETTERS: usize = 20;

/// How deep `file:` templates may nest.
const MAX_TEMPLATE_DEPTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Template {
    KnowAllRead(Agent),
    File(PathBuf),
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Template::KnowAllRead(a) => write!(f, "know-all-read:{}", a),
            Template::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Tautology,
    Axiom(AxiomSchema),
    ModusPonens(usize, usize),
    NecK(usize, Agent),
    NecBang(usize, Word),
    Definition(usize),
    RStarBounded {
        template: Template,
        vocab: Vec<Formula>,
        bound: usize,
    },
    Hypothesis(String),
}

impl Justification {
    fn cited(&self) -> Vec<usize> {
        match self {
            Justification::ModusPonens(i, j) => vec![*i, *j],
            Justification::NecK(i, _)
            | Justification::NecBang(i, _)
            | Justification::Definition(i) => vec![*i],
            _ => vec![],
        }
    }

    fn write(&self, out: &mut String, sig: &Signature) {
        use std::fmt::Write;
        let _ = match self {
            Justification::Tautology => write!(out, "taut"),
            Justification::Axiom(s) => write!(out, "axiom {}", s),
            Justification::ModusPonens(i, j) => write!(out, "mp {} {}", i, j),
            Justification::NecK(i, a) => write!(out, "neck {} {}", i, a),
            Justification::NecBang(i, w) => write!(out, "nec! {} {}", i, w),
            Justification::Definition(i) => write!(out, "def {}", i),
            Justification::Hypothesis(l) => write!(out, "hyp {}", l),
            Justification::RStarBounded {
                template,
                vocab,
                bound,
            } => {
                let vocab: Vec<String> =
                    vocab.iter().map(|f| pretty_formula(f, Some(sig))).collect();
                write!(
                    out,
                    "rstar {} bound {} vocab {}",
                    template,
                    bound,
                    vocab.join(", ")
                )
            }
        };
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub index: usize,
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub signature: Signature,
    pub lines: Vec<ProofLine>,
    /// Where `file:` templates are looked up.
    pub base_dir: Option<PathBuf>,
}

impl Proof {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }

    /// The proof in file syntax.
    pub fn to_text(&self) -> String {
        let sig = &self.signature;
        let names = |v: Vec<&str>| v.join(" ");
        let mut out = format!(
            "agents {}\natoms {}\n",
            names(sig.agents().iter().map(|a| a.name()).collect()),
            names(sig.atoms().iter().map(|p| p.name()).collect()),
        );
        for l in &self.lines {
            out.push_str(&format!(
                "{}. {} ; ",
                l.index,
                pretty_formula(&l.formula, Some(sig))
            ));
            l.justification.write(&mut out, sig);
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum ProofParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Formula { line: usize, source: ParseError },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn syntax(line: usize, msg: impl Into<String>) -> ProofParseError {
    ProofParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Reads a proof file; `file:` templates resolve against its directory.
pub fn load_proof(path: &Path) -> Result<Proof, ProofParseError> {
    let text = std::fs::read_to_string(path).map_err(|source| ProofParseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_proof(&text, path.parent())
}

pub fn parse_proof(text: &str, base_dir: Option<&Path>) -> Result<Proof, ProofParseError> {
    let mut agents: Option<Vec<String>> = None;
    let mut atoms: Option<Vec<String>> = None;
    let mut sig: Option<Signature> = None;
    let mut lines: Vec<ProofLine> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let n = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let head = words.next().unwrap_or("");
        if head == "agents" || head == "atoms" {
            if sig.is_some() {
                return Err(syntax(n, "declarations must precede the numbered lines"));
            }
            let names: Vec<String> = words.map(str::to_string).collect();
            let slot = if head == "agents" {
                &mut agents
            } else {
                &mut atoms
            };
            if slot.replace(names).is_some() {
                return Err(syntax(n, format!("`{}` declared twice", head)));
            }
            continue;
        }
        let sig = match &sig {
            Some(s) => s,
            None => {
                let a: Vec<&str> = agents.iter().flatten().map(String::as_str).collect();
                let p: Vec<&str> = atoms.iter().flatten().map(String::as_str).collect();
                sig = Some(Signature::from_names(&a, &p).map_err(|e| syntax(n, e.to_string()))?);
                sig.as_ref().unwrap()
            }
        };
        let (idx, rest) = line
            .split_once('.')
            .ok_or_else(|| syntax(n, "expected `N. formula ; justification`"))?;
        let index: usize = idx
            .trim()
            .parse()
            .map_err(|_| syntax(n, format!("`{}` is not a line number", idx.trim())))?;
        if let Some(prev) = lines.last() {
            if index <= prev.index {
                return Err(syntax(
                    n,
                    format!("line number {} does not follow {}", index, prev.index),
                ));
            }
        }
        let (ftext, jtext) = rest
            .split_once(';')
            .ok_or_else(|| syntax(n, "missing `;` before the justification"))?;
        let formula = parse_formula(ftext.trim(), sig)
            .map_err(|source| ProofParseError::Formula { line: n, source })?;
        let justification = parse_justification(jtext.trim(), sig, n)?;
        lines.push(ProofLine {
            index,
            formula,
            justification,
        });
    }
    let signature = match sig {
        Some(s) => s,
        None => {
            let a: Vec<&str> = agents.iter().flatten().map(String::as_str).collect();
            let p: Vec<&str> = atoms.iter().flatten().map(String::as_str).collect();
            Signature::from_names(&a, &p).map_err(|e| syntax(0, e.to_string()))?
        }
    };
    Ok(Proof {
        signature,
        lines,
        base_dir: base_dir.map(Path::to_path_buf),
    })
}

fn parse_justification(
    text: &str,
    sig: &Signature,
    n: usize,
) -> Result<Justification, ProofParseError> {
    let (rule, args) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let args = args.trim();
    let nums = |k: usize| -> Result<Vec<usize>, ProofParseError> {
        let v: Vec<&str> = args.split_whitespace().take(k).collect();
        if v.len() < k {
            return Err(syntax(n, format!("`{}` needs {} line number(s)", rule, k)));
        }
        v.iter()
            .map(|s| {
                s.parse()
                    .map_err(|_| syntax(n, format!("`{}` is not a line number", s)))
            })
            .collect()
    };
    let after_first = || {
        args.split_once(char::is_whitespace)
            .map(|(_, r)| r.trim())
            .unwrap_or("")
    };
    let word =
        |t: &str| parse_word(t, sig).map_err(|source| ProofParseError::Formula { line: n, source });
    Ok(match rule {
        "taut" => Justification::Tautology,
        "axiom" => Justification::Axiom(
            AxiomSchema::from_name(args)
                .ok_or_else(|| syntax(n, format!("unknown axiom `{}`", args)))?,
        ),
        "mp" => {
            let v = nums(2)?;
            Justification::ModusPonens(v[0], v[1])
        }
        "neck" => {
            let i = nums(1)?[0];
            let a = sig
                .agent(after_first())
                .ok_or_else(|| syntax(n, format!("`{}` is not an agent", after_first())))?;
            Justification::NecK(i, a)
        }
        "nec!" => {
            let i = nums(1)?[0];
            Justification::NecBang(i, word(after_first())?)
        }
        "def" => Justification::Definition(nums(1)?[0]),
        "hyp" => Justification::Hypothesis(args.to_string()),
        "rstar" => {
            let (tpl, rest) = args
                .split_once(char::is_whitespace)
                .ok_or_else(|| syntax(n, "rstar needs a template"))?;
            let template = if let Some(a) = tpl.strip_prefix("know-all-read:") {
                Template::KnowAllRead(
                    sig.agent(a)
                        .ok_or_else(|| syntax(n, format!("`{}` is not an agent", a)))?,
                )
            } else if let Some(p) = tpl.strip_prefix("file:") {
                Template::File(PathBuf::from(p))
            } else {
                return Err(syntax(n, format!("unknown template `{}`", tpl)));
            };
            let rest = rest
                .trim()
                .strip_prefix("bound")
                .ok_or_else(|| syntax(n, "expected `bound N`"))?;
            let (b, rest) = rest
                .trim()
                .split_once(char::is_whitespace)
                .unwrap_or((rest.trim(), ""));
            let bound = b
                .parse()
                .map_err(|_| syntax(n, format!("`{}` is not a bound", b)))?;
            let vocab_text = rest
                .trim()
                .strip_prefix("vocab")
                .ok_or_else(|| syntax(n, "expected `vocab F1, F2, ...`"))?;
            let vocab = vocab_text
                .split(',')
                .map(|t| {
                    parse_formula(t.trim(), sig)
                        .map_err(|source| ProofParseError::Formula { line: n, source })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Justification::RStarBounded {
                template,
                vocab,
                bound,
            }
        }
        other => return Err(syntax(n, format!("unknown rule `{}`", other))),
    })
}

// ---- tautologies ----

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TautologyError {
    #[error("{0} opaque letters exceed the limit of {MAX_LETTERS}")]
    TooManyLetters(usize),
}

enum BNode {
    Top,
    Letter(usize),
    Not(usize),
    Or(usize, usize),
}

/// Whether `f` is a substitution instance of a propositional tautology.
/// Maximal subformulas that are not `⊤`, `¬` or `∨` are opaque letters.
pub fn check_tautology(f: &Formula) -> Result<bool, TautologyError> {
    let mut nodes = Vec::new();
    let mut letters: FxHashMap<Formula, usize> = FxHashMap::default();
    let root = compile_boolean(f, &mut nodes, &mut letters);
    if letters.len() > MAX_LETTERS {
        return Err(TautologyError::TooManyLetters(letters.len()));
    }
    let mut assignment = vec![None; letters.len()];
    Ok(holds_everywhere(&nodes, root, &mut assignment, 0))
}

fn compile_boolean(
    f: &Formula,
    nodes: &mut Vec<BNode>,
    letters: &mut FxHashMap<Formula, usize>,
) -> usize {
    let node = match f.kind() {
        FormulaKind::Top => BNode::Top,
        FormulaKind::Not(g) => BNode::Not(compile_boolean(g, nodes, letters)),
        FormulaKind::Or(g, h) => {
            let g = compile_boolean(g, nodes, letters);
            BNode::Or(g, compile_boolean(h, nodes, letters))
        }
        _ => {
            let k = letters.len();
            BNode::Letter(*letters.entry(f.clone()).or_insert(k))
        }
    };
    nodes.push(node);
    nodes.len() - 1
}

fn partial_value(nodes: &[BNode], i: usize, assignment: &[Option<bool>]) -> Option<bool> {
    match nodes[i] {
        BNode::Top => Some(true),
        BNode::Letter(k) => assignment[k],
        BNode::Not(g) => partial_value(nodes, g, assignment).map(|v| !v),
        BNode::Or(g, h) => match (
            partial_value(nodes, g, assignment),
            partial_value(nodes, h, assignment),
        ) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        },
    }
}

fn holds_everywhere(
    nodes: &[BNode],
    root: usize,
    assignment: &mut Vec<Option<bool>>,
    next: usize,
) -> bool {
    match partial_value(nodes, root, assignment) {
        Some(v) => v,
        None => {
            let mut ok = true;
            for v in [true, false] {
                assignment[next] = Some(v);
                if !holds_everywhere(nodes, root, assignment, next + 1) {
                    ok = false;
                    break;
                }
            }
            assignment[next] = None;
            ok
        }
    }
}

// ---- axiom recognition ----

/// Ways to read `f` as `[α]ψ`, longest `α` first and `α = ε` last.
fn box_splits(f: &Formula) -> Vec<(Word, Formula)> {
    let mut out = Vec::new();
    if let FormulaKind::Not(g) = f.kind() {
        let mut letters = Vec::new();
        let mut cur = g;
        loop {
            if let (false, FormulaKind::Not(x)) = (letters.is_empty(), cur.kind()) {
                out.push((Word::from_letters(letters.clone()), x.clone()));
            }
            cur = match cur.kind() {
                FormulaKind::Send(m, rest) => {
                    letters.push(Letter::Formula(m.clone()));
                    rest
                }
                FormulaKind::Recv(a, rest) => {
                    letters.push(Letter::Agent(a.clone()));
                    rest
                }
                _ => break,
            };
        }
    }
    out.reverse();
    out.push((Word::empty(), f.clone()));
    out
}

/// Ways to read `f` as `<α>ψ`, longest `α` first.
fn diamond_splits(f: &Formula) -> Vec<(Word, Formula)> {
    let mut out = vec![(Word::empty(), f.clone())];
    let mut letters = Vec::new();
    let mut cur = f;
    loop {
        cur = match cur.kind() {
            FormulaKind::Send(m, rest) => {
                letters.push(Letter::Formula(m.clone()));
                rest
            }
            FormulaKind::Recv(a, rest) => {
                letters.push(Letter::Agent(a.clone()));
                rest
            }
            _ => break,
        };
        out.push((Word::from_letters(letters.clone()), cur.clone()));
    }
    out.reverse();
    out
}

/// Bindings under which `schema` instantiates to exactly `f`, side
/// condition included.
pub fn match_axiom(sig: &Signature, f: &Formula, schema: AxiomSchema) -> Option<Bindings> {
    use AxiomSchema::*;
    let mut candidates: Vec<Bindings> = Vec::new();
    let b = |phi: Option<&Formula>,
             psi: Option<&Formula>,
             alpha: Option<Word>,
             agent: Option<&Agent>| Bindings {
        phi: phi.cloned(),
        psi: psi.cloned(),
        alpha,
        agent: agent.cloned(),
        atom: None,
    };
    match schema {
        Dist => {
            if let Some((l, _)) = f.as_implies() {
                if let Some((a, x)) = l.as_k() {
                    if let Some((phi, psi)) = x.as_implies() {
                        candidates.push(b(Some(phi), Some(psi), None, Some(a)));
                    }
                }
            }
        }
        DistBang => {
            if let Some((l, _)) = f.as_implies() {
                for (w, body) in box_splits(l) {
                    if let Some((phi, psi)) = body.as_implies() {
                        candidates.push(b(Some(phi), Some(psi), Some(w), None));
                    }
                }
            }
        }
        EmptyK => {
            if let Some((_, r)) = f.as_implies() {
                if let Some((a, _)) = r.as_k() {
                    candidates.push(b(None, None, None, Some(a)));
                }
            }
        }
        EmptyT => {
            if let Some((_, r)) = f.as_implies() {
                if let Some((k, phi)) = r.as_implies() {
                    if let Some((a, _)) = k.as_k() {
                        candidates.push(b(Some(phi), None, None, Some(a)));
                    }
                }
            }
        }
        Four => {
            if let Some((l, _)) = f.as_implies() {
                if let Some((a, phi)) = l.as_k() {
                    candidates.push(b(Some(phi), None, None, Some(a)));
                }
            }
        }
        Five => {
            if let Some((l, _)) = f.as_implies() {
                if let FormulaKind::HatK(a, phi) = l.kind() {
                    candidates.push(b(Some(phi), None, None, Some(a)));
                }
            }
        }
        Exec1 => {
            if let Some((_, phi)) = f.as_iff() {
                candidates.push(b(Some(phi), None, None, None));
            }
        }
        Exec2 => {
            for (w, body) in box_splits(f) {
                if let FormulaKind::Recv(a, _) = body.kind() {
                    candidates.push(b(None, None, Some(w), Some(a)));
                }
            }
        }
        Exec3 => {
            if let Some((_, r)) = f.as_implies() {
                for (w, body) in box_splits(r) {
                    if let Some((a, _)) = body.as_box_recv() {
                        candidates.push(b(None, None, Some(w), Some(a)));
                    }
                }
            }
        }
        Func => {
            if let Some((l, _)) = f.as_implies() {
                for (w, phi) in diamond_splits(l) {
                    candidates.push(b(Some(&phi), None, Some(w), None));
                }
            }
        }
        Perm => {
            if let Some((x, _)) = f.as_and() {
                if let Some((p, r)) = x.as_implies() {
                    if let FormulaKind::Atom(atom) = p.kind() {
                        for (w, _) in box_splits(r) {
                            candidates.push(Bindings {
                                alpha: Some(w),
                                atom: Some(atom.clone()),
                                ..Bindings::default()
                            });
                        }
                    }
                }
            }
        }
        EmptyBang => {
            if let Some((_, r)) = f.as_implies() {
                if let Some((g, _)) = r.as_iff() {
                    for (w, body) in box_splits(g) {
                        if let Some((a, phi)) = body.as_k() {
                            candidates.push(b(Some(phi), None, Some(w), Some(a)));
                        }
                    }
                }
            }
        }
    }
    candidates
        .into_iter()
        .find(|c| instantiate_axiom(sig, schema, c).map_or(false, |g| &g == f))
}

// ---- checking ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineStatus {
    Accepted,
    AcceptedBounded,
    Rejected(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineReport {
    pub index: usize,
    pub status: LineStatus,
    /// For axiom lines, the recognized bindings.
    pub bindings: Option<Bindings>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum ProofVerdict {
    /// A theorem of AA*.
    Accepted,
    /// Every step checks, but some step used the bounded form of R*.
    AcceptedBounded,
    /// Every step checks, but the proof rests on hypotheses.
    FromHypotheses,
    Rejected {
        line: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofReport {
    pub lines: Vec<LineReport>,
    pub verdict: ProofVerdict,
    pub conclusion: Option<Formula>,
}

impl ProofReport {
    pub fn first_rejected(&self) -> Option<&LineReport> {
        self.lines
            .iter()
            .find(|l| matches!(l.status, LineStatus::Rejected(_)))
    }
}

/// Versioned structured form of a proof report.
#[derive(Debug, Clone, Serialize)]
pub struct ProofReportDocument {
    pub format: u32,
    #[serde(flatten)]
    pub verdict: ProofVerdict,
    pub conclusion: Option<String>,
    pub lines: Vec<LineDocument>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LineDocument {
    pub index: usize,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bindings: Option<String>,
}

impl ProofReport {
    pub fn to_document(&self, sig: &Signature) -> ProofReportDocument {
        ProofReportDocument {
            format: 1,
            verdict: self.verdict,
            conclusion: self
                .conclusion
                .as_ref()
                .map(|f| pretty_formula(f, Some(sig))),
            lines: self
                .lines
                .iter()
                .map(|l| {
                    let (status, reason) = match &l.status {
                        LineStatus::Accepted => ("accepted", None),
                        LineStatus::AcceptedBounded => ("accepted_bounded", None),
                        LineStatus::Rejected(r) => ("rejected", Some(r.clone())),
                    };
                    LineDocument {
                        index: l.index,
                        status,
                        reason,
                        bindings: l.bindings.as_ref().map(|b| b.to_string()),
                    }
                })
                .collect(),
        }
    }
}

/// Checks every line; a line citing a rejected line is rejected too.
pub fn check_proof(p: &Proof) -> ProofReport {
    check_at_depth(p, 0)
}

fn check_at_depth(p: &Proof, depth: usize) -> ProofReport {
    let sig = &p.signature;
    let mut seen: BTreeMap<usize, (usize, bool)> = BTreeMap::new();
    let mut reports = Vec::new();
    let mut hypotheses = false;
    for (pos, line) in p.lines.iter().enumerate() {
        let mut bindings = None;
        let cited_ok =
            line.justification
                .cited()
                .into_iter()
                .try_for_each(|i| match seen.get(&i) {
                    None if i >= line.index => {
                        Err(format!("cites line {}, which does not come before it", i))
                    }
                    None => Err(format!("cites line {}, which does not exist", i)),
                    Some((_, false)) => Err(format!("cites line {}, which is rejected", i)),
                    Some(_) => Ok(()),
                });
        let get = |i: usize| &p.lines[seen[&i].0].formula;
        let status = match cited_ok {
            Err(e) => LineStatus::Rejected(e),
            Ok(()) => {
                let f = &line.formula;
                let verdict = |ok: bool, why: String| {
                    if ok {
                        LineStatus::Accepted
                    } else {
                        LineStatus::Rejected(why)
                    }
                };
                match &line.justification {
                    Justification::Tautology => match check_tautology(f) {
                        Ok(true) => LineStatus::Accepted,
                        Ok(false) => LineStatus::Rejected("not a propositional tautology".into()),
                        Err(e) => LineStatus::Rejected(e.to_string()),
                    },
                    Justification::Axiom(schema) => match match_axiom(sig, f, *schema) {
                        Some(b) => {
                            bindings = Some(b);
                            LineStatus::Accepted
                        }
                        None => LineStatus::Rejected(format!("not an instance of {}", schema)),
                    },
                    Justification::ModusPonens(i, j) => verdict(
                        get(*j) == &Formula::implies(get(*i).clone(), f.clone()),
                        format!("line {} is not line {} -> this line", j, i),
                    ),
                    Justification::NecK(i, a) => verdict(
                        f == &Formula::k(a.clone(), get(*i).clone()),
                        format!("not K {} of line {}", a, i),
                    ),
                    Justification::NecBang(i, w) => verdict(
                        f == &w.boxed(get(*i).clone()),
                        format!("not [{}] of line {}", w, i),
                    ),
                    Justification::Definition(i) => verdict(
                        f.double_negation_normal() == get(*i).double_negation_normal(),
                        format!("differs from line {} beyond double negations", i),
                    ),
                    Justification::Hypothesis(_) => {
                        hypotheses = true;
                        LineStatus::Accepted
                    }
                    Justification::RStarBounded {
                        template,
                        vocab,
                        bound,
                    } => check_rstar(p, f, template, vocab, *bound, depth),
                }
            }
        };
        seen.insert(
            line.index,
            (pos, !matches!(status, LineStatus::Rejected(_))),
        );
        reports.push(LineReport {
            index: line.index,
            status,
            bindings,
        });
    }
    let verdict = if let Some(l) = reports
        .iter()
        .find(|l| matches!(l.status, LineStatus::Rejected(_)))
    {
        ProofVerdict::Rejected { line: l.index }
    } else if hypotheses {
        ProofVerdict::FromHypotheses
    } else if reports
        .iter()
        .any(|l| l.status == LineStatus::AcceptedBounded)
    {
        ProofVerdict::AcceptedBounded
    } else {
        ProofVerdict::Accepted
    };
    ProofReport {
        lines: reports,
        verdict,
        conclusion: p.conclusion().cloned(),
    }
}

fn check_rstar(
    p: &Proof,
    phi: &Formula,
    template: &Template,
    vocab: &[Formula],
    bound: usize,
    depth: usize,
) -> LineStatus {
    let sig = &p.signature;
    if depth >= MAX_TEMPLATE_DEPTH {
        return LineStatus::Rejected("templates nest too deeply".into());
    }
    let source = match template {
        Template::KnowAllRead(_) => None,
        Template::File(path) => {
            let full = match &p.base_dir {
                Some(d) => d.join(path),
                None => path.clone(),
            };
            match std::fs::read_to_string(&full) {
                Ok(t) => Some((t, full.parent().map(Path::to_path_buf))),
                Err(e) => {
                    return LineStatus::Rejected(format!(
                        "cannot read template {}: {}",
                        full.display(),
                        e
                    ))
                }
            }
        }
    };
    let empty = empty_formula(sig).0;
    for alpha in enumerate_histories(vocab, sig.agents(), bound) {
        let instance = match (template, &source) {
            (Template::KnowAllRead(a), _) => know_all_read(sig, &alpha, a),
            (_, Some((text, dir))) => {
                let text = text.replace("$alpha", &alpha.to_string());
                match parse_proof(&text, dir.as_deref()) {
                    Ok(q) if q.signature == *sig => q,
                    Ok(_) => {
                        return LineStatus::Rejected("template declares another signature".into())
                    }
                    Err(e) => return LineStatus::Rejected(format!("template at {}: {}", alpha, e)),
                }
            }
            (Template::File(_), None) => unreachable!("file templates are read above"),
        };
        let report = check_at_depth(&instance, depth + 1);
        match report.verdict {
            ProofVerdict::Accepted | ProofVerdict::AcceptedBounded => {}
            ProofVerdict::FromHypotheses => {
                return LineStatus::Rejected(format!("template at {} rests on hypotheses", alpha))
            }
            ProofVerdict::Rejected { line } => {
                return LineStatus::Rejected(format!(
                    "template at {} fails at its line {}",
                    alpha, line
                ))
            }
        }
        let goal = Formula::implies(empty.clone(), alpha.boxed(phi.clone()));
        if instance.conclusion() != Some(&goal) {
            return LineStatus::Rejected(format!(
                "template at {} does not conclude empty -> [{}] of this line",
                alpha, alpha
            ));
        }
    }
    LineStatus::AcceptedBounded
}

// ---- the know-all-read derivation ----

/// A derivation of `empty → [α]K_a[a]⊥`: each view `β` of `α` satisfies
/// `empty → K_a[β][a]⊥`, and (empty!) turns their conjunction into the
/// goal.
pub fn know_all_read(sig: &Signature, alpha: &Word, a: &Agent) -> Proof {
    let empty = empty_formula(sig).0;
    let imp = Formula::implies;
    let ka = |f: Formula| Formula::k(a.clone(), f);
    let all_read = Formula::box_recv(a.clone(), Formula::bot());
    let mut lines: Vec<ProofLine> = Vec::new();
    let mut push = |formula: Formula, justification: Justification| -> usize {
        let index = lines.len() + 1;
        lines.push(ProofLine {
            index,
            formula,
            justification,
        });
        index
    };
    let betas = views(alpha, a, sig.agents());
    let k_empty = ka(empty.clone());
    let mut per_view = Vec::new();
    for beta in &betas {
        let inner = imp(empty.clone(), beta.boxed(all_read.clone()));
        let c = ka(beta.boxed(all_read.clone()));
        let l1 = push(inner.clone(), Justification::Axiom(AxiomSchema::Exec3));
        let l2 = push(ka(inner.clone()), Justification::NecK(l1, a.clone()));
        let dist = push(
            imp(ka(inner), imp(k_empty.clone(), c.clone())),
            Justification::Axiom(AxiomSchema::Dist),
        );
        let l3 = push(
            imp(k_empty.clone(), c.clone()),
            Justification::ModusPonens(l2, dist),
        );
        per_view.push((c, l3));
    }
    let l4 = push(
        imp(empty.clone(), k_empty.clone()),
        Justification::Axiom(AxiomSchema::EmptyK),
    );
    let mut chained = Vec::new();
    for (c, l3) in &per_view {
        let t = push(
            imp(
                imp(empty.clone(), k_empty.clone()),
                imp(
                    imp(k_empty.clone(), c.clone()),
                    imp(empty.clone(), c.clone()),
                ),
            ),
            Justification::Tautology,
        );
        let m = push(
            imp(
                imp(k_empty.clone(), c.clone()),
                imp(empty.clone(), c.clone()),
            ),
            Justification::ModusPonens(l4, t),
        );
        chained.push((
            c.clone(),
            push(
                imp(empty.clone(), c.clone()),
                Justification::ModusPonens(*l3, m),
            ),
        ));
    }
    let (mut conj, mut l_conj) = chained[0].clone();
    for (c, l5) in chained.iter().skip(1) {
        let next = Formula::and(conj.clone(), c.clone());
        let t = push(
            imp(
                imp(empty.clone(), conj.clone()),
                imp(
                    imp(empty.clone(), c.clone()),
                    imp(empty.clone(), next.clone()),
                ),
            ),
            Justification::Tautology,
        );
        let m = push(
            imp(
                imp(empty.clone(), c.clone()),
                imp(empty.clone(), next.clone()),
            ),
            Justification::ModusPonens(l_conj, t),
        );
        l_conj = push(
            imp(empty.clone(), next.clone()),
            Justification::ModusPonens(*l5, m),
        );
        conj = next;
    }
    let rhs = Formula::or(alpha.boxed(Formula::bot()), conj.clone());
    let t = push(
        imp(imp(empty.clone(), conj), imp(empty.clone(), rhs.clone())),
        Justification::Tautology,
    );
    let l7 = push(
        imp(empty.clone(), rhs.clone()),
        Justification::ModusPonens(l_conj, t),
    );
    let goal = alpha.boxed(ka(all_read.clone()));
    let eq = imp(empty.clone(), Formula::iff(goal.clone(), rhs.clone()));
    let l8 = push(eq.clone(), Justification::Axiom(AxiomSchema::EmptyBang));
    let t = push(
        imp(
            imp(empty.clone(), rhs),
            imp(eq.clone(), imp(empty.clone(), goal.clone())),
        ),
        Justification::Tautology,
    );
    let m = push(
        imp(eq, imp(empty.clone(), goal.clone())),
        Justification::ModusPonens(l7, t),
    );
    push(imp(empty, goal), Justification::ModusPonens(l8, m));
    Proof {
        signature: sig.clone(),
        lines,
        base_dir: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::from_names(&["a", "b"], &["p", "q"]).unwrap()
    }

    fn f(text: &str) -> Formula {
        parse_formula(text, &sig()).unwrap()
    }

    #[test]
    fn tautologies() {
        assert!(check_tautology(&f("Khat a p -> (~Khat a p -> F)")).unwrap());
        assert!(!check_tautology(&f("p -> q")).unwrap());
        assert!(check_tautology(&f("F -> [a]K b q")).unwrap());
        assert!(check_tautology(&f("<p>T | ~<p>T")).unwrap());
        assert!(!check_tautology(&f("<p>T -> p")).unwrap());
        let many = Formula::or_all(
            (0..21)
                .map(|i| {
                    Formula::recv(
                        Agent::new("a"),
                        Formula::send(Formula::top(), f(if i % 2 == 0 { "p" } else { "q" }))
                            .clone(),
                    )
                })
                .enumerate()
                .map(|(i, g)| (0..i).fold(g, |acc, _| Formula::hat_k(Agent::new("b"), acc))),
        );
        assert_eq!(
            check_tautology(&many),
            Err(TautologyError::TooManyLetters(21))
        );
    }

    #[test]
    fn axiom_matching() {
        let s = sig();
        let b = match_axiom(&s, &f("<p>T <-> p"), AxiomSchema::Exec1).unwrap();
        assert_eq!(b.phi, Some(f("p")));
        let b = match_axiom(&s, &f("empty -> [a][a]F"), AxiomSchema::Exec3).unwrap();
        assert_eq!(b.alpha, Some(parse_word("a", &s).unwrap()));
        assert_eq!(b.agent, Some(Agent::new("a")));
        assert_eq!(match_axiom(&s, &f("[T]<a>T"), AxiomSchema::Exec3), None);
        assert!(match_axiom(&s, &f("[T]<a>T"), AxiomSchema::Exec2).is_some());
        // the side condition fails for a word with nothing to read
        assert_eq!(match_axiom(&s, &f("<a>T"), AxiomSchema::Exec2), None);
        let func = f("@<p.a>q -> @[p.a]q");
        assert_eq!(
            match_axiom(&s, &func, AxiomSchema::Func).unwrap().alpha,
            Some(parse_word("p.a", &s).unwrap())
        );
    }

    #[test]
    fn rules() {
        let text = "agents a b\natoms p q\n1. p -> p ; taut\n2. K a (p -> p) ; neck 1 a\n3. @[p.a](p -> p) ; nec! 1 p.a\n4. ~~(p -> p) ; def 1\n";
        let r = check_proof(&parse_proof(text, None).unwrap());
        assert_eq!(r.verdict, ProofVerdict::Accepted);
        let bad = text.replace("neck 1 a", "neck 1 b");
        let r = check_proof(&parse_proof(&bad, None).unwrap());
        assert_eq!(r.verdict, ProofVerdict::Rejected { line: 2 });
        let gap = "agents a\natoms p\n1. p ; hyp h\n3. p -> p ; taut\n4. p ; mp 2 3\n";
        let r = check_proof(&parse_proof(gap, None).unwrap());
        assert_eq!(r.verdict, ProofVerdict::Rejected { line: 4 });
        let hyp =
            "agents a\natoms p q\n1. p ; hyp h\n2. p -> (q -> p) ; taut\n3. q -> p ; mp 1 2\n";
        assert_eq!(
            check_proof(&parse_proof(hyp, None).unwrap()).verdict,
            ProofVerdict::FromHypotheses
        );
    }

    #[test]
    fn parse_errors() {
        assert!(parse_proof("agents a\natoms p\n1. p ; frobnicate", None).is_err());
        assert!(parse_proof("agents a\natoms p\n2. p ; taut\n1. p ; taut", None).is_err());
        assert!(parse_proof("agents a\natoms p\n1. r ; taut", None).is_err());
        assert!(parse_proof("agents a\natoms p\n1. p taut", None).is_err());
    }

    #[test]
    fn know_all_read_checks() {
        let s = sig();
        for w in ["eps", "p.a", "p.q.a", "a", "p.b.q"] {
            let alpha = parse_word(w, &s).unwrap();
            let proof = know_all_read(&s, &alpha, &Agent::new("a"));
            let r = check_proof(&proof);
            assert_eq!(
                r.verdict,
                ProofVerdict::Accepted,
                "{}: {:?}",
                w,
                r.first_rejected()
            );
            let text = proof.to_text();
            assert_eq!(parse_proof(&text, None).unwrap(), proof);
        }
    }

    #[test]
    fn rstar_is_bounded() {
        let text = "agents a b\natoms p\n1. K a [a]F ; rstar know-all-read:a bound 2 vocab p, T\n";
        let r = check_proof(&parse_proof(text, None).unwrap());
        assert_eq!(r.verdict, ProofVerdict::AcceptedBounded);
        let wrong = text.replace("K a [a]F", "K a [b]F");
        let r = check_proof(&parse_proof(&wrong, None).unwrap());
        assert_eq!(r.verdict, ProofVerdict::Rejected { line: 1 });
    }
}
