//! Command-line front end. Exit status: 0 when the property holds or the
//! proof is accepted, 1 when it is refuted or rejected, 2 on bad input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use aalogic::proof::LineStatus;
use aalogic::validity::{check, default_vocabulary, ModelFamily, ValidityMode};
use aalogic::{
    check_proof, instantiate_axiom, load_model, load_proof, parse_formula, parse_word,
    pretty_formula, random_model, update_model, views, AxiomSchema, Bindings, EpistemicModel,
    EvalContext, ProofVerdict, Signature, ValidityQuery, Verdict,
};

#[derive(Parser)]
#[command(
    name = "aalogic",
    version,
    about = "Asynchronous announcement logic toolkit"
)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print versioned JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Vocab {
    /// Agent names, comma separated. Ignored when a model is given.
    #[arg(long, default_value = "a,b", value_delimiter = ',')]
    agents: Vec<String>,
    /// Atom names, comma separated. Ignored when a model is given.
    #[arg(long, default_value = "p,q", value_delimiter = ',')]
    atoms: Vec<String>,
}

impl Vocab {
    fn signature(&self) -> Result<Signature, String> {
        let a: Vec<&str> = self
            .agents
            .iter()
            .map(String::as_str)
            .filter(|s| !s.is_empty())
            .collect();
        let p: Vec<&str> = self
            .atoms
            .iter()
            .map(String::as_str)
            .filter(|s| !s.is_empty())
            .collect();
        Signature::from_names(&a, &p).map_err(|e| e.to_string())
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    Epsilon,
    Star,
}

#[derive(Subcommand)]
enum Command {
    /// Decide `s, w |= formula` in a model file.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long, default_value = "eps")]
        word: String,
        formula: String,
    },
    /// Executability of a word, and the updated model.
    Exec {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "eps")]
        word: String,
        /// Only ask about this state.
        #[arg(long)]
        state: Option<String>,
        /// Also print the updated model.
        #[arg(long)]
        show_model: bool,
    },
    /// The histories an agent considers possible after a word.
    Views {
        word: String,
        agent: String,
        #[command(flatten)]
        vocab: Vocab,
    },
    /// Whether a word is a history.
    History {
        word: String,
        #[command(flatten)]
        vocab: Vocab,
    },
    /// Bounded search for a counterexample.
    Validity {
        formula: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Star)]
        mode: ModeArg,
        /// Model files; without any, random models are drawn.
        #[arg(long)]
        model: Vec<PathBuf>,
        /// Number of random models.
        #[arg(long, default_value_t = 20)]
        random: usize,
        #[arg(long, default_value_t = 4)]
        max_states: usize,
        /// Longest history searched.
        #[arg(long, default_value_t = 3)]
        bound: usize,
        /// Announcement vocabulary, comma separated. Defaults to the
        /// subformulas of the formula and T.
        #[arg(long)]
        vocab: Option<String>,
        /// Write a counterexample model here.
        #[arg(long)]
        save_counterexample: Option<PathBuf>,
        #[command(flatten)]
        sig: Vocab,
    },
    /// Instantiate an axiom schema, or list the schemas.
    Axiom {
        /// Schema name such as Dist! or emptyK; omit to list.
        schema: Option<String>,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        psi: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        agent: Option<String>,
        #[arg(long)]
        atom: Option<String>,
        #[command(flatten)]
        vocab: Vocab,
    },
    /// Check a proof file.
    CheckProof {
        path: PathBuf,
        /// Treat bounded uses of R* as success.
        #[arg(long)]
        allow_bounded: bool,
    },
    /// Print a random model file.
    GenModel {
        #[arg(long, default_value_t = 3)]
        states: usize,
        #[command(flatten)]
        vocab: Vocab,
    },
}

type Outcome = Result<bool, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}

fn read_model(path: &PathBuf) -> Result<EpistemicModel, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))?;
    load_model(&text).map_err(|e| format!("{}: {}", path.display(), e))
}

fn state_index(m: &EpistemicModel, name: &str) -> Result<usize, String> {
    m.state_index(name)
        .ok_or_else(|| format!("no state `{}` in the model", name))
}

fn emit(json: bool, value: serde_json::Value, text: String) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("json values serialize")
        );
    } else {
        print!("{}", text);
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Eval {
            model,
            state,
            word,
            formula,
        } => {
            let m = read_model(model)?;
            let sig = m.signature().clone();
            let s = state_index(&m, state)?;
            let w = parse_word(word, &sig).map_err(|e| format!("word: {}", e))?;
            let f = parse_formula(formula, &sig).map_err(|e| format!("formula: {}", e))?;
            let mut ctx = EvalContext::new(m);
            let exec = ctx.executable(s, &w).map_err(|e| e.to_string())?;
            let sat = ctx.eval(s, &w, &f).map_err(|e| e.to_string())?;
            let mut text = format!(
                "{} at {}: {}\n",
                w,
                state,
                if exec { "executable" } else { "not executable" }
            );
            text += &format!(
                "{}, {} {} {}\n",
                state,
                w,
                if sat { "|=" } else { "|/=" },
                pretty_formula(&f, Some(&sig))
            );
            emit(
                cli.json,
                json!({"format": 1, "state": state, "word": w.to_string(), "formula": f.to_string(),
                       "executable": exec, "satisfied": sat}),
                text,
            );
            Ok(sat)
        }
        Command::Exec {
            model,
            word,
            state,
            show_model,
        } => {
            let m = read_model(model)?;
            let sig = m.signature().clone();
            let w = parse_word(word, &sig).map_err(|e| format!("word: {}", e))?;
            let only = state.as_deref().map(|n| state_index(&m, n)).transpose()?;
            let mut ctx = EvalContext::new(m.clone());
            let keep = ctx.surviving_states(&w).map_err(|e| e.to_string())?;
            let names: Vec<&str> = keep.iter().map(|&s| m.state_name(s)).collect();
            let updated = if *show_model && !keep.is_empty() {
                Some(update_model(&mut ctx, &w).map_err(|e| e.to_string())?)
            } else {
                None
            };
            let ok = match only {
                Some(s) => keep.contains(&s),
                None => !keep.is_empty(),
            };
            let mut text = format!(
                "{} is {}\n",
                w,
                if w.is_history() {
                    "a history"
                } else {
                    "not a history"
                }
            );
            text += &format!(
                "executable at: {}\n",
                if names.is_empty() {
                    "no state".to_string()
                } else {
                    names.join(" ")
                }
            );
            if let Some(u) = &updated {
                text += &u.to_toml();
            }
            emit(
                cli.json,
                json!({"format": 1, "word": w.to_string(), "history": w.is_history(), "executable_at": names,
                       "model": updated.map(|u| u.to_document())}),
                text,
            );
            Ok(ok)
        }
        Command::Views { word, agent, vocab } => {
            let sig = vocab.signature()?;
            let w = parse_word(word, &sig).map_err(|e| format!("word: {}", e))?;
            let a = sig
                .agent(agent)
                .ok_or_else(|| format!("`{}` is not an agent", agent))?;
            if !w.is_history() {
                return Err(format!("{} is not a history", w));
            }
            let vs: Vec<String> = views(&w, &a, sig.agents())
                .iter()
                .map(|v| v.to_string())
                .collect();
            let text = vs.iter().map(|v| format!("{}\n", v)).collect();
            emit(
                cli.json,
                json!({"format": 1, "word": w.to_string(), "agent": agent, "views": vs}),
                text,
            );
            Ok(true)
        }
        Command::History { word, vocab } => {
            let sig = vocab.signature()?;
            let w = parse_word(word, &sig).map_err(|e| format!("word: {}", e))?;
            let h = w.is_history();
            let reads: Vec<(String, usize)> = sig
                .agents()
                .iter()
                .map(|a| (a.name().to_string(), w.receptions(a)))
                .collect();
            let mut text = format!(
                "{} is {}\n",
                w,
                if h { "a history" } else { "not a history" }
            );
            text += &format!("announcements: {}\n", w.announcements());
            for (a, n) in &reads {
                text += &format!("received by {}: {}\n", a, n);
            }
            emit(
                cli.json,
                json!({"format": 1, "word": w.to_string(), "history": h, "announcements": w.announcements(),
                       "receptions": reads.into_iter().collect::<std::collections::BTreeMap<_, _>>()}),
                text,
            );
            Ok(h)
        }
        Command::Validity {
            formula,
            mode,
            model,
            random,
            max_states,
            bound,
            vocab,
            save_counterexample,
            sig,
        } => {
            let models = model
                .iter()
                .map(read_model)
                .collect::<Result<Vec<_>, _>>()?;
            let sig = match models.first() {
                Some(m) => m.signature().clone(),
                None => sig.signature()?,
            };
            if models.iter().any(|m| m.signature() != &sig) {
                return Err("model files declare different signatures".into());
            }
            let f = parse_formula(formula, &sig).map_err(|e| format!("formula: {}", e))?;
            let family = if models.is_empty() {
                ModelFamily::Random {
                    count: *random,
                    max_states: *max_states,
                    seed: cli.seed,
                }
            } else {
                ModelFamily::Explicit(models)
            };
            let mode = match mode {
                ModeArg::Epsilon => ValidityMode::Epsilon,
                ModeArg::Star => ValidityMode::Star,
            };
            let mut q = ValidityQuery::new(f.clone(), sig.clone(), family, mode).with_bound(*bound);
            if let Some(v) = vocab {
                let fs = v
                    .split(',')
                    .map(|t| parse_formula(t.trim(), &sig).map_err(|e| format!("vocab: {}", e)))
                    .collect::<Result<Vec<_>, _>>()?;
                q = q.with_vocabulary(fs);
            } else if mode == ValidityMode::Star {
                q = q.with_vocabulary(default_vocabulary(&f));
            }
            let report = check(&q);
            let path = match (&report.verdict, save_counterexample) {
                (Verdict::Counterexample { model, .. }, Some(p)) => {
                    std::fs::write(p, model.to_toml())
                        .map_err(|e| format!("{}: {}", p.display(), e))?;
                    p.display().to_string()
                }
                (&Verdict::Counterexample { model_index, .. }, None) if !model.is_empty() => {
                    model[model_index].display().to_string()
                }
                _ => "MODEL.toml".to_string(),
            };
            let doc = report.to_document(&f, &path);
            let mut text = format!(
                "{}: {} ({} models, {} checks, bound {})\n",
                match mode {
                    ValidityMode::Epsilon => "epsilon",
                    ValidityMode::Star => "star",
                },
                doc.verdict,
                doc.checked_models,
                doc.checked_histories,
                doc.bound
            );
            if let (Some(c), Verdict::Counterexample { model: m, .. }) =
                (&doc.counterexample, &report.verdict)
            {
                text += &format!(
                    "fails at state {} of model {} after {}\n",
                    c.state, c.model_index, c.word
                );
                text += &format!("replay: {}\n", c.replay);
                if path == "MODEL.toml" {
                    text += &format!("# MODEL.toml\n{}", m.to_toml());
                }
            }
            emit(
                cli.json,
                serde_json::to_value(&doc).expect("reports serialize"),
                text,
            );
            Ok(report.is_valid())
        }
        Command::Axiom {
            schema,
            phi,
            psi,
            alpha,
            agent,
            atom,
            vocab,
        } => {
            let Some(name) = schema else {
                let rows: Vec<_> = AxiomSchema::ALL
                    .iter()
                    .map(|s| json!({"name": s.name(), "shape": s.shape()}))
                    .collect();
                let text = AxiomSchema::ALL
                    .iter()
                    .map(|s| format!("{:8} {}\n", s.name(), s.shape()))
                    .collect();
                emit(cli.json, json!({"format": 1, "schemas": rows}), text);
                return Ok(true);
            };
            let sig = vocab.signature()?;
            let schema =
                AxiomSchema::from_name(name).ok_or_else(|| format!("unknown schema `{}`", name))?;
            let formula = |t: &Option<String>| {
                t.as_deref()
                    .map(|t| parse_formula(t, &sig).map_err(|e| e.to_string()))
                    .transpose()
            };
            let b = Bindings {
                phi: formula(phi)?,
                psi: formula(psi)?,
                alpha: alpha
                    .as_deref()
                    .map(|t| parse_word(t, &sig).map_err(|e| e.to_string()))
                    .transpose()?,
                agent: agent
                    .as_deref()
                    .map(|t| {
                        sig.agent(t)
                            .ok_or_else(|| format!("`{}` is not an agent", t))
                    })
                    .transpose()?,
                atom: atom
                    .as_deref()
                    .map(|t| sig.atom(t).ok_or_else(|| format!("`{}` is not an atom", t)))
                    .transpose()?,
            };
            let f = instantiate_axiom(&sig, schema, &b).map_err(|e| e.to_string())?;
            let pretty = pretty_formula(&f, Some(&sig));
            emit(
                cli.json,
                json!({"format": 1, "schema": schema.name(), "instance": pretty, "primitive": f.to_string()}),
                format!("{}\n", pretty),
            );
            Ok(true)
        }
        Command::CheckProof {
            path,
            allow_bounded,
        } => {
            let proof = load_proof(path).map_err(|e| e.to_string())?;
            let report = check_proof(&proof);
            let mut text = String::new();
            for l in &report.lines {
                match &l.status {
                    LineStatus::Accepted => text += &format!("{:>4}  ok\n", l.index),
                    LineStatus::AcceptedBounded => {
                        text += &format!("{:>4}  ok up to the bound\n", l.index)
                    }
                    LineStatus::Rejected(why) => {
                        text += &format!("{:>4}  REJECTED: {}\n", l.index, why)
                    }
                }
            }
            let ok = match report.verdict {
                ProofVerdict::Accepted => true,
                ProofVerdict::AcceptedBounded => *allow_bounded,
                ProofVerdict::FromHypotheses | ProofVerdict::Rejected { .. } => false,
            };
            text += &match report.verdict {
                ProofVerdict::Accepted => "accepted\n".to_string(),
                ProofVerdict::AcceptedBounded if ok => "accepted up to the R* bound\n".to_string(),
                ProofVerdict::AcceptedBounded => {
                    "not accepted: a step uses R* only up to a bound (pass --allow-bounded to accept)\n".to_string()
                }
                ProofVerdict::FromHypotheses => "not accepted: the proof rests on hypotheses\n".to_string(),
                ProofVerdict::Rejected { line } => format!("rejected at line {}\n", line),
            };
            emit(
                cli.json,
                serde_json::to_value(report.to_document(&proof.signature))
                    .expect("reports serialize"),
                text,
            );
            Ok(ok)
        }
        Command::GenModel { states, vocab } => {
            if *states == 0 {
                return Err("a model needs at least one state".into());
            }
            let m = random_model(*states, &vocab.signature()?, cli.seed);
            emit(
                cli.json,
                serde_json::to_value(m.to_document()).expect("models serialize"),
                m.to_toml(),
            );
            Ok(true)
        }
    }
}
