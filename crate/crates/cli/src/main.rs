use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use modal_maxent::asymptotics::{finite_ratio, support_vocabulary};
use modal_maxent::check::{run_check, CaseSelection, CheckConfig};
use modal_maxent::kbfile::{parse_constraints, parse_kb, write_kb};
use modal_maxent::parser::parse_free;
use modal_maxent::{
    decompose, fit_weights, limit_ratio, limit_simplify, parse, trend, CountEngine, Error,
    ErrorClass, FitOptions, KnowledgeBase, LogicKind, Model, SimpleConjunction, Vocabulary,
    VERSION,
};

const EXIT_INPUT: u8 = 1;
const EXIT_INCONSISTENT: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "modal-maxent",
    version,
    about = "Maximum-entropy inference over K45, KD45 and S5 situations"
)]
struct Cli {
    /// Worker threads for the engine (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Add wall-clock timing to the result document.
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct KbSource {
    /// Knowledge-base file.
    #[arg(long)]
    kb: Option<PathBuf>,
    /// Logic (K45, KD45 or S5); with --props, stands for an empty knowledge base.
    #[arg(long)]
    logic: Option<LogicKind>,
    /// Space-separated proposition names.
    #[arg(long)]
    props: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact number of situations satisfying a formula.
    Count {
        #[command(flatten)]
        source: KbSource,
        #[arg(long, allow_hyphen_values = true)]
        formula: String,
        /// Also list the signed basic terms of the formula.
        #[arg(long)]
        breakdown: bool,
    },
    /// Probability of a formula, optionally conditioned on another.
    Query {
        #[command(flatten)]
        source: KbSource,
        #[arg(long, allow_hyphen_values = true)]
        formula: String,
        #[arg(long, allow_hyphen_values = true)]
        given: Option<String>,
        /// Also list the per-class counts and weights.
        #[arg(long)]
        breakdown: bool,
    },
    /// Log partition function of a knowledge base.
    Partition {
        #[command(flatten)]
        source: KbSource,
        #[arg(long)]
        breakdown: bool,
    },
    /// Fit weights reproducing target probabilities.
    Learn {
        #[arg(long)]
        constraints: PathBuf,
        #[arg(long)]
        logic: LogicKind,
        #[arg(long)]
        props: String,
    },
    /// Limit of N(B beta & C) / N(C) as fresh propositions are added.
    Limit {
        #[arg(long)]
        logic: LogicKind,
        #[arg(long, default_value = "true", allow_hyphen_values = true)]
        phi0: String,
        #[arg(long, default_value = "true", allow_hyphen_values = true)]
        psi: String,
        /// Bodies of the negated beliefs; repeat for several.
        #[arg(long, allow_hyphen_values = true)]
        negs: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
    },
    /// Cross-check the counting engine against situation enumeration.
    Check {
        /// Restrict to one logic (default: all three).
        #[arg(long)]
        logic: Option<LogicKind>,
        #[arg(long, default_value_t = 3)]
        max_omega: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random formulas per logic and vocabulary size, or `all-small`.
        #[arg(long, default_value = "500", value_parser = parse_cases)]
        cases: CaseSelection,
    },
    /// Probability of a formula as unused propositions are added.
    Trend {
        #[command(flatten)]
        source: KbSource,
        #[arg(long, allow_hyphen_values = true)]
        formula: String,
        /// Vocabulary sizes, space-separated.
        #[arg(long, default_value = "1 2 3")]
        sizes: String,
    },
}

fn parse_cases(s: &str) -> Result<CaseSelection, String> {
    if s == "all-small" {
        return Ok(CaseSelection::AllSmall);
    }
    s.parse()
        .map(CaseSelection::Random)
        .map_err(|_| format!("expected a number or `all-small`, got `{s}`"))
}

/// A failure together with the exit status it maps to.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.class() {
            ErrorClass::Input => EXIT_INPUT,
            ErrorClass::Inconsistent => EXIT_INCONSISTENT,
            ErrorClass::Cap => EXIT_CAP,
        };
        Failure {
            code,
            kind: error_kind(&e),
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        kind: "usage",
        message: message.into(),
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Syntax { .. } => "syntax",
        Error::UnknownProposition(_) => "unknown-proposition",
        Error::NestedBelief { .. } => "depth",
        Error::NotPropositional => "not-propositional",
        Error::InvalidVocabulary(_) => "vocabulary",
        Error::VocabularyCap { .. } | Error::OracleCap { .. } | Error::EntryCap { .. } => "cap",
        Error::InvalidWeight(_) => "weight",
        Error::InconsistentHardConstraints => "inconsistent",
        Error::ZeroProbabilityCondition => "zero-probability-condition",
        Error::InvalidTarget { .. } => "target",
        Error::Infeasible { .. } => "infeasible",
        Error::NotConverged { .. } => "not-converged",
        Error::InconsistentConjunction(_) => "inconsistent",
        Error::InvalidArgument(_) => "argument",
        Error::Format { .. } => "format",
    }
}

/// Finite floats as numbers, the rest as strings, since JSON has no infinities.
fn real(x: f64) -> Value {
    if x.is_finite() {
        // Adding zero turns -0.0 into 0.0.
        json!(x + 0.0)
    } else {
        json!(x.to_string())
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load_kb(source: &KbSource, inputs: &mut Map<String, Value>) -> Result<KnowledgeBase, Failure> {
    match (&source.kb, source.logic, &source.props) {
        (Some(path), None, None) => {
            inputs.insert("kb".into(), json!(path.display().to_string()));
            Ok(parse_kb(&read(path)?)?)
        }
        (None, Some(logic), Some(props)) => {
            inputs.insert("logic".into(), json!(logic.name()));
            inputs.insert("props".into(), json!(props));
            Ok(KnowledgeBase::new(logic, Vocabulary::parse(props)?))
        }
        (Some(_), _, _) => Err(usage("--kb cannot be combined with --logic or --props")),
        _ => Err(usage("give either --kb or both --logic and --props")),
    }
}

/// The parts of the result document that depend on the command.
struct Outcome {
    logic: Option<LogicKind>,
    vocab: Option<Vocabulary>,
    outputs: Value,
    code: u8,
}

impl Outcome {
    fn ok(kb_logic: LogicKind, vocab: &Vocabulary, outputs: Value) -> Self {
        Outcome {
            logic: Some(kb_logic),
            vocab: Some(vocab.clone()),
            outputs,
            code: 0,
        }
    }
}

fn run(command: &Command, inputs: &mut Map<String, Value>) -> Result<Outcome, Failure> {
    match command {
        Command::Count {
            source,
            formula,
            breakdown,
        } => {
            let kb = load_kb(source, inputs)?;
            inputs.insert("formula".into(), json!(formula));
            let f = parse(formula, kb.vocabulary())?;
            let engine = CountEngine::new(kb.logic(), kb.vocabulary().clone())?;
            let mut outputs = json!({
                "count": engine.count_formula(&f)?.to_string(),
                "total": engine.total().to_string(),
            });
            if *breakdown {
                let terms = decompose(&f)?
                    .terms
                    .iter()
                    .map(|(sign, t)| {
                        Ok(json!({
                            "sign": sign,
                            "phi0": t.phi0.to_string(),
                            "psi": t.psi.to_string(),
                            "count": engine.count_basic(t)?.to_string(),
                        }))
                    })
                    .collect::<Result<Vec<_>, Error>>()?;
                outputs["terms"] = json!(terms);
            }
            Ok(Outcome::ok(kb.logic(), kb.vocabulary(), outputs))
        }
        Command::Query {
            source,
            formula,
            given,
            breakdown,
        } => {
            let kb = load_kb(source, inputs)?;
            inputs.insert("formula".into(), json!(formula));
            let f = parse(formula, kb.vocabulary())?;
            let model = Model::new(&kb)?;
            let result = model.probability(&f, *breakdown)?;
            let mut outputs = Map::new();
            match given {
                Some(g) => {
                    inputs.insert("given".into(), json!(g));
                    let g = parse(g, kb.vocabulary())?;
                    outputs.insert("probability".into(), real(model.conditional(&f, &g)?));
                    outputs.insert("conditional".into(), json!(true));
                }
                None => {
                    outputs.insert("probability".into(), real(result.probability));
                    outputs.insert("conditional".into(), json!(false));
                }
            }
            outputs.insert("log_z".into(), real(result.log_z));
            if let Some(rows) = result.breakdown {
                outputs.insert("classes".into(), classes(&model, &rows));
            }
            Ok(Outcome::ok(
                kb.logic(),
                kb.vocabulary(),
                Value::Object(outputs),
            ))
        }
        Command::Partition { source, breakdown } => {
            let kb = load_kb(source, inputs)?;
            let model = Model::new(&kb)?;
            let log_z = model.log_partition()?;
            let mut outputs = json!({ "log_z": real(log_z) });
            if *breakdown {
                outputs["classes"] = classes(&model, &model.rows(None)?);
            }
            Ok(Outcome::ok(kb.logic(), kb.vocabulary(), outputs))
        }
        Command::Learn {
            constraints,
            logic,
            props,
        } => {
            inputs.insert(
                "constraints".into(),
                json!(constraints.display().to_string()),
            );
            inputs.insert("logic".into(), json!(logic.name()));
            inputs.insert("props".into(), json!(props));
            let vocab = Vocabulary::parse(props)?;
            let cs = parse_constraints(&read(constraints)?, &vocab)?;
            let report = fit_weights(&cs, *logic, &vocab, &FitOptions::default())?;
            let mut kb = KnowledgeBase::new(*logic, vocab.clone());
            let mut fitted = Vec::new();
            for ((c, w), a) in cs.iter().zip(&report.weights).zip(&report.achieved) {
                kb.push(modal_maxent::Weight::Finite(*w), c.formula.clone())?;
                fitted.push(json!({
                    "formula": c.formula.to_string(),
                    "target": real(c.target),
                    "weight": real(*w),
                    "achieved": real(*a),
                }));
            }
            Ok(Outcome::ok(
                *logic,
                &vocab,
                json!({
                    "weights": fitted,
                    "gradient_norm": real(report.gradient_norm),
                    "iterations": report.iterations,
                    "kb": write_kb(&kb),
                }),
            ))
        }
        Command::Limit {
            logic,
            phi0,
            psi,
            negs,
            beta,
        } => {
            inputs.insert("logic".into(), json!(logic.name()));
            inputs.insert("phi0".into(), json!(phi0));
            inputs.insert("psi".into(), json!(psi));
            inputs.insert("negs".into(), json!(negs));
            inputs.insert("beta".into(), json!(beta));
            let c = SimpleConjunction::new(
                parse_free(phi0)?,
                parse_free(psi)?,
                negs.iter()
                    .map(|n| parse_free(n))
                    .collect::<Result<_, _>>()?,
            );
            let beta = parse_free(beta)?;
            let verdict = limit_ratio(&c, &beta, *logic)?;
            let simplified = limit_simplify(&c, *logic)?;
            let support = support_vocabulary(&c, &[&beta])?;
            let mut ratios = Vec::new();
            for extra in 0..=3 {
                let r = finite_ratio(&c, &beta, *logic, extra)?;
                let value = r.to_f64().unwrap_or(f64::NAN);
                ratios.push(json!({
                    "omega": support.len() + extra,
                    "exact": r.to_string(),
                    "value": real(value),
                }));
            }
            Ok(Outcome::ok(
                *logic,
                &support,
                json!({
                    "limit": verdict.value,
                    "entailed": verdict.entailed,
                    "simplified": {
                        "phi0": simplified.phi0.to_string(),
                        "psi": simplified.psi.to_string(),
                    },
                    "finite_ratios": ratios,
                }),
            ))
        }
        Command::Check {
            logic,
            max_omega,
            seed,
            cases,
        } => {
            inputs.insert("logic".into(), json!(logic.map(LogicKind::name)));
            inputs.insert("max_omega".into(), json!(max_omega));
            inputs.insert("seed".into(), json!(seed));
            inputs.insert(
                "cases".into(),
                match cases {
                    CaseSelection::Random(n) => json!(n),
                    CaseSelection::AllSmall => json!("all-small"),
                },
            );
            let config = CheckConfig {
                logics: logic.map_or_else(|| LogicKind::ALL.to_vec(), |l| vec![l]),
                max_omega: *max_omega,
                seed: *seed,
                cases: cases.clone(),
                ..CheckConfig::default()
            };
            let report = run_check(&config)?;
            let first = report.first_counterexample.as_ref().map(|c| {
                json!({
                    "logic": c.logic.name(),
                    "omega": c.omega,
                    "formula": c.formula.to_string(),
                    "engine": c.engine.to_string(),
                    "oracle": c.oracle.to_string(),
                })
            });
            Ok(Outcome {
                logic: *logic,
                vocab: None,
                outputs: json!({
                    "cases": report.cases,
                    "mismatches": report.mismatches,
                    "passed": report.passed(),
                    "first_counterexample": first,
                }),
                code: if report.passed() { 0 } else { EXIT_MISMATCH },
            })
        }
        Command::Trend {
            source,
            formula,
            sizes,
        } => {
            let kb = load_kb(source, inputs)?;
            inputs.insert("formula".into(), json!(formula));
            inputs.insert("sizes".into(), json!(sizes));
            let f = parse(formula, kb.vocabulary())?;
            let sizes = sizes
                .split_whitespace()
                .map(|s| s.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| usage(format!("--sizes: {e}")))?;
            let values = trend(&kb, &f, &sizes)?;
            let rows: Vec<Value> = sizes
                .iter()
                .zip(values)
                .map(|(n, p)| json!({ "omega": n, "probability": real(p) }))
                .collect();
            Ok(Outcome::ok(
                kb.logic(),
                kb.vocabulary(),
                json!({ "trend": rows }),
            ))
        }
    }
}

fn classes(model: &Model<'_>, rows: &[modal_maxent::inference::TermRow]) -> Value {
    let formulas: Vec<String> = model
        .finite_entries()
        .iter()
        .map(|&i| model.knowledge_base().entries()[i].formula.to_string())
        .collect();
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            let mut row = json!({
                "t": (0..formulas.len()).map(|i| r.holds(i)).collect::<Vec<_>>(),
                "count": r.count.to_string(),
                "weight": real(r.weight),
            });
            if let Some(q) = &r.query_count {
                row["query_count"] = json!(q.to_string());
            }
            row
        })
        .collect();
    json!({ "formulas": formulas, "rows": rows })
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Count { .. } => "count",
        Command::Query { .. } => "query",
        Command::Partition { .. } => "partition",
        Command::Learn { .. } => "learn",
        Command::Limit { .. } => "limit",
        Command::Check { .. } => "check",
        Command::Trend { .. } => "trend",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("modal-maxent: cannot configure thread pool: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }

    let start = Instant::now();
    let mut inputs = Map::new();
    let result = run(&cli.command, &mut inputs);
    let elapsed = start.elapsed();

    let mut doc = Map::new();
    doc.insert("command".into(), json!(command_name(&cli.command)));
    doc.insert("inputs".into(), Value::Object(inputs));
    doc.insert("engine_version".into(), json!(VERSION));
    let code = match result {
        Ok(outcome) => {
            doc.insert("logic".into(), json!(outcome.logic.map(LogicKind::name)));
            if let Some(v) = &outcome.vocab {
                doc.insert("omega".into(), json!(v.len()));
                doc.insert("props".into(), json!(v.names()));
            }
            doc.insert("outputs".into(), outcome.outputs);
            doc.insert("status".into(), json!("ok"));
            if outcome.code == EXIT_MISMATCH {
                eprintln!("modal-maxent: engine and enumeration disagree");
            }
            outcome.code
        }
        Err(f) => {
            eprintln!("modal-maxent: {}", f.message);
            doc.insert("status".into(), json!("error"));
            doc.insert(
                "error".into(),
                json!({ "kind": f.kind, "message": f.message, "exit_code": f.code }),
            );
            f.code
        }
    };
    if cli.timing {
        doc.insert(
            "timing".into(),
            json!({ "elapsed_ms": elapsed.as_secs_f64() * 1e3 }),
        );
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&Value::Object(doc)).expect("documents serialize")
    );
    ExitCode::from(code)
}
