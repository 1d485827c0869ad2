//! Command-line front end: satisfiability, validity and entailment queries
//! against a knowledge base in the KLM logics C, CL, P and R, with optional
//! semantic-oracle cross-checking.
//!
//! Exit codes: 0 = sat / valid / entailed, 1 = the opposite, 2 = error,
//! 3 = oracle inconclusive (no model within bound on a logic where that is
//! not a proof).

mod output;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, ValueEnum};
use serde_json::json;

use klm_core::engine::{decide, DecideOptions, Engine, Verdict};
use klm_core::models::{oracle_sat, OracleAnswer};
use klm_core::parser::{parse_formula, parse_kb};
use klm_core::syntax::{Formula, Logic};
use output::{format_model, model_json, oracle_json, stats_json, trace_json, verdict_status, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LogicArg {
    C,
    Cl,
    P,
    R,
}

impl From<LogicArg> for Logic {
    fn from(l: LogicArg) -> Logic {
        match l {
            LogicArg::C => Logic::C,
            LogicArg::Cl => Logic::Cl,
            LogicArg::P => Logic::P,
            LogicArg::R => Logic::R,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Satisfiability of the knowledge base (plus --formula, if given).
    Sat,
    /// Validity of --formula: unsatisfiability of its negation.
    Valid,
    /// KB entailment of --query: unsatisfiability of KB plus the negated
    /// query.
    Entails,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    /// Optimized tableau engine.
    Default,
    /// Plain terminating calculus (cross-check variant).
    Naive,
    /// Bounded brute-force model search only.
    Oracle,
    /// Tableau plus oracle, reporting agreement.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputArg {
    Text,
    Json,
}

/// Tableau prover and model finder for the KLM conditional logics.
#[derive(Debug, Parser)]
#[command(name = "klm", version, about)]
struct Args {
    /// Logic to reason in.
    #[arg(long)]
    logic: LogicArg,
    /// What to decide.
    #[arg(long)]
    mode: Mode,
    /// Knowledge base file: one assertion per line, `#` comments.
    #[arg(long)]
    kb: Option<PathBuf>,
    /// Inline formula (conjoined with the KB in sat mode).
    #[arg(long)]
    formula: Option<String>,
    /// Query formula for entailment.
    #[arg(long)]
    query: Option<String>,
    #[arg(long, value_enum, default_value_t = EngineArg::Default)]
    engine: EngineArg,
    /// Point bound for the oracle's model search.
    #[arg(long, default_value_t = 4)]
    bound: usize,
    #[arg(long, value_enum, default_value_t = OutputArg::Text)]
    output: OutputArg,
    /// Record and print a closed-tableau trace on unsat.
    #[arg(long)]
    trace: bool,
}

struct Query {
    /// The set whose satisfiability decides the request.
    gamma: BTreeSet<Formula>,
}

fn build_query(args: &Args) -> Result<Query> {
    let mut kb_formulas: BTreeSet<Formula> = BTreeSet::new();
    if let Some(path) = &args.kb {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read KB file {}", path.display()))?;
        let kb = parse_kb(&text).map_err(|errs| {
            let lines: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
            anyhow!("{}: {}", path.display(), lines.join("; "))
        })?;
        kb_formulas.extend(kb.formulas());
    }
    let inline = args
        .formula
        .as_deref()
        .map(|s| parse_formula(s).map_err(|e| anyhow!("--formula: {e}")))
        .transpose()?;
    let query = args
        .query
        .as_deref()
        .map(|s| parse_formula(s).map_err(|e| anyhow!("--query: {e}")))
        .transpose()?;
    match args.mode {
        Mode::Sat => {
            let mut gamma = kb_formulas;
            if let Some(f) = inline {
                gamma.insert(f);
            }
            Ok(Query { gamma })
        }
        Mode::Valid => {
            let f = inline.or(query).ok_or_else(|| anyhow!("--mode valid requires --formula"))?;
            let mut gamma = BTreeSet::new();
            gamma.insert(f.neg());
            Ok(Query { gamma })
        }
        Mode::Entails => {
            let q = query.ok_or_else(|| anyhow!("--mode entails requires --query"))?;
            let mut gamma = kb_formulas;
            gamma.insert(q.neg());
            Ok(Query { gamma })
        }
    }
}

fn mode_answer(mode: Mode, sat: bool) -> (&'static str, bool) {
    match mode {
        Mode::Sat => ("satisfiable", sat),
        Mode::Valid => ("valid", !sat),
        Mode::Entails => ("entailed", !sat),
    }
}

fn run(args: &Args) -> Result<ExitCode> {
    if args.bound < 1 {
        bail!("--bound must be at least 1");
    }
    let logic: Logic = args.logic.into();
    let query = build_query(args)?;
    let format = match args.output {
        OutputArg::Text => Format::Text,
        OutputArg::Json => Format::Json,
    };
    let options = DecideOptions {
        engine: if args.engine == EngineArg::Naive { Engine::Naive } else { Engine::Default },
        record_trace: args.trace,
        ..DecideOptions::default()
    };

    let start = Instant::now();
    let tableau = match args.engine {
        EngineArg::Oracle => None,
        _ => Some(
            decide(&query.gamma, logic, &options).map_err(|violations| {
                let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                anyhow!("language violation: {}", msgs.join("; "))
            })?,
        ),
    };
    let oracle = match args.engine {
        EngineArg::Oracle | EngineArg::Both => Some(oracle_sat(&query.gamma, logic, args.bound)),
        _ => None,
    };
    let millis = start.elapsed().as_millis();

    // Cross-check before reporting.
    if let (Some(t), Some(o)) = (&tableau, &oracle) {
        let conflict = match (t.verdict.is_sat(), o) {
            (false, OracleAnswer::Sat { .. }) => true,
            (true, OracleAnswer::NoModelWithinBound { definitive }) => *definitive,
            _ => false,
        };
        if conflict {
            bail!(
                "engine disagreement: tableau says {}, oracle says {}",
                verdict_status(&t.verdict),
                match o {
                    OracleAnswer::Sat { .. } => "sat",
                    _ => "unsat",
                }
            );
        }
    }

    // Resolve the satisfiability answer.
    let sat: Option<bool> = match (&tableau, &oracle) {
        (Some(t), _) => Some(t.verdict.is_sat()),
        (None, Some(OracleAnswer::Sat { .. })) => Some(true),
        (None, Some(OracleAnswer::NoModelWithinBound { definitive: true })) => Some(false),
        (None, Some(OracleAnswer::NoModelWithinBound { definitive: false })) => None,
        (None, None) => unreachable!("some engine always runs"),
    };

    let (answer_name, answer) = match sat {
        Some(s) => {
            let (name, yes) = mode_answer(args.mode, s);
            (name, Some(yes))
        }
        None => {
            let (name, _) = mode_answer(args.mode, true);
            (name, None)
        }
    };

    match format {
        Format::Json => {
            let mut doc = json!({
                "logic": logic.name(),
                "mode": format!("{:?}", args.mode).to_lowercase(),
                "status": match sat {
                    Some(true) => "sat",
                    Some(false) => "unsat",
                    None => "inconclusive",
                },
                "question": answer_name,
                "answer": answer,
            });
            if let Some(t) = &tableau {
                doc["stats"] = stats_json(&t.stats, millis);
                if let Verdict::Sat { model: Some(m), point } = &t.verdict {
                    doc["model"] = model_json(m, *point);
                }
                if let Verdict::Unsat { trace: Some(tr) } = &t.verdict {
                    doc["trace"] = trace_json(tr);
                }
            }
            if let Some(o) = &oracle {
                doc["oracle"] = oracle_json(o);
                if let Some(t) = &tableau {
                    let agreement = match (t.verdict.is_sat(), o) {
                        (false, OracleAnswer::NoModelWithinBound { definitive: false }) => "unconfirmed",
                        _ => "confirmed",
                    };
                    doc["agreement"] = json!(agreement);
                }
            }
            println!("{doc}");
        }
        Format::Text => {
            match answer {
                Some(yes) => println!("{answer_name}: {}", if yes { "yes" } else { "no" }),
                None => println!("{answer_name}: inconclusive (no model within bound {})", args.bound),
            }
            if let Some(t) = &tableau {
                println!(
                    "tableau: {} ({} nodes{}, {} ms)",
                    verdict_status(&t.verdict),
                    t.stats.nodes,
                    if t.stats.labels > 0 { format!(", {} labels", t.stats.labels) } else { String::new() },
                    millis
                );
                if let Verdict::Sat { model: Some(m), point } = &t.verdict {
                    print!("model:\n{}", format_model(m, *point, Format::Text));
                }
                if let Verdict::Unsat { trace: Some(tr) } = &t.verdict {
                    println!("trace: {}", trace_json(tr));
                }
            }
            if let Some(o) = &oracle {
                match o {
                    OracleAnswer::Sat { model, point } => {
                        print!("oracle: sat\n{}", format_model(model, *point, Format::Text));
                    }
                    OracleAnswer::NoModelWithinBound { definitive } => {
                        println!(
                            "oracle: no model within bound {}{}",
                            args.bound,
                            if *definitive { " (definitive)" } else { "" }
                        );
                    }
                }
            }
        }
    }

    Ok(match answer {
        Some(true) => ExitCode::SUCCESS,
        Some(false) => ExitCode::from(1),
        None => ExitCode::from(3),
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
