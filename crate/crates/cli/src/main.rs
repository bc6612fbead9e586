//! `sadg`: compatibility, splitting graphs and adaptive distinguishing test
//! cases for suspension automata.
//!
//! Exit codes: 0 success, 1 parse or usage error, 2 domain violation
//! (blocking state, nondeterminism, compatible pair), 3 strict-mode failure.

/// The statistics table: one row per automaton.
mod stats;

use std::fs;
use std::io::{self, Read};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use suspension_adg::automaton::{automaton_from_json, ParseError};
use suspension_adg::extraction::{adg_exists_oracle, OracleOutcome, ORACLE_STATE_LIMIT};
use suspension_adg::fixtures::{fixture, gen_random, gen_sn, Fixture, FixtureName, RandomParams};
use suspension_adg::splitting::{Injectivity, SplitPreference};
use suspension_adg::testcase::TestCaseAutomaton;
use suspension_adg::{
    build_splitting_graph, check_suspension, extract_report, pairwise_distinguisher,
    parse_automaton, serialize_automaton, Automaton, AutomatonError, CompatibilityTable, Format,
    SplitError, SplitPolicy, SuspensionAutomaton,
};

#[derive(Parser, Debug)]
#[command(
    name = "sadg",
    version,
    about = "Adaptive distinguishing test cases for suspension automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Args, Debug, Clone)]
struct Options {
    /// Output format; each subcommand accepts a subset.
    #[arg(long, value_enum, global = true)]
    format: Option<OutFormat>,
    /// Only perform injective splits; fail with exit code 3 otherwise.
    #[arg(long, global = true)]
    strict_injective: bool,
    /// Try input splits before output splits.
    #[arg(long, global = true)]
    prefer_input: bool,
    /// Maximum number of observations enumerated for leaf sizes.
    #[arg(long, default_value_t = 100_000, global = true)]
    obs_cap: usize,
    /// Run the exhaustive search for an adaptive distinguishing graph (small automata only).
    #[arg(long, global = true)]
    oracle: bool,
    /// Complete blocking states with a self-loop on this new output.
    #[arg(long, value_name = "NAME", global = true)]
    complete_quiescence: Option<String>,
    /// Seed for `gen random`.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum OutFormat {
    Json,
    Dot,
    Sa,
    Ccs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a file holds a suspension automaton.
    Validate { path: String },
    /// List the compatible state pairs.
    Compat { path: String },
    /// Build a complete splitting graph.
    Split { path: String },
    /// Extract an adaptive distinguishing test case and report on it.
    Adg { path: String },
    /// Build a test case distinguishing two states.
    Distinguish { path: String, q: String, q2: String },
    /// Print a generated automaton.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Print the statistics table for one or more automata.
    Stats {
        #[arg(required = true)]
        paths: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum GenKind {
    /// The family S_n.
    Sn { n: usize },
    /// A named example.
    Fixture { name: String },
    /// A seeded random suspension automaton.
    Random {
        #[arg(long, default_value_t = 6)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        inputs: usize,
        #[arg(long, default_value_t = 2)]
        outputs: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
    },
}

/// A failed command: message for standard error and the exit code.
#[derive(Debug)]
pub(crate) struct Failure {
    pub(crate) code: u8,
    pub(crate) message: String,
}

impl Failure {
    pub(crate) fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<SplitError> for Failure {
    fn from(e: SplitError) -> Self {
        let code = if matches!(e, SplitError::NoInjectiveSplit { .. }) {
            3
        } else {
            2
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let o = &cli.opts;
    match &cli.command {
        Command::Validate { path } => validate(path, o),
        Command::Compat { path } => {
            formats(o, &[OutFormat::Json])?;
            let s = load_suspension(path, o)?;
            let table = CompatibilityTable::new(&s);
            Ok(format!("{}\n", table.to_json(&s)))
        }
        Command::Split { path } => split(path, o),
        Command::Adg { path } => adg(path, o),
        Command::Distinguish { path, q, q2 } => distinguish(path, q, q2, o),
        Command::Gen { kind } => gen(kind, o),
        Command::Stats { paths } => stats::run(paths, o),
    }
}

/// Resolves `--format` against the formats a subcommand accepts; the first is the default.
fn formats(o: &Options, allowed: &[OutFormat]) -> Result<OutFormat, Failure> {
    match o.format {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(Failure::usage(format!(
            "format {} is not available here",
            f.to_possible_value()
                .map(|v| v.get_name().to_string())
                .unwrap_or_default()
        ))),
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::usage(format!("reading standard input: {e}")))?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::usage(format!("{path}: {e}")))
    }
}

fn parse_failure(path: &str, e: ParseError) -> Failure {
    let code = match e {
        ParseError::Automaton(AutomatonError::Nondeterministic { .. }) => 2,
        _ => 1,
    };
    Failure {
        code,
        message: format!("{path}: {e}"),
    }
}

pub(crate) fn load(path: &str) -> Result<Automaton, Failure> {
    let text = read_input(path)?;
    let parsed = if path.ends_with(".json") || text.trim_start().starts_with('{') {
        automaton_from_json(&text)
    } else {
        parse_automaton(&text)
    };
    parsed.map_err(|e| parse_failure(path, e))
}

pub(crate) fn load_suspension(path: &str, o: &Options) -> Result<SuspensionAutomaton, Failure> {
    suspension(path, load(path)?, o)
}

fn suspension(path: &str, a: Automaton, o: &Options) -> Result<SuspensionAutomaton, Failure> {
    let blocking = a.blocking_states();
    if blocking.is_empty() {
        return Ok(check_suspension(a).expect("no blocking states"));
    }
    match &o.complete_quiescence {
        Some(delta) => a
            .quiescence_complete(delta)
            .map_err(|e| Failure::usage(e.to_string())),
        None => Err(Failure::domain(format!(
            "{path}: blocking states {}",
            blocking.display(&a)
        ))),
    }
}

pub(crate) fn policy(o: &Options) -> SplitPolicy {
    SplitPolicy {
        preference: if o.prefer_input {
            SplitPreference::Input
        } else {
            SplitPreference::Output
        },
        injectivity: if o.strict_injective {
            Injectivity::Require
        } else {
            Injectivity::Ignore
        },
        ..SplitPolicy::default()
    }
}

fn sa_format(f: OutFormat) -> Format {
    match f {
        OutFormat::Json => Format::Json,
        OutFormat::Dot => Format::Dot,
        _ => Format::Sa,
    }
}

fn validate(path: &str, o: &Options) -> Outcome {
    let f = formats(o, &[OutFormat::Sa, OutFormat::Json, OutFormat::Dot])?;
    let a = load(path)?;
    let blocking = a.blocking_states();
    if blocking.is_empty() {
        let alpha = a.alphabet();
        return Ok(format!(
            "{} states, {} transitions, {} inputs, {} outputs\n",
            a.num_states(),
            a.num_transitions(),
            alpha.inputs().count(),
            alpha.outputs().count()
        ));
    }
    if o.complete_quiescence.is_some() {
        let s = suspension(path, a, o)?;
        return Ok(serialize_automaton(&s, sa_format(f)));
    }
    Err(Failure::domain(format!(
        "not a suspension automaton; blocking states {}",
        blocking.display(&a)
    )))
}

fn split(path: &str, o: &Options) -> Outcome {
    let f = formats(o, &[OutFormat::Json, OutFormat::Dot])?;
    let s = load_suspension(path, o)?;
    let table = CompatibilityTable::new(&s);
    let y = build_splitting_graph(&s, &table, policy(o))?;
    eprintln!("{} nodes", y.len());
    Ok(match f {
        OutFormat::Dot => y.to_dot(&s),
        _ => format!("{}\n", y.to_json(&s)),
    })
}

fn adg(path: &str, o: &Options) -> Outcome {
    let f = formats(o, &[OutFormat::Json, OutFormat::Ccs, OutFormat::Dot])?;
    let s = load_suspension(path, o)?;
    let table = CompatibilityTable::new(&s);
    let y = build_splitting_graph(&s, &table, policy(o))?;
    let choice = SplitPolicy::default().lca_choice;
    let report = extract_report(&s, &table, &y, choice, o.obs_cap)
        .map_err(|e| Failure::domain(e.to_string()))?;
    let mut oracle = serde_json::Value::Null;
    if o.oracle {
        if s.num_states() > ORACLE_STATE_LIMIT {
            return Err(Failure::usage(format!(
                "--oracle accepts at most {ORACLE_STATE_LIMIT} states, got {}",
                s.num_states()
            )));
        }
        let outcome = adg_exists_oracle(&s, &table, &s.all_states(), 1024)
            .map_err(|e| Failure::usage(e.to_string()))?;
        oracle = match &outcome {
            OracleOutcome::Found(t) => json!({ "exists": true, "term": t.to_string() }),
            OracleOutcome::NoneExists => json!({ "exists": false }),
            OracleOutcome::Inconclusive => json!({ "exists": null }),
        };
        if !report.missed.is_empty() {
            match outcome {
                OracleOutcome::NoneExists => {
                    eprintln!(
                        "warning: oracle confirms that no adaptive distinguishing graph exists"
                    )
                }
                OracleOutcome::Found(t) => {
                    eprintln!("warning: oracle found an adaptive distinguishing graph: {t}")
                }
                OracleOutcome::Inconclusive => eprintln!("warning: oracle search was inconclusive"),
            }
        }
    }
    Ok(match f {
        OutFormat::Ccs => format!("{}\n", report.term),
        OutFormat::Dot => term_dot(&report.term)?,
        _ => {
            let mut v = report.to_json(&s);
            if o.oracle {
                v["oracle"] = oracle;
            }
            format!(
                "{}\n",
                serde_json::to_string_pretty(&v).expect("serializable")
            )
        }
    })
}

fn term_dot(t: &suspension_adg::CcsTerm) -> Outcome {
    TestCaseAutomaton::new(&t.arena, t.root)
        .map(|a| a.to_dot())
        .map_err(|e| Failure::domain(e.to_string()))
}

fn distinguish(path: &str, q: &str, q2: &str, o: &Options) -> Outcome {
    let f = formats(o, &[OutFormat::Ccs, OutFormat::Json, OutFormat::Dot])?;
    let s = load_suspension(path, o)?;
    let state = |name: &str| {
        s.state(name)
            .ok_or_else(|| Failure::usage(format!("unknown state {name}")))
    };
    let (a, b) = (state(q)?, state(q2)?);
    let table = CompatibilityTable::new(&s);
    let t = pairwise_distinguisher(&s, &table, a, b).map_err(|e| Failure::domain(e.to_string()))?;
    Ok(match f {
        OutFormat::Dot => term_dot(&t)?,
        OutFormat::Json => {
            let a = TestCaseAutomaton::new(&t.arena, t.root)
                .map_err(|e| Failure::domain(e.to_string()))?;
            let mut v = a.to_json(&t.arena);
            v["term"] = json!(t.to_string());
            format!(
                "{}\n",
                serde_json::to_string_pretty(&v).expect("serializable")
            )
        }
        _ => format!("{t}\n"),
    })
}

fn gen(kind: &GenKind, o: &Options) -> Outcome {
    let f = formats(
        o,
        &[
            OutFormat::Sa,
            OutFormat::Json,
            OutFormat::Dot,
            OutFormat::Ccs,
        ],
    )?;
    let a = match kind {
        GenKind::Sn { n } => gen_sn(*n).map_err(|e| Failure::usage(e.to_string()))?,
        GenKind::Fixture { name } => {
            let name: FixtureName =
                name.parse()
                    .map_err(|e: suspension_adg::fixtures::GenError| {
                        let known: Vec<_> = FixtureName::ALL.iter().map(|f| f.as_str()).collect();
                        Failure::usage(format!("{e}; known fixtures: {}", known.join(", ")))
                    })?;
            match fixture(name) {
                Fixture::Automaton(a) => a,
                Fixture::Term(t) => {
                    return match f {
                        OutFormat::Dot => term_dot(&t),
                        _ => Ok(format!("{t}\n")),
                    }
                }
            }
        }
        GenKind::Random {
            states,
            inputs,
            outputs,
            density,
        } => gen_random(&RandomParams {
            states: *states,
            inputs: *inputs,
            outputs: *outputs,
            density: *density,
            seed: o.seed,
        })
        .map_err(|e| Failure::usage(e.to_string()))?,
    };
    if f == OutFormat::Ccs {
        return Err(Failure::usage(
            "format ccs is only available for term fixtures",
        ));
    }
    Ok(serialize_automaton(&a, sa_format(f)))
}
