use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Automaton, AutomatonBuilder, AutomatonError};

/// Output formats supported by [`serialize_automaton`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Sa,
    Dot,
    Json,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("invalid JSON: {0}")]
    Json(String),
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens of one line with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(byte, tok)| (line[..byte].chars().count() + 1, tok))
        .collect()
}

/// Parses the line-based `.sa` text format.
///
/// ```text
/// inputs a
/// outputs x y
/// initial 1
/// trans 1 a 3
/// ```
pub fn parse_automaton(text: &str) -> Result<Automaton, ParseError> {
    let mut b = AutomatonBuilder::default();
    let mut seen_inputs = None;
    let mut seen_outputs = None;
    let mut seen_initial = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        let Some(&(col, directive)) = toks.first() else {
            continue;
        };
        let args = &toks[1..];
        let end_col = content.trim_end().chars().count() + 1;
        match directive {
            "inputs" | "outputs" => {
                let slot = if directive == "inputs" {
                    &mut seen_inputs
                } else {
                    &mut seen_outputs
                };
                if let Some(prev) = *slot {
                    return Err(syntax(
                        line_no,
                        col,
                        format!("duplicate `{directive}` directive (first on line {prev})"),
                    ));
                }
                *slot = Some(line_no);
                for &(_, name) in args {
                    if directive == "inputs" {
                        b.input(name);
                    } else {
                        b.output(name);
                    }
                }
            }
            "states" => {
                if args.is_empty() {
                    return Err(syntax(line_no, end_col, "expected at least one state name"));
                }
                for &(_, name) in args {
                    b.state(name);
                }
            }
            "initial" => {
                if let Some(prev) = seen_initial {
                    return Err(syntax(
                        line_no,
                        col,
                        format!("duplicate `initial` directive (first on line {prev})"),
                    ));
                }
                match args {
                    [(_, q)] => {
                        b.initial(*q);
                        seen_initial = Some(line_no);
                    }
                    [] => return Err(syntax(line_no, end_col, "expected a state name")),
                    [_, (c, _), ..] => return Err(syntax(line_no, *c, "unexpected token")),
                }
            }
            "trans" => match args {
                [(_, from), (_, label), (_, to)] => {
                    b.transition(*from, *label, *to);
                }
                [_, _, _, (c, _), ..] => return Err(syntax(line_no, *c, "unexpected token")),
                _ => {
                    return Err(syntax(
                        line_no,
                        end_col,
                        "expected `trans <state> <label> <state>`",
                    ))
                }
            },
            other => {
                return Err(syntax(line_no, col, format!("unknown directive `{other}`")));
            }
        }
    }
    let a = b.build()?;
    Ok(a)
}

/// JSON representation of an automaton.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub states: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub initial: String,
    pub transitions: Vec<TransitionJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionJson {
    pub from: String,
    pub label: String,
    pub to: String,
}

impl From<&Automaton> for AutomatonJson {
    fn from(a: &Automaton) -> Self {
        let alpha = a.alphabet();
        AutomatonJson {
            states: a.states().map(|q| a.state_name(q).to_string()).collect(),
            inputs: alpha.inputs().map(|l| alpha.name(l).to_string()).collect(),
            outputs: alpha.outputs().map(|l| alpha.name(l).to_string()).collect(),
            initial: a.state_name(a.initial()).to_string(),
            transitions: a
                .transitions()
                .map(|(q, l, t)| TransitionJson {
                    from: a.state_name(q).to_string(),
                    label: alpha.name(l).to_string(),
                    to: a.state_name(t).to_string(),
                })
                .collect(),
        }
    }
}

pub fn automaton_from_json(text: &str) -> Result<Automaton, ParseError> {
    let j: AutomatonJson =
        serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    let mut b = AutomatonBuilder::default();
    for i in &j.inputs {
        b.input(i.as_str());
    }
    for o in &j.outputs {
        b.output(o.as_str());
    }
    for s in &j.states {
        b.state(s.as_str());
    }
    b.initial(j.initial.as_str());
    for t in &j.transitions {
        b.transition(t.from.as_str(), t.label.as_str(), t.to.as_str());
    }
    Ok(b.build()?)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn serialize_automaton(a: &Automaton, format: Format) -> String {
    let alpha = a.alphabet();
    let mut out = String::new();
    match format {
        Format::Sa => {
            let join = |it: &mut dyn Iterator<Item = &str>| it.collect::<Vec<_>>().join(" ");
            let _ = writeln!(
                out,
                "inputs {}",
                join(&mut alpha.inputs().map(|l| alpha.name(l)))
            );
            let _ = writeln!(
                out,
                "outputs {}",
                join(&mut alpha.outputs().map(|l| alpha.name(l)))
            );
            let _ = writeln!(
                out,
                "states {}",
                join(&mut a.states().map(|q| a.state_name(q)))
            );
            let _ = writeln!(out, "initial {}", a.state_name(a.initial()));
            for (q, l, t) in a.transitions() {
                let _ = writeln!(
                    out,
                    "trans {} {} {}",
                    a.state_name(q),
                    alpha.name(l),
                    a.state_name(t)
                );
            }
        }
        Format::Dot => {
            out.push_str("digraph automaton {\n");
            out.push_str("  rankdir=LR;\n");
            out.push_str("  __start [shape=point, style=invis];\n");
            for q in a.states() {
                let _ = writeln!(out, "  \"{}\" [shape=circle];", dot_escape(a.state_name(q)));
            }
            let _ = writeln!(
                out,
                "  __start -> \"{}\";",
                dot_escape(a.state_name(a.initial()))
            );
            for (q, l, t) in a.transitions() {
                let suffix = if alpha.is_output(l) { '!' } else { '?' };
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [label=\"{}{}\"];",
                    dot_escape(a.state_name(q)),
                    dot_escape(a.state_name(t)),
                    dot_escape(alpha.name(l)),
                    suffix
                );
            }
            out.push_str("}\n");
        }
        Format::Json => {
            out = serde_json::to_string_pretty(&AutomatonJson::from(a))
                .expect("automaton JSON serialization cannot fail");
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const RUNNING: &str = "\
# running example
inputs a
outputs x y
initial 1
trans 1 x 1
trans 1 y 1
trans 1 a 3
trans 2 a 4
trans 2 x 4
trans 3 x 4
trans 4 y 2
";

    #[test]
    fn parses_running_example() {
        let a = parse_automaton(RUNNING).unwrap();
        assert_eq!(a.num_states(), 4);
        assert_eq!(a.num_transitions(), 7);
        assert_eq!(a.state_name(a.initial()), "1");
    }

    #[test]
    fn round_trip_is_fixpoint() {
        let a = parse_automaton(RUNNING).unwrap();
        let text = serialize_automaton(&a, Format::Sa);
        let b = parse_automaton(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(serialize_automaton(&b, Format::Sa), text);
        let json = serialize_automaton(&a, Format::Json);
        assert_eq!(automaton_from_json(&json).unwrap(), a);
    }

    #[test]
    fn transition_order_does_not_matter() {
        let mut lines: Vec<&str> = RUNNING.lines().collect();
        lines[4..].reverse();
        let shuffled = lines.join("\n");
        let a = parse_automaton(RUNNING).unwrap();
        let b = parse_automaton(&shuffled).unwrap();
        assert_eq!(
            serialize_automaton(&a, Format::Sa),
            serialize_automaton(&b, Format::Sa)
        );
    }

    #[test]
    fn reports_errors() {
        let nondet = "inputs a\noutputs x\ninitial 1\ntrans 1 a 2\ntrans 1 a 3\n";
        assert!(matches!(
            parse_automaton(nondet),
            Err(ParseError::Automaton(
                AutomatonError::Nondeterministic { .. }
            ))
        ));
        let no_out = "inputs a\noutputs\ninitial 1\ntrans 1 a 1\n";
        assert_eq!(
            parse_automaton(no_out),
            Err(ParseError::Automaton(AutomatonError::NoOutputs))
        );
        let missing = "inputs a\noutputs x\ntrans 1 a 1\n";
        assert_eq!(
            parse_automaton(missing),
            Err(ParseError::Automaton(AutomatonError::MissingInitial))
        );
        let unknown = "inputs a\noutputs x\ninitial 1\ntrans 1 b 1\n";
        assert_eq!(
            parse_automaton(unknown),
            Err(ParseError::Automaton(AutomatonError::UnknownLabel(
                "b".into()
            )))
        );
        let bad = "inputs a\noutputs x\ninitial 1\n  trans 1 a\n";
        assert_eq!(
            parse_automaton(bad),
            Err(ParseError::Syntax {
                line: 4,
                column: 12,
                message: "expected `trans <state> <label> <state>`".into()
            })
        );
        let directive = "inputs a\nfoo bar\n";
        assert!(matches!(
            parse_automaton(directive),
            Err(ParseError::Syntax {
                line: 2,
                column: 1,
                ..
            })
        ));
    }

    #[test]
    fn dot_marks_labels_and_initial() {
        let a = parse_automaton(RUNNING).unwrap();
        let dot = serialize_automaton(&a, Format::Dot);
        assert!(dot.contains("__start -> \"1\""));
        assert!(dot.contains("\"1\" -> \"3\" [label=\"a?\"]"));
        assert!(dot.contains("\"4\" -> \"2\" [label=\"y!\"]"));
        assert_eq!(dot.matches("[label=").count(), 7);
    }
}
