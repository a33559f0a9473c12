//! Text file format for automata and DOT export.
//!
//! ```text
//! kind: pdfa
//! alphabet: a b
//! states: q1 q2 q3
//! initial: q1
//! final: q3
//! trans: q1 a q2
//! ```
//!
//! `#` starts a comment that runs to the end of the line. Serialization writes
//! the header lines in the order above followed by one `trans:` line per
//! transition, sorted by (source id, symbol id, target id).

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::alphabet::Alphabet;
use crate::automaton::{Automaton, Kind, StateId};
use crate::error::{Error, Result};

struct Tok<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Tok<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

fn tokenize(line_no: usize, line: &str) -> Vec<Tok<'_>> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut toks = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                toks.push(Tok {
                    text: &body[s..i],
                    line: line_no,
                    column: body[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    toks
}

struct Line<'a> {
    key: Tok<'a>,
    args: Vec<Tok<'a>>,
}

/// Parses the text format, validating the declared kind.
pub fn parse_automaton(text: &str) -> Result<Automaton> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let mut toks = tokenize(i + 1, raw);
        if toks.is_empty() {
            continue;
        }
        let mut key = toks.remove(0);
        // `kind:dcsa` without a space is tolerated
        if let Some((k, rest)) = key.text.split_once(':') {
            if !rest.is_empty() {
                let col = key.column + k.chars().count() + 1;
                toks.insert(
                    0,
                    Tok {
                        text: rest,
                        line: key.line,
                        column: col,
                    },
                );
                key.text = &key.text[..k.len() + 1];
            }
        }
        if !key.text.ends_with(':') {
            return Err(key.err(format!("expected `key:`, found `{}`", key.text)));
        }
        lines.push(Line { key, args: toks });
    }

    let mut kind = None;
    let mut alphabet = None;
    let mut states: Option<Vec<String>> = None;
    let mut initial_tok = None;
    let mut final_toks = Vec::new();
    let mut trans_lines = Vec::new();

    for line in &lines {
        let once = |seen: bool| -> Result<()> {
            if seen {
                Err(line.key.err(format!("duplicate `{}` line", line.key.text)))
            } else {
                Ok(())
            }
        };
        match line.key.text {
            "kind:" => {
                once(kind.is_some())?;
                let [tok] = line.args.as_slice() else {
                    return Err(line.key.err("`kind:` takes exactly one value"));
                };
                kind = Some(match tok.text {
                    "dcsa" => Kind::Dcsa,
                    "pdfa" => Kind::Pdfa,
                    "nfa" => Kind::Nfa,
                    other => return Err(tok.err(format!("unknown kind `{other}`"))),
                });
            }
            "alphabet:" => {
                once(alphabet.is_some())?;
                let names: Vec<&str> = line.args.iter().map(|t| t.text).collect();
                alphabet = Some(Alphabet::new(names).map_err(|e| line.key.err(e.to_string()))?);
            }
            "states:" => {
                once(states.is_some())?;
                if line.args.is_empty() {
                    return Err(line.key.err("at least one state is required"));
                }
                states = Some(line.args.iter().map(|t| t.text.to_string()).collect());
            }
            "initial:" => {
                once(initial_tok.is_some())?;
                let [tok] = line.args.as_slice() else {
                    return Err(line.key.err("`initial:` takes exactly one state"));
                };
                initial_tok = Some(tok);
            }
            "final:" => final_toks.extend(line.args.iter()),
            "trans:" => {
                if line.args.len() != 3 {
                    return Err(line.key.err("`trans:` takes source, symbol and target"));
                }
                trans_lines.push(line);
            }
            other => return Err(line.key.err(format!("unknown key `{other}`"))),
        }
    }

    let missing = |what: &str| Error::Syntax {
        line: lines.last().map_or(1, |l| l.key.line),
        column: 1,
        message: format!("missing `{what}` line"),
    };
    let kind = kind.ok_or_else(|| missing("kind:"))?;
    let alphabet = alphabet.ok_or_else(|| missing("alphabet:"))?;
    let states = states.ok_or_else(|| missing("states:"))?;

    let ids: HashMap<&str, StateId> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let state = |t: &Tok| -> Result<StateId> {
        ids.get(t.text)
            .copied()
            .ok_or_else(|| Error::DanglingState(t.text.to_string()))
    };
    let initial = initial_tok.map(state).transpose()?;
    let finals = final_toks.iter().map(|t| state(t)).collect::<Result<Vec<_>>>()?;
    let mut trans = Vec::with_capacity(trans_lines.len());
    for line in trans_lines {
        let p = state(&line.args[0])?;
        let x = alphabet
            .symbol(line.args[1].text)
            .ok_or_else(|| line.args[1].err(format!("unknown symbol `{}`", line.args[1].text)))?;
        let q = state(&line.args[2])?;
        trans.push((p, x, q));
    }
    Automaton::new(kind, alphabet, states, initial, finals, trans)
}

impl FromStr for Automaton {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_automaton(s)
    }
}

impl fmt::Display for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind: {}", self.kind())?;
        writeln!(f, "alphabet: {}", self.alphabet())?;
        writeln!(f, "states: {}", self.state_names().join(" "))?;
        if let Some(q) = self.initial() {
            writeln!(f, "initial: {}", self.state_name(q))?;
        }
        let finals: Vec<&str> = self.finals().iter().map(|q| self.state_name(q)).collect();
        if !finals.is_empty() {
            writeln!(f, "final: {}", finals.join(" "))?;
        }
        for (p, x, q) in self.transitions() {
            writeln!(
                f,
                "trans: {} {} {}",
                self.state_name(p),
                self.alphabet().name(x),
                self.state_name(q)
            )?;
        }
        Ok(())
    }
}

/// Graphviz rendering; parallel edges are merged into one labelled edge.
pub fn to_dot(aut: &Automaton) -> String {
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n");
    for q in aut.states() {
        let shape = if aut.is_final(q) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  \"{}\" [shape={shape}];", aut.state_name(q));
    }
    if let Some(q0) = aut.initial() {
        let _ = writeln!(out, "  __start [shape=point];\n  __start -> \"{}\";", aut.state_name(q0));
    }
    for p in aut.states() {
        for q in aut.states() {
            let labels: Vec<&str> = aut
                .alphabet()
                .symbols()
                .filter(|&x| aut.successors(p, x).contains(&q))
                .map(|x| aut.alphabet().name(x))
                .collect();
            if !labels.is_empty() {
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [label=\"{}\"];",
                    aut.state_name(p),
                    aut.state_name(q),
                    labels.join(",")
                );
            }
        }
    }
    out.push_str("}\n");
    out
}
