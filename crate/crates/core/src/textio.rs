//! Text formats: the canonical DFA file format, DOT export, and the
//! Abbadingo-style sample format.

use crate::dfa::{Alphabet, Dfa};
use crate::sample::LabeledSample;
use crate::{Error, Result};
use std::fmt::Write as _;

/// Renders a DFA in the canonical key/value format:
///
/// ```text
/// alphabet a b
/// states 4
/// start 0
/// accepting 0 3
/// trans 0 a 1
/// ```
///
/// Output is canonical: accepting states ascending, transitions sorted by
/// state then symbol, one trailing newline. `deserialize_dfa` inverts it
/// exactly.
pub fn serialize_dfa(dfa: &Dfa) -> String {
    let mut out = String::new();
    out.push_str("alphabet");
    for c in dfa.alphabet().symbols() {
        let _ = write!(out, " {c}");
    }
    out.push('\n');
    let _ = writeln!(out, "states {}", dfa.state_count());
    let _ = writeln!(out, "start {}", dfa.start());
    out.push_str("accepting");
    for q in dfa.accepting_states() {
        let _ = write!(out, " {q}");
    }
    out.push('\n');
    for (q, c, t) in dfa.transitions() {
        let _ = writeln!(out, "trans {q} {c} {t}");
    }
    out
}

/// Parses the canonical DFA format. Errors carry the 1-based line number of
/// the offending line.
pub fn deserialize_dfa(text: &str) -> Result<Dfa> {
    let mut alphabet: Option<Alphabet> = None;
    let mut states: Option<usize> = None;
    let mut start: Option<usize> = None;
    let mut accepting: Option<Vec<usize>> = None;
    let mut transitions: Vec<(usize, char, usize)> = Vec::new();
    let mut trans_lines: Vec<usize> = Vec::new();

    let parse_usize = |tok: &str, line: usize| -> Result<usize> {
        tok.parse::<usize>().map_err(|_| Error::Parse {
            line,
            message: format!("expected a non-negative integer, got {tok:?}"),
        })
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let key = tokens.next().unwrap();
        let rest: Vec<&str> = tokens.collect();
        match key {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "duplicate alphabet line".into(),
                    });
                }
                let mut symbols = Vec::new();
                for tok in &rest {
                    let mut chars = tok.chars();
                    let c = chars.next().ok_or(Error::Parse {
                        line: line_no,
                        message: "empty symbol token".into(),
                    })?;
                    if chars.next().is_some() {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!("symbol {tok:?} must be a single character"),
                        });
                    }
                    symbols.push(c);
                }
                alphabet = Some(Alphabet::new(symbols)?);
            }
            "states" => {
                if states.is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "duplicate states line".into(),
                    });
                }
                if rest.len() != 1 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "states takes exactly one value".into(),
                    });
                }
                states = Some(parse_usize(rest[0], line_no)?);
            }
            "start" => {
                if start.is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "duplicate start line".into(),
                    });
                }
                if rest.len() != 1 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "start takes exactly one value".into(),
                    });
                }
                start = Some(parse_usize(rest[0], line_no)?);
            }
            "accepting" => {
                if accepting.is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "duplicate accepting line".into(),
                    });
                }
                let mut acc = Vec::new();
                for tok in &rest {
                    acc.push(parse_usize(tok, line_no)?);
                }
                accepting = Some(acc);
            }
            "trans" => {
                if rest.len() != 3 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "trans takes exactly three values: state symbol target".into(),
                    });
                }
                let q = parse_usize(rest[0], line_no)?;
                let mut chars = rest[1].chars();
                let c = chars.next().ok_or(Error::Parse {
                    line: line_no,
                    message: "empty symbol token".into(),
                })?;
                if chars.next().is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("symbol {:?} must be a single character", rest[1]),
                    });
                }
                let t = parse_usize(rest[2], line_no)?;
                transitions.push((q, c, t));
                trans_lines.push(line_no);
            }
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unknown key {other:?}"),
                });
            }
        }
    }

    let alphabet = alphabet.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        message: "missing alphabet line".into(),
    })?;
    let states = states.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        message: "missing states line".into(),
    })?;
    let start = start.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        message: "missing start line".into(),
    })?;
    let accepting = accepting.unwrap_or_default();

    // line-attributed validation for transitions
    for (k, &(q, c, t)) in transitions.iter().enumerate() {
        let line = trans_lines[k];
        if q >= states || t >= states {
            return Err(Error::Parse {
                line,
                message: format!("transition ({q}, '{c}', {t}) out of range for {states} states"),
            });
        }
        if alphabet.index_of(c).is_none() {
            return Err(Error::Parse {
                line,
                message: format!("symbol '{c}' not in alphabet"),
            });
        }
        if transitions[..k].iter().any(|&(q2, c2, _)| q2 == q && c2 == c) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate transition from state {q} on '{c}'"),
            });
        }
    }
    Dfa::new(alphabet, states, start, accepting, transitions)
}

/// Renders a DFA in Graphviz DOT. Accepting states are drawn with doubled
/// circles and an arrow from a point-shaped pseudo-node marks the start
/// state. Only accepting states get explicit node declarations; the rest
/// inherit the circle default.
pub fn to_dot(dfa: &Dfa) -> String {
    let mut out = String::new();
    out.push_str("digraph dfa {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle];\n");
    out.push_str("  start [shape=point, label=\"\"];\n");
    let _ = writeln!(out, "  start -> {};", dfa.start());
    for q in dfa.accepting_states() {
        let _ = writeln!(out, "  {q} [shape=doublecircle];");
    }
    for (q, c, t) in dfa.transitions() {
        let _ = writeln!(out, "  {q} -> {t} [label=\"{c}\"];");
    }
    out.push_str("}\n");
    out
}

/// Parses an Abbadingo-style sample file:
///
/// ```text
/// 3 2
/// 1 2 a b
/// 1 0
/// 0 1 b
/// ```
///
/// Header: string count and nominal alphabet size. Each following line is a
/// label (1 positive, 0 negative), a length, and that many single-character
/// symbols. The alphabet is inferred from the symbols that occur; the header
/// size must not understate it.
pub fn parse_sample(text: &str) -> Result<LabeledSample> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header line".into(),
    })?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(Error::Parse {
            line: header_line,
            message: "header must be: <string count> <alphabet size>".into(),
        });
    }
    let count: usize = toks[0].parse().map_err(|_| Error::Parse {
        line: header_line,
        message: format!("bad string count {:?}", toks[0]),
    })?;
    let declared_alphabet: usize = toks[1].parse().map_err(|_| Error::Parse {
        line: header_line,
        message: format!("bad alphabet size {:?}", toks[1]),
    })?;

    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    let mut seen = 0usize;
    for (line_no, line) in lines {
        if seen == count {
            return Err(Error::Parse {
                line: line_no,
                message: format!("more than the declared {count} strings"),
            });
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 2 {
            return Err(Error::Parse {
                line: line_no,
                message: "expected: <label> <length> <symbols...>".into(),
            });
        }
        let label = match toks[0] {
            "1" => true,
            "0" => false,
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("label must be 0 or 1, got {other:?}"),
                });
            }
        };
        let len: usize = toks[1].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad length {:?}", toks[1]),
        })?;
        if toks.len() - 2 != len {
            return Err(Error::Parse {
                line: line_no,
                message: format!("declared length {len} but found {} symbols", toks.len() - 2),
            });
        }
        let mut s = String::new();
        for tok in &toks[2..] {
            let mut chars = tok.chars();
            let c = chars.next().ok_or(Error::Parse {
                line: line_no,
                message: "empty symbol token".into(),
            })?;
            if chars.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("symbol {tok:?} must be a single character"),
                });
            }
            s.push(c);
        }
        if label {
            positives.push(s);
        } else {
            negatives.push(s);
        }
        seen += 1;
    }
    if seen != count {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            message: format!("header declared {count} strings but found {seen}"),
        });
    }
    let sample = LabeledSample::new(positives, negatives)?;
    if sample.alphabet().len() > declared_alphabet {
        return Err(Error::Parse {
            line: header_line,
            message: format!(
                "header declares {declared_alphabet} symbols but {} occur",
                sample.alphabet().len()
            ),
        });
    }
    Ok(sample)
}

/// Renders a sample in the Abbadingo-style format, positives first, both in
/// shortlex order.
pub fn write_sample(sample: &LabeledSample) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", sample.len(), sample.alphabet().len());
    for (label, strings) in [(1, sample.positives()), (0, sample.negatives())] {
        for s in strings {
            let _ = write!(out, "{label} {}", s.chars().count());
            for c in s.chars() {
                let _ = write!(out, " {c}");
            }
            out.push('\n');
        }
    }
    out
}
