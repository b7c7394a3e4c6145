//! Model files look like
//!
//! ```text
//! model m
//! things a b c
//! worlds w
//! pred inItself: a b
//! pred intellectPerceivesAsEssence: (a,a) (a,b)
//! pred expressesEternalEssence: *
//! ```
//!
//! Predicates without a `pred` line are false everywhere.

use std::collections::BTreeSet;
use std::fmt::Write;

use thiserror::Error;

use crate::logic::{all_tuples, FiniteModel, ModelError, Signature, Sort};
use crate::registry::ethica_signature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("{label} is not a {sort} of this model")]
    OutOfUniverse { label: String, sort: Sort },
    #[error("duplicate {sort} label {label}")]
    DuplicateLabel { sort: Sort, label: String },
    #[error("predicate {pred} takes {expected} arguments, tuple has {found}")]
    Arity {
        pred: String,
        expected: usize,
        found: usize,
    },
    #[error("predicate {0} is given twice")]
    DuplicatePredicate(String),
}

fn is_label(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        kind: ParseErrorKind::Syntax(msg.into()),
    }
}

fn labels(line: usize, words: &[&str], sort: Sort) -> Result<Vec<String>, ParseError> {
    let mut seen = BTreeSet::new();
    for w in words {
        if !is_label(w) {
            return Err(syntax(line, format!("`{w}` is not a valid label")));
        }
        if !seen.insert(*w) {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::DuplicateLabel {
                    sort,
                    label: w.to_string(),
                },
            });
        }
    }
    Ok(words.iter().map(|w| w.to_string()).collect())
}

/// Splits the tuple list of a `pred` line into tuples of labels. Whitespace
/// inside parentheses is tolerated.
fn tuples(line: usize, text: &str) -> Result<Vec<Vec<String>>, ParseError> {
    let mut out = Vec::new();
    let mut rest = text.trim_start();
    while !rest.is_empty() {
        if let Some(inner) = rest.strip_prefix('(') {
            let close = inner
                .find(')')
                .ok_or_else(|| syntax(line, "unclosed `(`"))?;
            let parts: Vec<String> = inner[..close]
                .split(',')
                .map(|p| p.trim().to_string())
                .collect();
            if parts.len() < 2 {
                return Err(syntax(
                    line,
                    "a parenthesised tuple needs at least two labels",
                ));
            }
            if let Some(bad) = parts.iter().find(|p| !is_label(p)) {
                return Err(syntax(line, format!("`{bad}` is not a valid label")));
            }
            out.push(parts);
            rest = inner[close + 1..].trim_start();
        } else {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            let word = &rest[..end];
            if !is_label(word) {
                return Err(syntax(
                    line,
                    format!("`{word}` is not a valid label or tuple"),
                ));
            }
            out.push(vec![word.to_string()]);
            rest = rest[end..].trim_start();
        }
    }
    Ok(out)
}

/// Parses a model against the Ethica signature.
pub fn parse_model(text: &str) -> Result<FiniteModel, ParseError> {
    parse_model_with(text, ethica_signature())
}

pub fn parse_model_with(text: &str, sig: &Signature) -> Result<FiniteModel, ParseError> {
    let mut name: Option<String> = None;
    let mut model: Option<FiniteModel> = None;
    let mut things: Option<(usize, Vec<String>)> = None;
    let mut worlds: Option<Vec<String>> = None;
    let mut seen_preds = BTreeSet::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content
            .split_once(char::is_whitespace)
            .map(|(k, r)| (k, r.trim()))
            .unwrap_or((content, ""));
        match keyword {
            "model" => {
                if name.is_some() {
                    return Err(syntax(line, "`model` given twice"));
                }
                if !is_label(rest) {
                    return Err(syntax(line, "expected `model <name>`"));
                }
                name = Some(rest.to_string());
            }
            _ if name.is_none() => {
                return Err(syntax(line, "the file must start with `model <name>`"))
            }
            "things" | "worlds" => {
                if model.is_some() {
                    return Err(syntax(
                        line,
                        format!("`{keyword}` must come before any `pred` line"),
                    ));
                }
                let words: Vec<&str> = rest.split_whitespace().collect();
                if keyword == "things" {
                    if things.is_some() {
                        return Err(syntax(line, "`things` given twice"));
                    }
                    if words.is_empty() {
                        return Err(syntax(line, "`things` needs at least one label"));
                    }
                    things = Some((line, labels(line, &words, Sort::Thing)?));
                } else {
                    if worlds.is_some() {
                        return Err(syntax(line, "`worlds` given twice"));
                    }
                    worlds = Some(labels(line, &words, Sort::World)?);
                }
            }
            "pred" => {
                let m = match model.as_mut() {
                    Some(m) => m,
                    None => {
                        let (_, ts) = things.clone().ok_or_else(|| {
                            syntax(line, "`things` must come before any `pred` line")
                        })?;
                        model.insert(
                            FiniteModel::new(
                                name.clone().unwrap_or_default(),
                                ts,
                                worlds.clone().unwrap_or_default(),
                            )
                            .map_err(|e| syntax(line, e.to_string()))?,
                        )
                    }
                };
                parse_pred(line, rest, sig, m, &mut seen_preds)?;
            }
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }

    if name.is_none() {
        return Err(syntax(last_line.max(1), "missing `model <name>` line"));
    }
    match model {
        Some(m) => Ok(m),
        None => {
            let (line, ts) =
                things.ok_or_else(|| syntax(last_line.max(1), "missing `things` line"))?;
            FiniteModel::new(name.unwrap_or_default(), ts, worlds.unwrap_or_default())
                .map_err(|e| syntax(line, e.to_string()))
        }
    }
}

fn parse_pred(
    line: usize,
    rest: &str,
    sig: &Signature,
    m: &mut FiniteModel,
    seen: &mut BTreeSet<String>,
) -> Result<(), ParseError> {
    let (pred, body) = rest
        .split_once(':')
        .ok_or_else(|| syntax(line, "expected `pred <name>: <tuples>`"))?;
    let pred = pred.trim();
    if !is_label(pred) {
        return Err(syntax(
            line,
            format!("`{pred}` is not a valid predicate name"),
        ));
    }
    let err = |kind| ParseError { line, kind };
    let decl = sig
        .get(pred)
        .ok_or_else(|| err(ParseErrorKind::UnknownPredicate(pred.to_string())))?;
    if !seen.insert(pred.to_string()) {
        return Err(err(ParseErrorKind::DuplicatePredicate(pred.to_string())));
    }
    let body = body.trim();
    if body == "*" {
        return m
            .set_full_table(sig, pred)
            .map_err(|e| syntax(line, e.to_string()));
    }
    let ts = tuples(line, body)?;
    for t in &ts {
        if t.len() != decl.arity() {
            return Err(err(ParseErrorKind::Arity {
                pred: pred.to_string(),
                expected: decl.arity(),
                found: t.len(),
            }));
        }
    }
    m.set_table(sig, pred, ts).map_err(|e| match e {
        ModelError::OutOfUniverse { label, sort, .. } => {
            err(ParseErrorKind::OutOfUniverse { label, sort })
        }
        other => syntax(line, other.to_string()),
    })
}

/// Renders a model in the DSL. Full tables are written as `*`; predicates
/// with empty tables are omitted.
pub fn serialize_model(model: &FiniteModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {}", model.name);
    let _ = writeln!(out, "things {}", model.things().join(" "));
    if !model.worlds().is_empty() {
        let _ = writeln!(out, "worlds {}", model.worlds().join(" "));
    }
    for (pred, table) in model.tables() {
        let sizes: Vec<usize> = table.sorts.iter().map(|&s| model.size(s)).collect();
        if table.tuples.len() == all_tuples(&sizes).len() {
            let _ = writeln!(out, "pred {pred}: *");
            continue;
        }
        let rendered: Vec<String> = model
            .labelled_tuples(pred)
            .into_iter()
            .map(|t| match t.as_slice() {
                [one] => one.to_string(),
                many => format!("({})", many.join(",")),
            })
            .collect();
        let _ = writeln!(out, "pred {pred}: {}", rendered.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let m = parse_model("model m\nthings x\n").unwrap();
        assert_eq!(m.things(), ["x"]);
        assert!(m.worlds().is_empty());
        assert!(m.tables().is_empty());
    }

    #[test]
    fn unknown_predicate() {
        let e = parse_model("model m\nthings x\npred nosuch: x").unwrap_err();
        assert_eq!(e.line, 3);
        assert_eq!(e.kind, ParseErrorKind::UnknownPredicate("nosuch".into()));
    }

    #[test]
    fn out_of_universe_and_duplicates() {
        let e = parse_model("model m\nthings x\npred inItself: y").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::OutOfUniverse { .. }));
        let e = parse_model("model m\nthings x y x").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(matches!(e.kind, ParseErrorKind::DuplicateLabel { .. }));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let e = parse_model("# header\nmodel m\n\nthings x\npred inItself x").unwrap_err();
        assert_eq!(e.line, 5);
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(parse_model("things x").unwrap_err().line, 1);
        assert!(parse_model("model m\n").is_err());
        let e = parse_model("model m\nthings x\npred limitedBy: (x,x) x").unwrap_err();
        assert!(matches!(
            e.kind,
            ParseErrorKind::Arity {
                expected: 2,
                found: 1,
                ..
            }
        ));
    }

    #[test]
    fn full_tables_and_worlds() {
        let m = parse_model("model m\nthings x y\nworlds u v # two worlds\npred existsAt: *\npred causeAt: (x, y, v)")
            .unwrap();
        assert!(m.is_full("existsAt"));
        assert!(m.holds("causeAt", &[0, 1, 1]));
        let text = serialize_model(&m);
        assert_eq!(
            text,
            "model m\nthings x y\nworlds u v\npred causeAt: (x,y,v)\npred existsAt: *\n"
        );
        assert_eq!(parse_model(&text).unwrap(), m);
    }
}
