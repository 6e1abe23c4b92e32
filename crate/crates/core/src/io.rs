//! Game and formula files.
//!
//! A game file is a JSON document:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "kind": "two_prover_one_round",
//!   "counts": { "q1": 2, "q2": 2, "a1": 2, "a2": 2 },
//!   "pi": [[[0, 0], "1/4"], [[0, 1], "0.25"]],
//!   "accept": [[0, 0, 0, 0], [0, 0, 1, 1]]
//! }
//! ```
//!
//! `pi` lists `(question tuple, weight)` pairs and `accept` lists accepting
//! `(question tuple, answer tuple)` concatenations. Omitted entries are 0.
//! Values are `"p/q"` strings, decimal strings or JSON numbers, all read
//! exactly. Question tuples per kind:
//!
//! | kind                   | counts                          | question tuple | extra fields                  |
//! |------------------------|---------------------------------|----------------|-------------------------------|
//! | `two_prover_one_round` | `q1`, `q2`, `a1`, `a2`          | `[q1, q2]`     | `accept_weights`, `labels`    |
//! | `multi_round`          | `questions`, `answers`, `rounds`| `[q_1..q_r]`   |                               |
//! | `pcp3`                 | `positions`, `alphabet`         | `[check]`      | `triples` (one per check)     |
//!
//! Instead of `accept`, a dense `predicate` array in table order may be given.
//! Two-prover predicates may hold fractional acceptance probabilities, listed
//! in `accept_weights` as `(tuple, value)` pairs.
//!
//! A formula file has a header `1in3 <n> <m>` followed by `m` clauses of
//! three nonzero signed 1-based variable indices. Blank lines and lines
//! starting with `#` or `c` are skipped.

use std::collections::BTreeSet;
use std::path::Path;

use num::{One, Zero};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{Labels, MultiRoundGame, PcpGame, TwoProverGame};
use crate::scalar::{parse_rational, Rational, Scalar};
use crate::transforms::{Literal, OneInThreeFormula};

pub const FORMAT_VERSION: u32 = 1;

/// A parsed game of any of the three kinds.
#[derive(Clone, Debug, PartialEq)]
pub enum GameDocument {
    TwoProver(TwoProverGame<Rational>),
    MultiRound(MultiRoundGame<Rational>),
    Pcp(PcpGame<Rational>),
}

impl GameDocument {
    pub fn kind(&self) -> &'static str {
        match self {
            GameDocument::TwoProver(_) => "two_prover_one_round",
            GameDocument::MultiRound(_) => "multi_round",
            GameDocument::Pcp(_) => "pcp3",
        }
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum Kind {
    TwoProverOneRound,
    MultiRound,
    Pcp3,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Counts {
    q1: Option<usize>,
    q2: Option<usize>,
    a1: Option<usize>,
    a2: Option<usize>,
    questions: Option<usize>,
    answers: Option<usize>,
    rounds: Option<usize>,
    positions: Option<usize>,
    alphabet: Option<usize>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Text(String),
    Json(serde_json::Number),
}

impl Number {
    fn to_rational(&self) -> Result<Rational> {
        let text = match self {
            Number::Text(t) => t.clone(),
            Number::Json(n) => n.to_string(),
        };
        parse_rational(&text).ok_or_else(|| Error::invalid(format!("`{text}` is not a number")))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGame {
    format_version: u32,
    kind: Kind,
    counts: Counts,
    #[serde(default)]
    triples: Vec<[usize; 3]>,
    #[serde(default)]
    pi: Vec<(Vec<usize>, Number)>,
    accept: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    accept_weights: Vec<(Vec<usize>, Number)>,
    predicate: Option<Vec<Number>>,
    #[serde(default)]
    labels: Labels,
}

fn need(value: Option<usize>, name: &str) -> Result<usize> {
    match value {
        Some(v) if v > 0 => Ok(v),
        Some(_) => Err(Error::invalid(format!("counts.{name} must be positive"))),
        None => Err(Error::invalid(format!("counts.{name} is missing"))),
    }
}

/// Flattens `tuple` against per-coordinate `bases`, big-endian.
fn flatten(tuple: &[usize], bases: &[usize], what: &str) -> Result<usize> {
    if tuple.len() != bases.len() {
        return Err(Error::invalid(format!("{what} {tuple:?} has {} coordinates, expected {}", tuple.len(), bases.len())));
    }
    let mut flat = 0;
    for (&x, &b) in tuple.iter().zip(bases) {
        if x >= b {
            return Err(Error::invalid(format!("{what} {tuple:?} is out of range")));
        }
        flat = flat * b + x;
    }
    Ok(flat)
}

fn fill_pi(raw: &[(Vec<usize>, Number)], bases: &[usize]) -> Result<Vec<Rational>> {
    let mut pi = vec![Rational::zero(); bases.iter().product()];
    let mut seen = BTreeSet::new();
    for (tuple, v) in raw {
        let i = flatten(tuple, bases, "pi entry")?;
        if !seen.insert(i) {
            return Err(Error::invalid(format!("pi entry {tuple:?} appears twice")));
        }
        pi[i] = v.to_rational()?;
    }
    Ok(pi)
}

/// Binary predicate table from `accept` or a dense `predicate`.
fn fill_binary(raw: &RawGame, bases: &[usize]) -> Result<Vec<u8>> {
    let size: usize = bases.iter().product();
    match (&raw.accept, &raw.predicate) {
        (Some(_), Some(_)) => Err(Error::invalid("give either accept or predicate, not both")),
        (_, Some(dense)) => {
            if dense.len() != size {
                return Err(Error::invalid(format!("predicate has {} entries, expected {size}", dense.len())));
            }
            dense
                .iter()
                .map(|v| {
                    let r = v.to_rational()?;
                    if r.is_zero() {
                        Ok(0)
                    } else if r.is_one() {
                        Ok(1)
                    } else {
                        Err(Error::invalid(format!("predicate entry {} is not 0 or 1", r.to_text())))
                    }
                })
                .collect()
        }
        (accept, None) => {
            let mut table = vec![0u8; size];
            for tuple in accept.iter().flatten() {
                table[flatten(tuple, bases, "accepting tuple")?] = 1;
            }
            Ok(table)
        }
    }
}

pub fn parse_game(text: &str) -> Result<GameDocument> {
    let raw: RawGame =
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
    if raw.format_version != FORMAT_VERSION {
        return Err(Error::invalid(format!("unsupported format_version {}", raw.format_version)));
    }
    let c = &raw.counts;
    let doc = match raw.kind {
        Kind::TwoProverOneRound => {
            if !raw.triples.is_empty() {
                return Err(Error::invalid("two_prover_one_round games take no triples"));
            }
            let counts = [need(c.q1, "q1")?, need(c.q2, "q2")?, need(c.a1, "a1")?, need(c.a2, "a2")?];
            let pi = fill_pi(&raw.pi, &counts[..2])?;
            let mut predicate: Vec<Rational> =
                fill_binary(&raw, &counts)?.into_iter().map(|b| Rational::from_usize(b as usize)).collect();
            for (tuple, v) in &raw.accept_weights {
                predicate[flatten(tuple, &counts, "accept_weights entry")?] = v.to_rational()?;
            }
            let g = TwoProverGame::new(counts, pi, predicate)?.with_labels(raw.labels);
            g.validate().into_result()?;
            GameDocument::TwoProver(g)
        }
        Kind::MultiRound => {
            let (q, a, r) = (need(c.questions, "questions")?, need(c.answers, "answers")?, need(c.rounds, "rounds")?);
            extras_unused(&raw)?;
            crate::limits::Limits::from_env()
                .check_table("multi-round predicate", crate::limits::checked_pow(q * a, r))?;
            let qb = vec![q; r];
            let mut full = qb.clone();
            full.extend(std::iter::repeat_n(a, r));
            let pi = fill_pi(&raw.pi, &qb)?;
            let predicate = fill_binary(&raw, &full)?;
            let g = MultiRoundGame::new(q, a, r, pi, predicate)?;
            g.validate().into_result()?;
            GameDocument::MultiRound(g)
        }
        Kind::Pcp3 => {
            let (n, a) = (need(c.positions, "positions")?, need(c.alphabet, "alphabet")?);
            if !raw.accept_weights.is_empty() || !raw.labels.is_empty() {
                return Err(Error::invalid("pcp3 games take neither accept_weights nor labels"));
            }
            let checks = raw.triples.len();
            let pi = fill_pi(&raw.pi, &[checks])?;
            let predicate = fill_binary(&raw, &[checks, a, a, a])?;
            let g = PcpGame::new(n, a, raw.triples.clone(), pi, predicate)?;
            g.validate().into_result()?;
            GameDocument::Pcp(g)
        }
    };
    Ok(doc)
}

fn extras_unused(raw: &RawGame) -> Result<()> {
    if !raw.triples.is_empty() || !raw.accept_weights.is_empty() || !raw.labels.is_empty() {
        return Err(Error::invalid("multi_round games take no triples, accept_weights or labels"));
    }
    Ok(())
}

fn text(r: &Rational) -> Value {
    Value::String(r.to_text())
}

fn sparse_pi(pi: &[Rational], bases: &[usize]) -> Vec<Value> {
    pi.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| json!([unflatten(i, bases), text(v)]))
        .collect()
}

fn unflatten(mut i: usize, bases: &[usize]) -> Vec<usize> {
    let mut out = vec![0; bases.len()];
    for (slot, &b) in out.iter_mut().zip(bases).rev() {
        *slot = i % b;
        i /= b;
    }
    out
}

fn accepting(table: &[u8], bases: &[usize]) -> Vec<Value> {
    table.iter().enumerate().filter(|(_, &v)| v == 1).map(|(i, _)| json!(unflatten(i, bases))).collect()
}

pub fn serialize_game(doc: &GameDocument) -> String {
    let mut fields: Vec<(&str, Value)> =
        vec![("format_version", json!(FORMAT_VERSION)), ("kind", json!(doc.kind()))];
    match doc {
        GameDocument::TwoProver(g) => {
            let counts = g.counts();
            let [q1, q2, a1, a2] = counts;
            fields.push(("counts", json!({ "q1": q1, "q2": q2, "a1": a1, "a2": a2 })));
            fields.push(("pi", Value::Array(sparse_pi(g.pi_table(), &counts[..2]))));
            let mut accept = Vec::new();
            let mut weights = Vec::new();
            for (i, v) in g.predicate_table().iter().enumerate() {
                if v.is_one() {
                    accept.push(json!(unflatten(i, &counts)));
                } else if !v.is_zero() {
                    weights.push(json!([unflatten(i, &counts), text(v)]));
                }
            }
            fields.push(("accept", Value::Array(accept)));
            if !weights.is_empty() {
                fields.push(("accept_weights", Value::Array(weights)));
            }
            if !g.labels.is_empty() {
                fields.push(("labels", serde_json::to_value(&g.labels).expect("labels serialize")));
            }
        }
        GameDocument::MultiRound(g) => {
            let (q, a, r) = (g.q_count(), g.a_count(), g.rounds());
            fields.push(("counts", json!({ "questions": q, "answers": a, "rounds": r })));
            let qb = vec![q; r];
            let mut full = qb.clone();
            full.extend(std::iter::repeat_n(a, r));
            fields.push(("pi", Value::Array(sparse_pi(g.pi_table(), &qb))));
            fields.push(("accept", Value::Array(accepting(g.predicate_table(), &full))));
        }
        GameDocument::Pcp(g) => {
            let a = g.alphabet();
            fields.push(("counts", json!({ "positions": g.positions(), "alphabet": a })));
            fields.push(("triples", Value::Array(g.triples().iter().map(|t| json!(t)).collect())));
            fields.push(("pi", Value::Array(sparse_pi(g.pi_table(), &[g.check_count()]))));
            fields.push(("accept", Value::Array(accepting(g.predicate_table(), &[g.check_count(), a, a, a]))));
        }
    }
    layout(&fields)
}

/// One top-level field per line and one array element per line.
fn layout(fields: &[(&str, Value)]) -> String {
    let mut out = String::from("{\n");
    for (i, (key, value)) in fields.iter().enumerate() {
        out.push_str(&format!("  {}: ", Value::String(key.to_string())));
        match value {
            Value::Array(items) if !items.is_empty() => {
                out.push_str("[\n");
                for (j, item) in items.iter().enumerate() {
                    let sep = if j + 1 < items.len() { "," } else { "" };
                    out.push_str(&format!("    {item}{sep}\n"));
                }
                out.push_str("  ]");
            }
            other => out.push_str(&other.to_string()),
        }
        out.push_str(if i + 1 < fields.len() { ",\n" } else { "\n" });
    }
    out.push_str("}\n");
    out
}

pub fn read_game(path: &Path) -> Result<GameDocument> {
    parse_game(&std::fs::read_to_string(path)?)
}

pub fn write_game(path: &Path, doc: &GameDocument) -> Result<()> {
    Ok(std::fs::write(path, serialize_game(doc))?)
}

pub fn parse_formula(text: &str) -> Result<OneInThreeFormula> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#') && !l.starts_with('c'));
    let (line, header) = lines.next().ok_or(Error::Parse { line: 1, message: "missing `1in3 n m` header".into() })?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let bad_header = || Error::Parse { line, message: format!("expected `1in3 <n> <m>`, found `{header}`") };
    if parts.len() != 3 || parts[0] != "1in3" {
        return Err(bad_header());
    }
    let variables: usize = parts[1].parse().map_err(|_| bad_header())?;
    let count: usize = parts[2].parse().map_err(|_| bad_header())?;
    let mut clauses = Vec::with_capacity(count);
    for (line, body) in lines {
        let lits: Vec<i64> = body
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| Error::Parse { line, message: format!("`{t}` is not an integer") }))
            .collect::<Result<_>>()?;
        if lits.len() != 3 {
            return Err(Error::Parse { line, message: format!("clause has {} literals, expected 3", lits.len()) });
        }
        let mut clause = [Literal { var: 0, positive: true }; 3];
        for (slot, &l) in clause.iter_mut().zip(&lits) {
            let var = l.unsigned_abs() as usize;
            if l == 0 || var > variables {
                return Err(Error::Parse { line, message: format!("literal {l} outside 1..={variables}") });
            }
            *slot = Literal { var: var - 1, positive: l > 0 };
        }
        if clause[0].var == clause[1].var || clause[0].var == clause[2].var || clause[1].var == clause[2].var {
            return Err(Error::Parse { line, message: "clause repeats a variable".into() });
        }
        clauses.push(clause);
    }
    if clauses.len() != count {
        return Err(Error::Parse { line: text.lines().count(), message: format!("header promises {count} clauses, found {}", clauses.len()) });
    }
    let f = OneInThreeFormula { variables, clauses };
    f.validate()?;
    Ok(f)
}

pub fn serialize_formula(f: &OneInThreeFormula) -> String {
    let mut out = format!("1in3 {} {}\n", f.variables, f.clauses.len());
    for c in &f.clauses {
        let lits: Vec<String> =
            c.iter().map(|l| if l.positive { format!("{}", l.var + 1) } else { format!("-{}", l.var + 1) }).collect();
        out.push_str(&lits.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn catalog_games_round_trip() {
        let docs = [
            GameDocument::TwoProver(catalog::chsh()),
            GameDocument::TwoProver(catalog::magic_square()),
            GameDocument::Pcp(catalog::tiny_1in3()),
        ];
        for doc in docs {
            let text = serialize_game(&doc);
            assert_eq!(parse_game(&text).unwrap(), doc, "{text}");
        }
    }

    #[test]
    fn rational_and_decimal_values_are_exact() {
        let text = r#"{"format_version": 1, "kind": "two_prover_one_round",
            "counts": {"q1": 1, "q2": 3, "a1": 1, "a2": 1},
            "pi": [[[0, 0], "1/3"], [[0, 1], 0.5], [[0, 2], "1/6"]], "accept": [[0, 1, 0, 0]]}"#;
        let GameDocument::TwoProver(g) = parse_game(text).unwrap() else { panic!() };
        assert_eq!(g.pi(0, 0), &Rational::from_ratio(1, 3));
        assert_eq!(g.pi(0, 1), &Rational::from_ratio(1, 2));
        assert_eq!(g.predicate(0, 1, 0, 0), &Rational::one());
        assert_eq!(g.predicate(0, 0, 0, 0), &Rational::zero());
    }

    #[test]
    fn normalization_error_names_the_sum() {
        let text = r#"{"format_version": 1, "kind": "two_prover_one_round",
            "counts": {"q1": 1, "q2": 2, "a1": 1, "a2": 1},
            "pi": [[[0, 0], 1], [[0, 1], 1]], "accept": []}"#;
        let err = parse_game(text).unwrap_err().to_string();
        assert!(err.contains("sums to 2"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let err = parse_game("{\n  \"format_version\": 1,\n  oops\n}").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn formula_round_trip_and_errors() {
        let f = catalog::tiny_1in3_formula();
        let text = serialize_formula(&f);
        assert_eq!(text, "1in3 3 2\n1 2 3\n-1 -2 -3\n");
        assert_eq!(parse_formula(&text).unwrap(), f);
        assert!(matches!(parse_formula("1in3 3 1\n1 2 4\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_formula("1in3 3 1\n1 -1 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_formula("1in3 3 2\n1 2 3\n"), Err(Error::Parse { .. })));
    }
}
