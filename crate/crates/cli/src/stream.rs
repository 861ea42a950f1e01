//! Text format for update streams.
//!
//! One update per line: `<rel> <+|-> <v1> [<v2> ...] [* <mult>]`. Text after
//! `#` is a comment; blank lines are skipped; CRLF line ends are accepted.

use ivme_core::oracle::QuerySpec;
use ivme_core::{Mult, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Update {
    pub rel: usize,
    pub tuple: Vec<Value>,
    pub mult: Mult,
}

impl Update {
    pub fn new(rel: usize, tuple: impl Into<Vec<Value>>, mult: Mult) -> Self {
        Update { rel, tuple: tuple.into(), mult }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: unknown relation `{name}`")]
    UnknownRelation { line: usize, name: String },
    #[error("line {line}: relation {name} expects {expected} values, got {got}")]
    Arity { line: usize, name: String, expected: usize, got: usize },
    #[error("line {line}: zero multiplicity")]
    ZeroMult { line: usize },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// Relation names in query order.
pub fn relation_names(spec: QuerySpec) -> Vec<String> {
    match spec {
        QuerySpec::Triangle => vec!["R".into(), "S".into(), "T".into()],
        QuerySpec::TriangleSelfJoin => vec!["R".into()],
        QuerySpec::Path4 => vec!["R".into(), "S".into(), "T".into(), "U".into()],
        QuerySpec::Lw(n) => (1..=n).map(|j| format!("R{j}")).collect(),
    }
}

fn parse_int(line: usize, tok: &str, what: &str) -> Result<i64, ParseError> {
    tok.parse().map_err(|_| ParseError::Syntax { line, msg: format!("bad {what} `{tok}`") })
}

/// Parses one line (1-based `line` for messages); `None` for blank or
/// comment-only lines.
pub fn parse_line(line: usize, text: &str, spec: QuerySpec, names: &[String]) -> Result<Option<Update>, ParseError> {
    let body = text.split('#').next().unwrap_or("");
    let mut toks = body.split_whitespace();
    let Some(name) = toks.next() else { return Ok(None) };
    let rel = names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| ParseError::UnknownRelation { line, name: name.to_string() })?;
    let negate = match toks.next() {
        Some("+") => false,
        Some("-") => true,
        Some(t) => return Err(ParseError::Syntax { line, msg: format!("expected `+` or `-`, got `{t}`") }),
        None => return Err(ParseError::Syntax { line, msg: "missing sign".into() }),
    };
    let mut tuple = Vec::new();
    let mut mult: Mult = 1;
    while let Some(tok) = toks.next() {
        if tok == "*" {
            let m = toks.next().ok_or_else(|| ParseError::Syntax { line, msg: "missing multiplicity".into() })?;
            mult = parse_int(line, m, "multiplicity")?;
            if let Some(extra) = toks.next() {
                return Err(ParseError::Syntax { line, msg: format!("unexpected `{extra}` after multiplicity") });
            }
            break;
        }
        tuple.push(parse_int(line, tok, "value")?);
    }
    let expected = spec.arities()[rel];
    if tuple.len() != expected {
        return Err(ParseError::Arity { line, name: name.to_string(), expected, got: tuple.len() });
    }
    if mult == 0 {
        return Err(ParseError::ZeroMult { line });
    }
    if negate {
        mult = mult.checked_neg().ok_or_else(|| ParseError::Syntax { line, msg: "multiplicity overflow".into() })?;
    }
    Ok(Some(Update { rel, tuple, mult }))
}

pub fn parse_stream(text: &str, spec: QuerySpec) -> Result<Vec<Update>, ParseError> {
    let names = relation_names(spec);
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(u) = parse_line(i + 1, line, spec, &names)? {
            out.push(u);
        }
    }
    Ok(out)
}

pub fn format_update(spec: QuerySpec, u: &Update) -> String {
    let names = relation_names(spec);
    let mut s = format!("{} {}", names[u.rel], if u.mult < 0 { '-' } else { '+' });
    for v in &u.tuple {
        s.push_str(&format!(" {v}"));
    }
    let m = u.mult.unsigned_abs();
    if m != 1 {
        s.push_str(&format!(" * {m}"));
    }
    s
}

pub fn format_stream(spec: QuerySpec, updates: &[Update]) -> String {
    let mut s = String::new();
    for u in updates {
        s.push_str(&format_update(spec, u));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let t = QuerySpec::Triangle;
        assert_eq!(parse_stream("R + 1 2", t).unwrap(), vec![Update::new(0, [1, 2], 1)]);
        assert_eq!(parse_stream("S - 2 3 * 4", t).unwrap(), vec![Update::new(1, [2, 3], -4)]);
        assert!(matches!(parse_stream("T + 3", t), Err(ParseError::Arity { expected: 2, got: 1, .. })));
    }

    #[test]
    fn errors() {
        let t = QuerySpec::Triangle;
        assert!(matches!(parse_stream("X + 1 2", t), Err(ParseError::UnknownRelation { line: 1, .. })));
        assert!(matches!(parse_stream("\n\nR + 1 2 * 0", t), Err(ParseError::ZeroMult { line: 3 })));
        assert!(matches!(parse_stream("R ~ 1 2", t), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_stream("R + 1 x", t), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_stream("R + 1 2 * 3 4", t), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn comments_blank_and_crlf() {
        let s = "# header\r\n\r\nS + 1 2 # trailing\r\n  \nU - 7\r\n";
        assert_eq!(parse_stream(s, QuerySpec::Path4).unwrap(), vec![Update::new(1, [1, 2], 1), Update::new(3, [7], -1)]);
    }

    #[test]
    fn names_per_family() {
        assert_eq!(relation_names(QuerySpec::Lw(4)), ["R1", "R2", "R3", "R4"]);
        assert_eq!(parse_stream("R3 + 1 2 3", QuerySpec::Lw(4)).unwrap(), vec![Update::new(2, [1, 2, 3], 1)]);
        assert!(parse_stream("S + 1 2", QuerySpec::TriangleSelfJoin).is_err());
    }

    #[test]
    fn format_examples() {
        let t = QuerySpec::Triangle;
        assert_eq!(format_update(t, &Update::new(1, [2, 3], -4)), "S - 2 3 * 4");
        assert_eq!(format_update(t, &Update::new(0, [1, 2], 1)), "R + 1 2");
    }
}
