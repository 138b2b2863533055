//! Text syntax for cirquents, interpretations, metaselections and proof
//! scripts.
//!
//! Cirquent grammar (whitespace between tokens is ignored):
//!
//! ```text
//! cirquent ::= impl
//! impl     ::= or ( "->" impl )?
//! or       ::= and ( "|" digits? and )*
//! and      ::= unary ( "&" unary )*
//! unary    ::= "~" unary | "(" cirquent ")" | atom
//! atom     ::= letter ( letter | digit | "_" )*
//! digits   ::= [1-9][0-9]*
//! ```
//!
//! A bare `|` and the disjunction hidden in `A -> B` receive fresh singleton
//! IDs above every explicit ID in the text. Negation over compound text is
//! pushed to the literals, except that negating text containing an explicit
//! `|k` is rejected: it would silently dissolve cluster `k`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::calculus::{Annotation, ProofEntry, ProofScript, RuleHint, RuleKind};
use crate::cirquent::{Cirquent, ClusterId, ClusterTable};
use crate::semantics::{Interpretation, Metaselection, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("cluster ID at offset {pos} must be positive")]
    NonpositiveClusterId { pos: usize },
    #[error("negation at offset {pos} covers an explicitly indexed disjunction")]
    NegationOverIndexedDisjunction { pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("malformed entry {0:?}")]
    Syntax(String),
    #[error("duplicate key {0:?}")]
    DuplicateKey(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ProofSyntaxError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug)]
enum Expr {
    Atom(String),
    Not(usize, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Option<ClusterId>, Box<Expr>, Box<Expr>),
    Implies(usize, Box<Expr>, Box<Expr>),
}

impl Expr {
    fn max_explicit_id(&self) -> u32 {
        match self {
            Expr::Atom(_) => 0,
            Expr::Not(_, e) => e.max_explicit_id(),
            Expr::And(l, r) | Expr::Implies(_, l, r) => {
                l.max_explicit_id().max(r.max_explicit_id())
            }
            Expr::Or(id, l, r) => id
                .map_or(0, ClusterId::get)
                .max(l.max_explicit_id())
                .max(r.max_explicit_id()),
        }
    }

    fn has_explicit_id(&self) -> bool {
        self.max_explicit_id() > 0
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn at_arrow(&mut self) -> bool {
        self.peek() == Some(b'-') && self.src.get(self.pos + 1) == Some(&b'>')
    }

    fn implication(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.disjunction()?;
        if self.at_arrow() {
            let pos = self.pos;
            self.pos += 2;
            let rhs = self.implication()?;
            return Ok(Expr::Implies(pos, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            let id = self.cluster_index()?;
            let rhs = self.conjunction()?;
            lhs = Expr::Or(id, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn cluster_index(&mut self) -> Result<Option<ClusterId>, ParseError> {
        if !self.peek().is_some_and(|b| b.is_ascii_digit()) {
            return Ok(None);
        }
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ASCII digits");
        if digits.bytes().all(|b| b == b'0') {
            return Err(ParseError::NonpositiveClusterId { pos: start });
        }
        if digits.starts_with('0') {
            return Err(ParseError::Syntax {
                pos: start,
                message: "cluster ID has a leading zero".into(),
            });
        }
        match digits.parse::<u32>() {
            Ok(n) => Ok(ClusterId::new(n)),
            Err(_) => Err(ParseError::Syntax {
                pos: start,
                message: "cluster ID out of range".into(),
            }),
        }
    }

    fn conjunction(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'~') => {
                let pos = self.pos;
                self.pos += 1;
                Ok(Expr::Not(pos, Box::new(self.unary()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.implication()?;
                if self.peek() != Some(b')') {
                    return self.error("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b) if b.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ASCII atom");
                Ok(Expr::Atom(name.to_owned()))
            }
            Some(_) => self.error("expected a literal, '~' or '('"),
            None => self.error("unexpected end of input"),
        }
    }
}

struct Lowering {
    next_fresh: u32,
}

impl Lowering {
    fn fresh(&mut self) -> ClusterId {
        let id = ClusterId::new(self.next_fresh).expect("fresh IDs start above zero");
        self.next_fresh += 1;
        id
    }

    /// Lowers to NNF. Fresh IDs are handed out in textual order.
    fn lower(&mut self, e: &Expr, negated: bool) -> Result<Cirquent, ParseError> {
        Ok(match e {
            Expr::Atom(name) => Cirquent::lit(name.clone(), !negated),
            Expr::Not(pos, inner) => {
                if inner.has_explicit_id() {
                    return Err(ParseError::NegationOverIndexedDisjunction { pos: *pos });
                }
                self.lower(inner, !negated)?
            }
            Expr::And(l, r) if !negated => {
                Cirquent::and(self.lower(l, false)?, self.lower(r, false)?)
            }
            Expr::And(l, r) => {
                let l = self.lower(l, true)?;
                let id = self.fresh();
                let r = self.lower(r, true)?;
                Cirquent::Or(id, Box::new(l), Box::new(r))
            }
            Expr::Or(id, l, r) if !negated => {
                let l = self.lower(l, false)?;
                let id = match id {
                    Some(id) => *id,
                    None => self.fresh(),
                };
                let r = self.lower(r, false)?;
                Cirquent::Or(id, Box::new(l), Box::new(r))
            }
            // Explicit IDs never reach here: the enclosing negation was rejected.
            Expr::Or(_, l, r) => Cirquent::and(self.lower(l, true)?, self.lower(r, true)?),
            Expr::Implies(pos, l, r) => {
                if l.has_explicit_id() {
                    return Err(ParseError::NegationOverIndexedDisjunction { pos: *pos });
                }
                if negated {
                    Cirquent::and(self.lower(l, false)?, self.lower(r, true)?)
                } else {
                    let l = self.lower(l, true)?;
                    let id = self.fresh();
                    let r = self.lower(r, false)?;
                    Cirquent::Or(id, Box::new(l), Box::new(r))
                }
            }
        })
    }
}

/// Parses a cirquent from the start of `text`, returning it together with
/// the number of bytes consumed (trailing whitespace excluded).
pub fn parse_prefix(text: &str) -> Result<(Cirquent, usize), ParseError> {
    let mut parser = Parser::new(text);
    let expr = parser.implication()?;
    let mut lowering = Lowering {
        next_fresh: expr.max_explicit_id() + 1,
    };
    let c = lowering.lower(&expr, false)?;
    Ok((c, parser.pos))
}

pub fn parse(text: &str) -> Result<Cirquent, ParseError> {
    let mut parser = Parser::new(text);
    let expr = parser.implication()?;
    if parser.peek().is_some() {
        return parser.error("unexpected trailing input");
    }
    let mut lowering = Lowering {
        next_fresh: expr.max_explicit_id() + 1,
    };
    lowering.lower(&expr, false)
}

/// Renders a cirquent. Every binary node is parenthesized. Singleton
/// cluster IDs are omitted unless `show_singleton_ids` is set.
pub fn print(c: &Cirquent, show_singleton_ids: bool) -> String {
    fn go(c: &Cirquent, table: &ClusterTable, show: bool, out: &mut String) {
        match c {
            Cirquent::Lit { atom, positive } => {
                if !positive {
                    out.push('~');
                }
                out.push_str(atom);
            }
            Cirquent::And(l, r) => {
                out.push('(');
                go(l, table, show, out);
                out.push('&');
                go(r, table, show, out);
                out.push(')');
            }
            Cirquent::Or(id, l, r) => {
                out.push('(');
                go(l, table, show, out);
                out.push('|');
                if show || !table.is_singleton(*id) {
                    out.push_str(&format!("{id} "));
                }
                go(r, table, show, out);
                out.push(')');
            }
        }
    }
    let mut out = String::new();
    go(c, &c.clusters(), show_singleton_ids, &mut out);
    out
}

impl fmt::Display for Cirquent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self, false))
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(&str, &str)>, AssignmentError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|entry| {
            let (key, value) = entry
                .split_once('=')
                .ok_or_else(|| AssignmentError::Syntax(entry.to_owned()))?;
            Ok((key.trim(), value.trim()))
        })
        .collect()
}

/// Parses `name=0|1` entries separated by commas, e.g. `p=1,q=0`.
pub fn parse_interpretation(text: &str) -> Result<Interpretation, AssignmentError> {
    let mut map = BTreeMap::new();
    for (key, value) in parse_pairs(text)? {
        let valid_name = key.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        let value = match value {
            "1" if valid_name => true,
            "0" if valid_name => false,
            _ => return Err(AssignmentError::Syntax(format!("{key}={value}"))),
        };
        if map.insert(key.to_owned(), value).is_some() {
            return Err(AssignmentError::DuplicateKey(key.to_owned()));
        }
    }
    Ok(Interpretation::from(map))
}

/// Parses `id=left|right` entries separated by commas, e.g. `1=left,2=right`.
pub fn parse_metaselection(text: &str) -> Result<Metaselection, AssignmentError> {
    let mut map = BTreeMap::new();
    for (key, value) in parse_pairs(text)? {
        let id = key
            .parse::<u32>()
            .ok()
            .and_then(ClusterId::new)
            .filter(|_| !key.starts_with('0') && !key.starts_with('+'))
            .ok_or_else(|| AssignmentError::Syntax(format!("{key}={value}")))?;
        let side = match value {
            "left" => Side::Left,
            "right" => Side::Right,
            _ => return Err(AssignmentError::Syntax(format!("{key}={value}"))),
        };
        if map.insert(id, side).is_some() {
            return Err(AssignmentError::DuplicateKey(key.to_owned()));
        }
    }
    Ok(Metaselection::from(map))
}

fn parse_annotation(words: &[&str]) -> Result<Annotation, String> {
    let Some((first, rest)) = words.split_first() else {
        return Ok(Annotation::None);
    };
    if *first == "axiom" {
        return match rest {
            [] => Ok(Annotation::Axiom),
            _ => Err(format!("unexpected {:?} after 'axiom'", rest[0])),
        };
    }
    let rule = first
        .strip_prefix("rule=")
        .ok_or_else(|| format!("expected 'axiom' or 'rule=', found {first:?}"))?;
    let rule: RuleKind = rule.parse().map_err(|_| format!("unknown rule {rule:?}"))?;
    let mut hint = RuleHint::new(rule);
    for word in rest {
        let (key, value) = word
            .split_once('=')
            .ok_or_else(|| format!("malformed annotation field {word:?}"))?;
        let duplicate = match key {
            "path" => hint
                .path
                .replace(value.parse().map_err(|e| format!("{e}"))?)
                .is_some(),
            "inner" => hint
                .inner
                .replace(value.parse().map_err(|e| format!("{e}"))?)
                .is_some(),
            "k" => {
                let k = value
                    .parse::<u32>()
                    .ok()
                    .and_then(ClusterId::new)
                    .ok_or_else(|| format!("malformed cluster ID {value:?}"))?;
                hint.k.replace(k).is_some()
            }
            _ => return Err(format!("unknown annotation field {key:?}")),
        };
        if duplicate {
            return Err(format!("duplicate annotation field {key:?}"));
        }
    }
    Ok(Annotation::Rule(hint))
}

/// Parses the proof-file format: one `N. cirquent [annotation]` entry per
/// line, numbered consecutively from 1. Blank lines and lines starting with
/// `#` are skipped.
pub fn parse_proof(text: &str) -> Result<ProofScript, ProofSyntaxError> {
    let mut entries = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let fail = |message: String| ProofSyntaxError { line, message };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !trimmed.is_ascii() {
            return Err(fail("proof files are 7-bit text".into()));
        }
        let digits = trimmed.bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(fail("missing line number".into()));
        }
        let expected = entries.len() + 1;
        if trimmed[..digits].parse::<usize>().ok() != Some(expected) {
            return Err(fail(format!("expected line number {expected}")));
        }
        let rest = trimmed[digits..]
            .strip_prefix('.')
            .ok_or_else(|| fail("expected '.' after the line number".into()))?;
        let (cirquent, used) = parse_prefix(rest).map_err(|e| fail(e.to_string()))?;
        let words: Vec<&str> = rest[used..].split_whitespace().collect();
        let annotation = parse_annotation(&words).map_err(fail)?;
        entries.push(ProofEntry {
            cirquent,
            annotation,
        });
    }
    ProofScript::new(entries).ok_or(ProofSyntaxError {
        line: 0,
        message: "empty proof".into(),
    })
}

pub fn print_proof(ps: &ProofScript) -> String {
    let mut out = String::new();
    for (index, entry) in ps.entries().iter().enumerate() {
        out.push_str(&format!("{}. {}", index + 1, print(&entry.cirquent, false)));
        match &entry.annotation {
            Annotation::None => {}
            Annotation::Axiom => out.push_str(" axiom"),
            Annotation::Rule(hint) => {
                out.push_str(&format!(" rule={}", hint.rule));
                if let Some(path) = &hint.path {
                    out.push_str(&format!(" path={path}"));
                }
                // A singleton key cluster has no printed ID to refer to.
                if let Some(k) = hint
                    .k
                    .filter(|k| !entry.cirquent.clusters().is_singleton(*k))
                {
                    out.push_str(&format!(" k={k}"));
                }
                if let Some(inner) = &hint.inner {
                    out.push_str(&format!(" inner={inner}"));
                }
            }
        }
        out.push('\n');
    }
    out
}

pub fn print_interpretation(i: &Interpretation) -> String {
    i.iter()
        .map(|(atom, value)| format!("{atom}={}", u8::from(value)))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn print_metaselection(f: &Metaselection) -> String {
    f.iter()
        .map(|(id, side)| format!("{id}={side}"))
        .collect::<Vec<_>>()
        .join(",")
}
