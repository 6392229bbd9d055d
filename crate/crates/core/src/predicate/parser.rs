//! Recursive-descent parser for the predicate language.
//!
//! ```text
//! predicate  := clause { "AND" clause }
//! clause     := quantified | ground | "(" predicate ")"
//! quantified := ("EXISTS" | "FORALL") IDENT "IN" ("T" | "TFL") ":" body
//! ground     := body
//! body       := conj { "OR" conj }
//! conj       := unit { "AND" unit }
//! unit       := "NOT" unit | "(" body ")" | atom
//! atom       := pointref { "," pointref } op IDENT
//! pointref   := IDENT | "pf" | "pl"
//! op         := "WITHIN" | "INSIDE" | "OUTSIDE" | "BEFORE" | "AFTER"
//! ```
//!
//! A body never contains a quantifier, so an `AND` followed by a quantifier
//! (or by a parenthesized group that contains one) ends the current body and
//! starts a new clause. Each parenthesized group is classified up front,
//! which keeps the parser single-pass. The comma form `pf, pl INSIDE R` is
//! shorthand for a conjunction of atoms.

use std::fmt;

use thiserror::Error;

use super::ast::{Atom, Body, Clause, Domain, Op, PointRef, Predicate, Quantifier};

const MAX_DEPTH: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {position}: expected {expected}, found {found}")]
pub struct SyntaxError {
    /// Byte offset into the input.
    pub position: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Kw(Kw),
    LParen,
    RParen,
    Colon,
    Comma,
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kw {
    Exists,
    Forall,
    In,
    T,
    Tfl,
    And,
    Or,
    Not,
    Pf,
    Pl,
    Op(Op),
}

/// Words that can never be used as identifiers.
pub const RESERVED: [&str; 15] = [
    "EXISTS", "FORALL", "IN", "T", "TFL", "AND", "OR", "NOT", "pf", "pl", "WITHIN", "INSIDE",
    "OUTSIDE", "BEFORE", "AFTER",
];

fn keyword(word: &str) -> Option<Kw> {
    Some(match word {
        "EXISTS" => Kw::Exists,
        "FORALL" => Kw::Forall,
        "IN" => Kw::In,
        "T" => Kw::T,
        "TFL" => Kw::Tfl,
        "AND" => Kw::And,
        "OR" => Kw::Or,
        "NOT" => Kw::Not,
        "pf" => Kw::Pf,
        "pl" => Kw::Pl,
        "WITHIN" => Kw::Op(Op::Within),
        "INSIDE" => Kw::Op(Op::Inside),
        "OUTSIDE" => Kw::Op(Op::Outside),
        "BEFORE" => Kw::Op(Op::Before),
        "AFTER" => Kw::Op(Op::After),
        _ => return None,
    })
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Kw(Kw::Op(op)) => write!(f, "`{op}`"),
            Tok::Kw(k) => write!(f, "`{}`", format!("{k:?}").to_uppercase()),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

/// Identifier rule `[A-Za-z_][A-Za-z0-9_]*`, excluding reserved words.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !RESERVED.contains(&s)
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            b':' => {
                out.push((Tok::Colon, i));
                i += 1;
            }
            b',' => {
                out.push((Tok::Comma, i));
                i += 1;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match keyword(word) {
                    Some(k) => Tok::Kw(k),
                    None => Tok::Ident(word.to_owned()),
                };
                out.push((tok, start));
            }
            _ => {
                let found = text[i..]
                    .chars()
                    .next()
                    .map(|ch| format!("character {ch:?}"))
                    .unwrap_or_default();
                return Err(SyntaxError {
                    position: i,
                    expected: "a token".into(),
                    found,
                });
            }
        }
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

/// For every `(` token, whether its group contains a quantifier.
fn quantified_groups(tokens: &[(Tok, usize)]) -> Vec<bool> {
    let mut marks = vec![false; tokens.len()];
    let mut stack: Vec<usize> = Vec::new();
    for (i, (tok, _)) in tokens.iter().enumerate() {
        match tok {
            Tok::LParen => stack.push(i),
            Tok::RParen => {
                if let Some(open) = stack.pop() {
                    if marks[open] {
                        if let Some(&parent) = stack.last() {
                            marks[parent] = true;
                        }
                    }
                }
            }
            Tok::Kw(Kw::Exists | Kw::Forall) => {
                if let Some(&top) = stack.last() {
                    marks[top] = true;
                }
            }
            _ => {}
        }
    }
    // Unclosed groups: propagate outward.
    while let Some(open) = stack.pop() {
        if marks[open] {
            if let Some(&parent) = stack.last() {
                marks[parent] = true;
            }
        }
    }
    marks
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    quantified: Vec<bool>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn position(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.pos].0.clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    fn error<T>(&self, expected: &str) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            position: self.position(),
            expected: expected.to_owned(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(expected)
        }
    }

    fn enter(&mut self) -> Result<(), SyntaxError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.error("shallower nesting");
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    /// Does the token at `pos + offset` begin a new clause rather than a body unit?
    fn starts_clause(&self, offset: usize) -> bool {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        match self.tokens[i].0 {
            Tok::Kw(Kw::Exists | Kw::Forall) => true,
            Tok::LParen => self.quantified[i],
            _ => false,
        }
    }

    fn predicate(&mut self) -> Result<Vec<Clause>, SyntaxError> {
        self.enter()?;
        let mut clauses = self.clause()?;
        while *self.peek() == Tok::Kw(Kw::And) {
            self.bump();
            clauses.extend(self.clause()?);
        }
        self.leave();
        Ok(clauses)
    }

    fn clause(&mut self) -> Result<Vec<Clause>, SyntaxError> {
        match self.peek() {
            Tok::Kw(Kw::Exists | Kw::Forall) => Ok(vec![self.quantified()?]),
            Tok::LParen if self.starts_clause(0) => {
                self.bump();
                let inner = self.predicate()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Ok(vec![Clause::Ground(self.body()?)]),
        }
    }

    fn quantified(&mut self) -> Result<Clause, SyntaxError> {
        let quantifier = match self.bump() {
            Tok::Kw(Kw::Exists) => Quantifier::Exists,
            _ => Quantifier::ForAll,
        };
        let var = match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                name
            }
            _ => return self.error("a variable name"),
        };
        self.expect(Tok::Kw(Kw::In), "`IN`")?;
        let domain = match self.peek() {
            Tok::Kw(Kw::T) => Domain::All,
            Tok::Kw(Kw::Tfl) => Domain::Inner,
            _ => return self.error("`T` or `TFL`"),
        };
        self.bump();
        self.expect(Tok::Colon, "`:`")?;
        let body = self.body()?;
        Ok(Clause::Quantified {
            quantifier,
            var,
            domain,
            body,
        })
    }

    fn body(&mut self) -> Result<Body, SyntaxError> {
        self.enter()?;
        let mut parts = vec![self.conj()?];
        while *self.peek() == Tok::Kw(Kw::Or) {
            self.bump();
            parts.push(self.conj()?);
        }
        self.leave();
        Ok(Body::Or(parts).canonical())
    }

    fn conj(&mut self) -> Result<Body, SyntaxError> {
        let mut parts = vec![self.unit()?];
        while *self.peek() == Tok::Kw(Kw::And) && !self.starts_clause(1) {
            self.bump();
            parts.push(self.unit()?);
        }
        Ok(Body::And(parts).canonical())
    }

    fn unit(&mut self) -> Result<Body, SyntaxError> {
        self.enter()?;
        let out = match self.peek() {
            Tok::Kw(Kw::Not) => {
                self.bump();
                Body::Not(Box::new(self.unit()?))
            }
            Tok::LParen => {
                if self.starts_clause(0) {
                    return self.error("an atom (quantifiers cannot be nested in a body)");
                }
                self.bump();
                let inner = self.body()?;
                self.expect(Tok::RParen, "`)`")?;
                inner
            }
            _ => self.atom()?,
        };
        self.leave();
        Ok(out)
    }

    fn point_ref(&mut self) -> Result<PointRef, SyntaxError> {
        let r = match self.peek() {
            Tok::Ident(name) => PointRef::Var(name.clone()),
            Tok::Kw(Kw::Pf) => PointRef::First,
            Tok::Kw(Kw::Pl) => PointRef::Last,
            Tok::Kw(Kw::Exists | Kw::Forall) => {
                return self.error("an atom (quantifiers cannot be nested in a body)")
            }
            _ => return self.error("a point (`pf`, `pl` or a variable)"),
        };
        self.bump();
        Ok(r)
    }

    fn atom(&mut self) -> Result<Body, SyntaxError> {
        let mut subjects = vec![self.point_ref()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            subjects.push(self.point_ref()?);
        }
        let op = match self.peek() {
            Tok::Kw(Kw::Op(op)) => *op,
            _ => return self.error("an operator (WITHIN, INSIDE, OUTSIDE, BEFORE, AFTER)"),
        };
        self.bump();
        let object = match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                name
            }
            _ => return self.error("a region or interval name"),
        };
        let atoms: Vec<Body> = subjects
            .into_iter()
            .map(|s| Body::Atom(Atom::new(s, op, object.clone())))
            .collect();
        Ok(Body::And(atoms).canonical())
    }
}

/// Parses predicate text into its canonical AST. Name resolution and kind
/// checks are left to [`super::validate`].
pub fn parse_predicate(text: &str) -> Result<Predicate, SyntaxError> {
    let tokens = lex(text)?;
    let quantified = quantified_groups(&tokens);
    let mut p = Parser {
        tokens,
        quantified,
        pos: 0,
        depth: 0,
    };
    let clauses = p.predicate()?;
    if *p.peek() != Tok::Eof {
        let expected = if matches!(p.peek(), Tok::RParen) {
            "end of input (unbalanced `)`)"
        } else {
            "`AND`, `OR` or end of input"
        };
        return p.error(expected);
    }
    Ok(Predicate::new(clauses))
}
