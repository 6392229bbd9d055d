//! Spatio-temporal predicate language: AST, parser, canonical printer and
//! name/kind validation.

mod ast;
mod parser;
mod validate;

use thiserror::Error;

pub use ast::{format_predicate, Atom, Body, Clause, Domain, Op, PointRef, Predicate, Quantifier};
pub use parser::{is_identifier, parse_predicate, SyntaxError, RESERVED};
pub use validate::{validate, Declarations, Diagnostic, RangeKind, ValidationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredicateError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("invalid predicate: {0}")]
    Invalid(#[from] ValidationError),
}

/// Parses and validates in one step.
pub fn parse_checked(text: &str, decls: &Declarations) -> Result<Predicate, PredicateError> {
    let ast = parse_predicate(text)?;
    validate(&ast, decls)?;
    Ok(ast)
}
