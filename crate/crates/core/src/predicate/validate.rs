use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::ast::{Atom, Body, Clause, Op, PointRef, Predicate};

/// What a name in the environment is bound to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RangeKind {
    Region,
    Interval,
}

impl fmt::Display for RangeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RangeKind::Region => "region",
            RangeKind::Interval => "interval",
        })
    }
}

/// Names visible to a predicate and their kinds.
pub type Declarations = BTreeMap<String, RangeKind>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Diagnostic {
    #[error("unknown region or interval `{name}`")]
    UnknownName { name: String },
    #[error("`{op}` applies to intervals, but `{name}` is a region")]
    TypeError { op: Op, name: String },
    #[error("unbound variable `{name}`")]
    UnboundVariable { name: String },
    #[error("`{endpoint}` cannot appear inside a quantified clause")]
    EndpointInQuantifier { endpoint: String },
    #[error("empty AND/OR")]
    EmptyConnective,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

fn check_atom(atom: &Atom, bound: Option<&str>, decls: &Declarations, out: &mut Vec<Diagnostic>) {
    match (&atom.subject, bound) {
        (PointRef::Var(v), Some(b)) if v == b => {}
        (PointRef::Var(v), _) => out.push(Diagnostic::UnboundVariable { name: v.clone() }),
        (endpoint, Some(_)) => out.push(Diagnostic::EndpointInQuantifier {
            endpoint: endpoint.to_string(),
        }),
        (_, None) => {}
    }
    match decls.get(&atom.object) {
        None => out.push(Diagnostic::UnknownName {
            name: atom.object.clone(),
        }),
        Some(RangeKind::Region) if atom.op.is_temporal_only() => out.push(Diagnostic::TypeError {
            op: atom.op,
            name: atom.object.clone(),
        }),
        Some(_) => {}
    }
}

fn check_body(body: &Body, bound: Option<&str>, decls: &Declarations, out: &mut Vec<Diagnostic>) {
    match body {
        Body::Atom(a) => check_atom(a, bound, decls, out),
        Body::Not(b) => check_body(b, bound, decls, out),
        Body::And(bs) | Body::Or(bs) => {
            if bs.is_empty() {
                out.push(Diagnostic::EmptyConnective);
            }
            bs.iter().for_each(|b| check_body(b, bound, decls, out));
        }
    }
}

/// Resolves names and checks operator/kind compatibility. All problems are
/// reported at once.
pub fn validate(ast: &Predicate, decls: &Declarations) -> Result<(), ValidationError> {
    let mut diagnostics = Vec::new();
    for clause in ast.clauses() {
        match clause {
            Clause::Ground(b) => check_body(b, None, decls, &mut diagnostics),
            Clause::Quantified { var, body, .. } => {
                check_body(body, Some(var), decls, &mut diagnostics)
            }
        }
    }
    diagnostics.dedup();
    if diagnostics.is_empty() {
        Ok(())
    } else {
        Err(ValidationError { diagnostics })
    }
}
