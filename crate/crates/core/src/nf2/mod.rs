//! A small nested-relational (NF²) algebra engine: projection with nested
//! sub-projections, selection with aggregate subexpressions, unnest and
//! theta join, plus compilers from relation labels to algebra expressions.

mod compile;
mod exec;
mod expr;
mod value;

use thiserror::Error;

pub use compile::{
    compile_spatial, compile_temporal, p_first, p_last, segment_join, t_sgmt, to_nf2,
};
pub use exec::{check, execute};
pub use expr::{AggFn, ArithOp, CmpOp, Cond, HitMode, ProjItem, RelExpr, ScalarExpr};
pub use value::{AtomicType, AttrType, Attribute, Relation, Schema, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Nf2Error {
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("duplicate attribute `{0}`")]
    DuplicateAttribute(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("value does not conform to schema: {0}")]
    SchemaViolation(String),
    #[error("scalar subexpression returned {rows} rows")]
    CardinalityViolation { rows: usize },
    #[error("no algebra expression for `{0}`")]
    UnsupportedLabel(String),
    #[error("no algebra expression under `{0}` evaluation")]
    UnsupportedStrictness(String),
}
