//! Type checking and interpretation of algebra expressions.
//!
//! Attribute names resolve against a chain of scopes: the row currently
//! being examined first, then the rows of enclosing operators. This is what
//! lets `SELECT[order = 0](T)` inside a condition on the outer relation see
//! both `order` (inner row) and `T` (outer row).

use std::borrow::Cow;
use std::cmp::Ordering;

use crate::geometry::segment_region_partition;
use crate::model::{Segment, TrajectoryPoint};

use super::expr::{AggFn, ArithOp, CmpOp, Cond, HitMode, ProjItem, RelExpr, ScalarExpr};
use super::value::{AtomicType, AttrType, Attribute, Relation, Schema, Value};
use super::Nf2Error;

/// One level of the name-resolution chain. `row` is absent while type checking.
#[derive(Clone, Copy)]
struct Scope<'a> {
    schema: &'a Schema,
    row: Option<&'a [Value]>,
    parent: Option<&'a Scope<'a>>,
}

fn lookup_attr<'a>(
    mut scope: Option<&Scope<'a>>,
    name: &str,
) -> Option<(&'a Attribute, Option<&'a Value>)> {
    while let Some(s) = scope {
        if let Some(i) = s.schema.position(name) {
            return Some((&s.schema.attrs()[i], s.row.map(|r| &r[i])));
        }
        scope = s.parent;
    }
    None
}

fn value_type(v: &Value) -> Result<AtomicType, Nf2Error> {
    match v {
        Value::Str(_) => Ok(AtomicType::Str),
        Value::Int(_) => Ok(AtomicType::Int),
        Value::Float(_) => Ok(AtomicType::Float),
        Value::Rel(_) => Err(Nf2Error::TypeMismatch(
            "relation literal used as a scalar".into(),
        )),
    }
}

fn qualified<'s>(schema: &'s Schema, alias: &str) -> impl Iterator<Item = Attribute> + 's {
    let alias = alias.to_owned();
    schema.attrs().iter().map(move |a| Attribute {
        name: format!("{alias}.{}", a.name),
        ty: a.ty.clone(),
    })
}

// ---------------------------------------------------------------------------
// Type checking

/// Output schema of `e` when applied to a relation with schema `input`.
pub fn check(e: &RelExpr, input: &Schema) -> Result<Schema, Nf2Error> {
    check_rel(e, input, None)
}

fn check_rel(e: &RelExpr, input: &Schema, scope: Option<&Scope<'_>>) -> Result<Schema, Nf2Error> {
    match e {
        RelExpr::Input => Ok(input.clone()),
        RelExpr::Attr(name) => match lookup_attr(scope, name) {
            Some((
                Attribute {
                    ty: AttrType::Relation(s),
                    ..
                },
                _,
            )) => Ok(s.clone()),
            Some(_) => Err(Nf2Error::TypeMismatch(format!(
                "`{name}` is not relation-valued"
            ))),
            None => Err(Nf2Error::UnknownAttribute(name.clone())),
        },
        RelExpr::Const(r) => Ok(r.schema().clone()),
        RelExpr::Project {
            input: inner,
            items,
        } => {
            let s = check_rel(inner, input, scope)?;
            let row = Scope {
                schema: &s,
                row: None,
                parent: scope,
            };
            let attrs = items
                .iter()
                .map(|item| match item {
                    ProjItem::Attr { name, alias } => {
                        let a = s
                            .get(name)
                            .ok_or_else(|| Nf2Error::UnknownAttribute(name.clone()))?;
                        Ok(Attribute {
                            name: alias.clone().unwrap_or_else(|| name.clone()),
                            ty: a.ty.clone(),
                        })
                    }
                    ProjItem::Nested { expr, alias } => Ok(Attribute::relation(
                        alias,
                        check_rel(expr, input, Some(&row))?,
                    )),
                })
                .collect::<Result<Vec<_>, Nf2Error>>()?;
            Schema::new(attrs)
        }
        RelExpr::Select { input: inner, cond } => {
            let s = check_rel(inner, input, scope)?;
            check_cond(
                cond,
                input,
                Some(&Scope {
                    schema: &s,
                    row: None,
                    parent: scope,
                }),
            )?;
            Ok(s)
        }
        RelExpr::Unnest { input: inner, attr } => {
            let s = check_rel(inner, input, scope)?;
            let nested = match s.get(attr) {
                Some(Attribute {
                    ty: AttrType::Relation(n),
                    ..
                }) => n,
                Some(_) => {
                    return Err(Nf2Error::TypeMismatch(format!(
                        "cannot unnest atomic `{attr}`"
                    )))
                }
                None => return Err(Nf2Error::UnknownAttribute(attr.clone())),
            };
            let mut attrs: Vec<Attribute> = s
                .attrs()
                .iter()
                .filter(|a| a.name != *attr)
                .cloned()
                .collect();
            attrs.extend(nested.attrs().iter().cloned());
            Schema::new(attrs)
        }
        RelExpr::Join {
            left,
            left_alias,
            right,
            right_alias,
            cond,
        } => {
            let ls = check_rel(left, input, scope)?;
            let rs = check_rel(right, input, scope)?;
            let combined = Schema::new(
                qualified(&ls, left_alias)
                    .chain(qualified(&rs, right_alias))
                    .collect(),
            )?;
            check_cond(
                cond,
                input,
                Some(&Scope {
                    schema: &combined,
                    row: None,
                    parent: scope,
                }),
            )?;
            Ok(combined)
        }
    }
}

fn single_column(s: &Schema, what: &str) -> Result<AtomicType, Nf2Error> {
    match s.attrs() {
        [Attribute {
            ty: AttrType::Atomic(t),
            ..
        }] => Ok(*t),
        _ => Err(Nf2Error::TypeMismatch(format!(
            "{what} needs a relation with one atomic attribute, got {s}"
        ))),
    }
}

fn check_scalar(
    e: &ScalarExpr,
    input: &Schema,
    scope: Option<&Scope<'_>>,
) -> Result<AtomicType, Nf2Error> {
    match e {
        ScalarExpr::Attr(name) => match lookup_attr(scope, name) {
            Some((
                Attribute {
                    ty: AttrType::Atomic(t),
                    ..
                },
                _,
            )) => Ok(*t),
            Some(_) => Err(Nf2Error::TypeMismatch(format!(
                "`{name}` is relation-valued"
            ))),
            None => Err(Nf2Error::UnknownAttribute(name.clone())),
        },
        ScalarExpr::Lit(v) => value_type(v),
        ScalarExpr::Agg(AggFn::Count, r) => {
            check_rel(r, input, scope)?;
            Ok(AtomicType::Int)
        }
        ScalarExpr::Agg(_, r) => single_column(&check_rel(r, input, scope)?, "MIN/MAX"),
        ScalarExpr::Single(r) => {
            single_column(&check_rel(r, input, scope)?, "a scalar subexpression")
        }
        ScalarExpr::Arith(a, op, b) => {
            let (ta, tb) = (
                check_scalar(a, input, scope)?,
                check_scalar(b, input, scope)?,
            );
            if !ta.is_numeric() || !tb.is_numeric() {
                return Err(Nf2Error::TypeMismatch(format!(
                    "arithmetic on {ta} and {tb}"
                )));
            }
            Ok(
                if ta == AtomicType::Int && tb == AtomicType::Int && *op != ArithOp::Div {
                    AtomicType::Int
                } else {
                    AtomicType::Float
                },
            )
        }
    }
}

fn check_cond(c: &Cond, input: &Schema, scope: Option<&Scope<'_>>) -> Result<(), Nf2Error> {
    match c {
        Cond::True => Ok(()),
        Cond::Cmp(a, _, b) => {
            let (ta, tb) = (
                check_scalar(a, input, scope)?,
                check_scalar(b, input, scope)?,
            );
            if ta == tb || (ta.is_numeric() && tb.is_numeric()) {
                Ok(())
            } else {
                Err(Nf2Error::TypeMismatch(format!(
                    "cannot compare {ta} with {tb}"
                )))
            }
        }
        Cond::And(cs) | Cond::Or(cs) => cs.iter().try_for_each(|c| check_cond(c, input, scope)),
        Cond::Not(c) => check_cond(c, input, scope),
        Cond::SegmentHits { coords, .. } => coords.iter().try_for_each(|e| {
            let t = check_scalar(e, input, scope)?;
            if t.is_numeric() {
                Ok(())
            } else {
                Err(Nf2Error::TypeMismatch(format!(
                    "segment coordinate of type {t}"
                )))
            }
        }),
    }
}

// ---------------------------------------------------------------------------
// Execution

/// Runtime scalar; `Undefined` comes from aggregates over empty relations and
/// makes every comparison false.
#[derive(Debug, Clone, PartialEq)]
enum Datum {
    Str(String),
    Int(i64),
    Float(f64),
    Undefined,
}

impl Datum {
    fn from_value(v: &Value) -> Datum {
        match v {
            Value::Str(s) => Datum::Str(s.clone()),
            Value::Int(i) => Datum::Int(*i),
            Value::Float(x) => Datum::Float(*x),
            Value::Rel(_) => Datum::Undefined,
        }
    }

    fn as_f64(&self) -> Option<f64> {
        match self {
            Datum::Int(i) => Some(*i as f64),
            Datum::Float(x) => Some(*x),
            _ => None,
        }
    }

    fn compare(&self, other: &Datum) -> Option<Ordering> {
        match (self, other) {
            (Datum::Undefined, _) | (_, Datum::Undefined) => None,
            (Datum::Int(a), Datum::Int(b)) => Some(a.cmp(b)),
            (Datum::Str(a), Datum::Str(b)) => Some(a.cmp(b)),
            _ => self.as_f64()?.partial_cmp(&other.as_f64()?),
        }
    }
}

/// Runs `e` against `input` after type checking it.
pub fn execute(e: &RelExpr, input: &Relation) -> Result<Relation, Nf2Error> {
    check(e, input.schema())?;
    Ok(exec_rel(e, input, None)?.into_owned())
}

fn exec_rel<'f>(
    e: &RelExpr,
    input: &'f Relation,
    scope: Option<&'f Scope<'f>>,
) -> Result<Cow<'f, Relation>, Nf2Error> {
    match e {
        RelExpr::Input => Ok(Cow::Borrowed(input)),
        RelExpr::Attr(name) => match lookup_attr(scope, name) {
            Some((_, Some(Value::Rel(r)))) => Ok(Cow::Borrowed(r)),
            _ => Err(Nf2Error::UnknownAttribute(name.clone())),
        },
        RelExpr::Const(r) => Ok(Cow::Owned(r.clone())),
        RelExpr::Project {
            input: inner,
            items,
        } => {
            let rel = exec_rel(inner, input, scope)?;
            let s = rel.schema();
            let type_scope = Scope {
                schema: s,
                row: None,
                parent: scope,
            };
            let mut attrs = Vec::with_capacity(items.len());
            for item in items {
                match item {
                    ProjItem::Attr { name, alias } => {
                        let a = s
                            .get(name)
                            .ok_or_else(|| Nf2Error::UnknownAttribute(name.clone()))?;
                        attrs.push(Attribute {
                            name: alias.clone().unwrap_or_else(|| name.clone()),
                            ty: a.ty.clone(),
                        });
                    }
                    ProjItem::Nested { expr, alias } => {
                        attrs.push(Attribute::relation(
                            alias,
                            check_rel(expr, input.schema(), Some(&type_scope))?,
                        ));
                    }
                }
            }
            let out_schema = Schema::new(attrs)?;
            let mut rows = Vec::with_capacity(rel.len());
            for row in rel.rows() {
                let frame = Scope {
                    schema: s,
                    row: Some(row),
                    parent: scope,
                };
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    match item {
                        ProjItem::Attr { name, .. } => {
                            out.push(row[s.position(name).expect("checked")].clone());
                        }
                        ProjItem::Nested { expr, .. } => {
                            out.push(Value::Rel(
                                exec_rel(expr, input, Some(&frame))?.into_owned(),
                            ));
                        }
                    }
                }
                rows.push(out);
            }
            Ok(Cow::Owned(Relation::from_parts(out_schema, rows)))
        }
        RelExpr::Select { input: inner, cond } => {
            let rel = exec_rel(inner, input, scope)?;
            let mut rows = Vec::new();
            for row in rel.rows() {
                let frame = Scope {
                    schema: rel.schema(),
                    row: Some(row),
                    parent: scope,
                };
                if eval_cond(cond, input, Some(&frame))? {
                    rows.push(row.clone());
                }
            }
            if rows.len() == rel.len() {
                return Ok(rel);
            }
            Ok(Cow::Owned(Relation::from_parts(rel.schema().clone(), rows)))
        }
        RelExpr::Unnest { input: inner, attr } => {
            let rel = exec_rel(inner, input, scope)?;
            let out_schema = check_rel(e, input.schema(), scope)?;
            let pos = rel
                .schema()
                .position(attr)
                .ok_or_else(|| Nf2Error::UnknownAttribute(attr.clone()))?;
            let mut rows = Vec::new();
            for row in rel.rows() {
                let Value::Rel(nested) = &row[pos] else {
                    return Err(Nf2Error::TypeMismatch(format!(
                        "cannot unnest atomic `{attr}`"
                    )));
                };
                for inner_row in nested.rows() {
                    let mut out: Vec<Value> = row
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != pos)
                        .map(|(_, v)| v.clone())
                        .collect();
                    out.extend(inner_row.iter().cloned());
                    rows.push(out);
                }
            }
            Ok(Cow::Owned(Relation::from_parts(out_schema, rows)))
        }
        RelExpr::Join {
            left,
            left_alias,
            right,
            right_alias,
            cond,
        } => {
            let l = exec_rel(left, input, scope)?;
            let r = exec_rel(right, input, scope)?;
            let combined = Schema::new(
                qualified(l.schema(), left_alias)
                    .chain(qualified(r.schema(), right_alias))
                    .collect(),
            )?;
            let mut rows = Vec::new();
            let mut buf: Vec<Value> = Vec::with_capacity(combined.len());
            for lr in l.rows() {
                for rr in r.rows() {
                    buf.clear();
                    buf.extend(lr.iter().cloned());
                    buf.extend(rr.iter().cloned());
                    let frame = Scope {
                        schema: &combined,
                        row: Some(&buf),
                        parent: scope,
                    };
                    if eval_cond(cond, input, Some(&frame))? {
                        rows.push(buf.clone());
                    }
                }
            }
            Ok(Cow::Owned(Relation::from_parts(combined, rows)))
        }
    }
}

fn eval_scalar(
    e: &ScalarExpr,
    input: &Relation,
    scope: Option<&Scope<'_>>,
) -> Result<Datum, Nf2Error> {
    match e {
        ScalarExpr::Attr(name) => match lookup_attr(scope, name) {
            Some((_, Some(v))) => Ok(Datum::from_value(v)),
            _ => Err(Nf2Error::UnknownAttribute(name.clone())),
        },
        ScalarExpr::Lit(v) => Ok(Datum::from_value(v)),
        ScalarExpr::Agg(agg, r) => {
            let rel = exec_rel(r, input, scope)?;
            if *agg == AggFn::Count {
                return Ok(Datum::Int(rel.len() as i64));
            }
            let want = if *agg == AggFn::Min {
                Ordering::Less
            } else {
                Ordering::Greater
            };
            let mut best = Datum::Undefined;
            for row in rel.rows() {
                let d = Datum::from_value(&row[0]);
                if best == Datum::Undefined || d.compare(&best) == Some(want) {
                    best = d;
                }
            }
            Ok(best)
        }
        ScalarExpr::Single(r) => {
            let rel = exec_rel(r, input, scope)?;
            match rel.rows() {
                [] => Ok(Datum::Undefined),
                [row] => Ok(Datum::from_value(&row[0])),
                rows => Err(Nf2Error::CardinalityViolation { rows: rows.len() }),
            }
        }
        ScalarExpr::Arith(a, op, b) => {
            let (x, y) = (eval_scalar(a, input, scope)?, eval_scalar(b, input, scope)?);
            Ok(match (x, y, op) {
                (Datum::Int(i), Datum::Int(j), ArithOp::Add) => {
                    i.checked_add(j).map_or(Datum::Undefined, Datum::Int)
                }
                (Datum::Int(i), Datum::Int(j), ArithOp::Sub) => {
                    i.checked_sub(j).map_or(Datum::Undefined, Datum::Int)
                }
                (Datum::Int(i), Datum::Int(j), ArithOp::Mul) => {
                    i.checked_mul(j).map_or(Datum::Undefined, Datum::Int)
                }
                (x, y, op) => match (x.as_f64(), y.as_f64()) {
                    (Some(p), Some(q)) => Datum::Float(match op {
                        ArithOp::Add => p + q,
                        ArithOp::Sub => p - q,
                        ArithOp::Mul => p * q,
                        ArithOp::Div => p / q,
                    }),
                    _ => Datum::Undefined,
                },
            })
        }
    }
}

fn eval_cond(c: &Cond, input: &Relation, scope: Option<&Scope<'_>>) -> Result<bool, Nf2Error> {
    match c {
        Cond::True => Ok(true),
        Cond::Cmp(a, op, b) => {
            let ord = eval_scalar(a, input, scope)?.compare(&eval_scalar(b, input, scope)?);
            Ok(match ord {
                None => false,
                Some(o) => match op {
                    CmpOp::Lt => o == Ordering::Less,
                    CmpOp::Le => o != Ordering::Greater,
                    CmpOp::Eq => o == Ordering::Equal,
                    CmpOp::Ne => o != Ordering::Equal,
                    CmpOp::Ge => o != Ordering::Less,
                    CmpOp::Gt => o == Ordering::Greater,
                },
            })
        }
        Cond::And(cs) => {
            for c in cs {
                if !eval_cond(c, input, scope)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Cond::Or(cs) => {
            for c in cs {
                if eval_cond(c, input, scope)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Cond::Not(c) => Ok(!eval_cond(c, input, scope)?),
        Cond::SegmentHits {
            coords,
            region,
            mode,
        } => {
            let mut v = [0.0; 4];
            for (slot, e) in v.iter_mut().zip(coords.iter()) {
                match eval_scalar(e, input, scope)?.as_f64() {
                    Some(x) => *slot = x,
                    None => return Ok(false),
                }
            }
            let s = Segment {
                start: TrajectoryPoint::new(0, v[0], v[1], 0.0),
                end: TrajectoryPoint::new(1, v[2], v[3], 1.0),
            };
            let [interior, _, exterior] = segment_region_partition(&s, region);
            Ok(match mode {
                HitMode::Interior => !interior.is_empty(),
                HitMode::Closed => !exterior.is_unit(),
            })
        }
    }
}
