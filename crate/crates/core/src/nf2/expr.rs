use std::fmt;

use crate::geometry::Region;

use super::value::{Relation, Value};

/// Relation-valued expression.
#[derive(Debug, Clone, PartialEq)]
pub enum RelExpr {
    /// The relation handed to `execute`, rendered as `Trajectories`.
    Input,
    /// A relation-valued attribute of an enclosing row.
    Attr(String),
    Const(Relation),
    Project {
        input: Box<RelExpr>,
        items: Vec<ProjItem>,
    },
    Select {
        input: Box<RelExpr>,
        cond: Cond,
    },
    /// Flattens one relation-valued attribute.
    Unnest {
        input: Box<RelExpr>,
        attr: String,
    },
    /// Theta join; output attributes are qualified as `<alias>.<name>`.
    Join {
        left: Box<RelExpr>,
        left_alias: String,
        right: Box<RelExpr>,
        right_alias: String,
        cond: Cond,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProjItem {
    Attr {
        name: String,
        alias: Option<String>,
    },
    /// A relation computed per row, stored under `alias`.
    Nested {
        expr: RelExpr,
        alias: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggFn {
    Min,
    Max,
    Count,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScalarExpr {
    Attr(String),
    Lit(Value),
    Agg(AggFn, Box<RelExpr>),
    /// The value of a one-row, one-column relation; undefined when empty.
    Single(Box<RelExpr>),
    Arith(Box<ScalarExpr>, ArithOp, Box<ScalarExpr>),
}

/// Whether a segment must meet the open rectangle or the closed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitMode {
    Interior,
    Closed,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cond {
    True,
    Cmp(ScalarExpr, CmpOp, ScalarExpr),
    And(Vec<Cond>),
    Or(Vec<Cond>),
    Not(Box<Cond>),
    /// Segment `(x0, y0) -> (x1, y1)` meets `region`.
    SegmentHits {
        coords: Box<[ScalarExpr; 4]>,
        region: Region,
        mode: HitMode,
    },
}

// ---------------------------------------------------------------------------
// Builders

impl RelExpr {
    pub fn attr(name: &str) -> RelExpr {
        RelExpr::Attr(name.to_owned())
    }

    pub fn project(self, names: &[&str]) -> RelExpr {
        let items = names
            .iter()
            .map(|n| ProjItem::Attr {
                name: (*n).to_owned(),
                alias: None,
            })
            .collect();
        RelExpr::Project {
            input: Box::new(self),
            items,
        }
    }

    pub fn project_items(self, items: Vec<ProjItem>) -> RelExpr {
        RelExpr::Project {
            input: Box::new(self),
            items,
        }
    }

    pub fn select(self, cond: Cond) -> RelExpr {
        RelExpr::Select {
            input: Box::new(self),
            cond,
        }
    }

    pub fn unnest(self, attr: &str) -> RelExpr {
        RelExpr::Unnest {
            input: Box::new(self),
            attr: attr.to_owned(),
        }
    }

    pub fn join(self, left_alias: &str, right: RelExpr, right_alias: &str, cond: Cond) -> RelExpr {
        RelExpr::Join {
            left: Box::new(self),
            left_alias: left_alias.to_owned(),
            right: Box::new(right),
            right_alias: right_alias.to_owned(),
            cond,
        }
    }
}

impl ScalarExpr {
    pub fn attr(name: &str) -> ScalarExpr {
        ScalarExpr::Attr(name.to_owned())
    }

    pub fn float(v: f64) -> ScalarExpr {
        ScalarExpr::Lit(Value::Float(v))
    }

    pub fn int(v: i64) -> ScalarExpr {
        ScalarExpr::Lit(Value::Int(v))
    }

    pub fn str(v: &str) -> ScalarExpr {
        ScalarExpr::Lit(Value::Str(v.to_owned()))
    }

    pub fn min(e: RelExpr) -> ScalarExpr {
        ScalarExpr::Agg(AggFn::Min, Box::new(e))
    }

    pub fn max(e: RelExpr) -> ScalarExpr {
        ScalarExpr::Agg(AggFn::Max, Box::new(e))
    }

    pub fn count(e: RelExpr) -> ScalarExpr {
        ScalarExpr::Agg(AggFn::Count, Box::new(e))
    }

    pub fn single(e: RelExpr) -> ScalarExpr {
        ScalarExpr::Single(Box::new(e))
    }

    pub fn plus(self, rhs: ScalarExpr) -> ScalarExpr {
        ScalarExpr::Arith(Box::new(self), ArithOp::Add, Box::new(rhs))
    }

    fn cmp(self, op: CmpOp, rhs: ScalarExpr) -> Cond {
        Cond::Cmp(self, op, rhs)
    }

    pub fn lt(self, rhs: ScalarExpr) -> Cond {
        self.cmp(CmpOp::Lt, rhs)
    }

    pub fn gt(self, rhs: ScalarExpr) -> Cond {
        self.cmp(CmpOp::Gt, rhs)
    }

    pub fn eq(self, rhs: ScalarExpr) -> Cond {
        self.cmp(CmpOp::Eq, rhs)
    }
}

impl Cond {
    pub fn and(parts: Vec<Cond>) -> Cond {
        Cond::And(parts)
    }

    pub fn or(parts: Vec<Cond>) -> Cond {
        Cond::Or(parts)
    }
}

// ---------------------------------------------------------------------------
// Rendering

impl fmt::Display for RelExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelExpr::Input => f.write_str("Trajectories"),
            RelExpr::Attr(n) => f.write_str(n),
            RelExpr::Const(r) => write!(f, "CONST<{} rows>", r.len()),
            RelExpr::Project { input, items } => {
                f.write_str("PROJECT[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    match item {
                        ProjItem::Attr { name, alias: None } => f.write_str(name)?,
                        ProjItem::Attr {
                            name,
                            alias: Some(a),
                        } => write!(f, "{name} AS {a}")?,
                        ProjItem::Nested { expr, alias } => write!(f, "{expr} AS {alias}")?,
                    }
                }
                write!(f, "]({input})")
            }
            RelExpr::Select { input, cond } => write!(f, "SELECT[{cond}]({input})"),
            RelExpr::Unnest { input, attr } => write!(f, "UNNEST[{attr}]({input})"),
            RelExpr::Join {
                left,
                left_alias,
                right,
                right_alias,
                cond,
            } => {
                write!(
                    f,
                    "JOIN[{cond}]({left} AS {left_alias}, {right} AS {right_alias})"
                )
            }
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "<>",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        })
    }
}

impl fmt::Display for ArithOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        })
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarExpr::Attr(n) => f.write_str(n),
            ScalarExpr::Lit(Value::Str(s)) => write!(f, "'{s}'"),
            ScalarExpr::Lit(Value::Float(x)) => write!(f, "{x}"),
            ScalarExpr::Lit(v) => write!(f, "{v}"),
            ScalarExpr::Agg(agg, e) => {
                let name = match agg {
                    AggFn::Min => "MIN",
                    AggFn::Max => "MAX",
                    AggFn::Count => "COUNT",
                };
                write!(f, "{name}({e})")
            }
            ScalarExpr::Single(e) => write!(f, "{e}"),
            ScalarExpr::Arith(a, op, b) => {
                let side = |f: &mut fmt::Formatter<'_>, e: &ScalarExpr| match e {
                    ScalarExpr::Arith(..) => write!(f, "({e})"),
                    _ => write!(f, "{e}"),
                };
                side(f, a)?;
                write!(f, " {op} ")?;
                side(f, b)
            }
        }
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::True => f.write_str("TRUE"),
            Cond::Cmp(a, op, b) => write!(f, "{a} {op} {b}"),
            Cond::And(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" AND ")?;
                    }
                    match p {
                        Cond::Or(_) => write!(f, "({p})")?,
                        _ => write!(f, "{p}")?,
                    }
                }
                Ok(())
            }
            Cond::Or(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" OR ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            Cond::Not(c) => write!(f, "NOT ({c})"),
            Cond::SegmentHits {
                coords,
                region,
                mode,
            } => {
                let name = match mode {
                    HitMode::Interior => "INTERSECTS_INTERIOR",
                    HitMode::Closed => "INTERSECTS_CLOSED",
                };
                let [a, b, c, d] = coords.as_ref();
                write!(f, "{name}({a}, {b}, {c}, {d}; {region})")
            }
        }
    }
}
