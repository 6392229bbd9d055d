use std::fmt;

use super::Nf2Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomicType {
    Str,
    Int,
    Float,
}

impl AtomicType {
    pub fn is_numeric(self) -> bool {
        matches!(self, AtomicType::Int | AtomicType::Float)
    }
}

impl fmt::Display for AtomicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AtomicType::Str => "string",
            AtomicType::Int => "integer",
            AtomicType::Float => "float",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttrType {
    Atomic(AtomicType),
    Relation(Schema),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub ty: AttrType,
}

impl Attribute {
    pub fn atomic(name: &str, ty: AtomicType) -> Self {
        Attribute {
            name: name.to_owned(),
            ty: AttrType::Atomic(ty),
        }
    }

    pub fn relation(name: &str, schema: Schema) -> Self {
        Attribute {
            name: name.to_owned(),
            ty: AttrType::Relation(schema),
        }
    }
}

/// Ordered attribute list; names are unique.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schema {
    attrs: Vec<Attribute>,
}

impl Schema {
    pub fn new(attrs: Vec<Attribute>) -> Result<Self, Nf2Error> {
        for (i, a) in attrs.iter().enumerate() {
            if attrs[..i].iter().any(|b| b.name == a.name) {
                return Err(Nf2Error::DuplicateAttribute(a.name.clone()));
            }
        }
        Ok(Schema { attrs })
    }

    pub fn attrs(&self) -> &[Attribute] {
        &self.attrs
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.attrs.iter().position(|a| a.name == name)
    }

    pub fn get(&self, name: &str) -> Option<&Attribute> {
        self.attrs.iter().find(|a| a.name == name)
    }

    /// `(tid, T(order, x, y, tau))`
    pub fn trajectories() -> Schema {
        Schema {
            attrs: vec![
                Attribute::atomic("tid", AtomicType::Str),
                Attribute::relation("T", Schema::trajectory()),
            ],
        }
    }

    /// `(order, x, y, tau)`
    pub fn trajectory() -> Schema {
        Schema {
            attrs: vec![
                Attribute::atomic("order", AtomicType::Int),
                Attribute::atomic("x", AtomicType::Float),
                Attribute::atomic("y", AtomicType::Float),
                Attribute::atomic("tau", AtomicType::Float),
            ],
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, a) in self.attrs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match &a.ty {
                AttrType::Atomic(_) => f.write_str(&a.name)?,
                AttrType::Relation(s) => write!(f, "{}{}", a.name, s)?,
            }
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Str(String),
    Int(i64),
    Float(f64),
    Rel(Relation),
}

impl Value {
    fn conforms(&self, ty: &AttrType) -> bool {
        match (self, ty) {
            (Value::Str(_), AttrType::Atomic(AtomicType::Str))
            | (Value::Int(_), AttrType::Atomic(AtomicType::Int))
            | (Value::Float(_), AttrType::Atomic(AtomicType::Float)) => true,
            (Value::Rel(r), AttrType::Relation(s)) => r.schema == *s,
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Str(s) => f.write_str(s),
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x:?}"),
            Value::Rel(r) => write!(f, "<{} rows>", r.len()),
        }
    }
}

/// A materialized nested relation. Rows form a bag, so duplicates survive
/// projection.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Relation {
    schema: Schema,
    rows: Vec<Vec<Value>>,
}

impl Relation {
    pub fn new(schema: Schema, rows: Vec<Vec<Value>>) -> Result<Self, Nf2Error> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Nf2Error::SchemaViolation(format!(
                    "row {i} has {} values for {} attributes",
                    row.len(),
                    schema.len()
                )));
            }
            for (v, a) in row.iter().zip(schema.attrs()) {
                if !v.conforms(&a.ty) {
                    return Err(Nf2Error::SchemaViolation(format!(
                        "row {i}: bad value for `{}`",
                        a.name
                    )));
                }
            }
        }
        Ok(Relation { schema, rows })
    }

    /// Skips the conformance check; callers guarantee it.
    pub(crate) fn from_parts(schema: Schema, rows: Vec<Vec<Value>>) -> Self {
        Relation { schema, rows }
    }

    pub fn empty(schema: Schema) -> Self {
        Relation {
            schema,
            rows: Vec::new(),
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Values of one attribute, top level only.
    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.schema.position(name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// The `tid` column as strings, in row order.
    pub fn tids(&self) -> Vec<String> {
        self.column("tid")
            .map(|c| c.into_iter().map(|v| v.to_string()).collect())
            .unwrap_or_default()
    }
}
