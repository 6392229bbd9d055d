use std::fmt;

/// The thing an atom talks about: a quantified variable or one of the two
/// trajectory endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PointRef {
    Var(String),
    First,
    Last,
}

/// Membership and ordering operators.
///
/// `Within` includes the border, `Inside` excludes it and `Outside` means
/// strictly exterior, so a border point satisfies neither `Inside` nor
/// `Outside`. `Before`/`After` only apply to intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Within,
    Inside,
    Outside,
    Before,
    After,
}

impl Op {
    pub const ALL: [Op; 5] = [Op::Within, Op::Inside, Op::Outside, Op::Before, Op::After];

    pub fn keyword(self) -> &'static str {
        match self {
            Op::Within => "WITHIN",
            Op::Inside => "INSIDE",
            Op::Outside => "OUTSIDE",
            Op::Before => "BEFORE",
            Op::After => "AFTER",
        }
    }

    pub fn is_temporal_only(self) -> bool {
        matches!(self, Op::Before | Op::After)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub subject: PointRef,
    pub op: Op,
    /// Name of a region or interval in the evaluation environment.
    pub object: String,
}

impl Atom {
    pub fn new(subject: PointRef, op: Op, object: impl Into<String>) -> Self {
        Atom {
            subject,
            op,
            object: object.into(),
        }
    }
}

/// Boolean combination of atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Body {
    Atom(Atom),
    Not(Box<Body>),
    And(Vec<Body>),
    Or(Vec<Body>),
}

impl Body {
    pub fn atom(subject: PointRef, op: Op, object: &str) -> Body {
        Body::Atom(Atom::new(subject, op, object))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Body) -> Body {
        Body::Not(Box::new(inner))
    }

    pub fn and(parts: Vec<Body>) -> Body {
        Body::And(parts).canonical()
    }

    pub fn or(parts: Vec<Body>) -> Body {
        Body::Or(parts).canonical()
    }

    /// Flattens nested conjunctions/disjunctions and unwraps singletons.
    pub fn canonical(self) -> Body {
        match self {
            Body::Atom(a) => Body::Atom(a),
            Body::Not(inner) => Body::Not(Box::new(inner.canonical())),
            Body::And(parts) => {
                let mut flat = Vec::with_capacity(parts.len());
                for p in parts {
                    match p.canonical() {
                        Body::And(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                if flat.len() == 1 {
                    flat.pop().unwrap()
                } else {
                    Body::And(flat)
                }
            }
            Body::Or(parts) => {
                let mut flat = Vec::with_capacity(parts.len());
                for p in parts {
                    match p.canonical() {
                        Body::Or(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                if flat.len() == 1 {
                    flat.pop().unwrap()
                } else {
                    Body::Or(flat)
                }
            }
        }
    }

    /// Visits every atom in the body.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Body::Atom(a) => out.push(a),
            Body::Not(b) => b.collect_atoms(out),
            Body::And(bs) | Body::Or(bs) => bs.iter().for_each(|b| b.collect_atoms(out)),
        }
    }

    /// True when no atom sits under a negation.
    pub fn is_positive(&self) -> bool {
        match self {
            Body::Atom(_) => true,
            Body::Not(_) => false,
            Body::And(bs) | Body::Or(bs) => bs.iter().all(Body::is_positive),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    ForAll,
}

/// Quantification domain: every point (`T`) or every point except the two
/// endpoints (`TFL`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    All,
    Inner,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Clause {
    Quantified {
        quantifier: Quantifier,
        var: String,
        domain: Domain,
        body: Body,
    },
    /// Boolean combination of atoms over `pf`/`pl` only.
    Ground(Body),
}

impl Clause {
    pub fn exists(var: &str, domain: Domain, body: Body) -> Clause {
        Clause::Quantified {
            quantifier: Quantifier::Exists,
            var: var.to_owned(),
            domain,
            body,
        }
    }

    pub fn forall(var: &str, domain: Domain, body: Body) -> Clause {
        Clause::Quantified {
            quantifier: Quantifier::ForAll,
            var: var.to_owned(),
            domain,
            body,
        }
    }
}

/// Conjunction of clauses. Always canonical: bodies are flattened and no two
/// ground clauses are adjacent, so printing and re-parsing is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Predicate {
    clauses: Vec<Clause>,
}

impl Predicate {
    pub fn new(clauses: Vec<Clause>) -> Predicate {
        let mut out: Vec<Clause> = Vec::with_capacity(clauses.len());
        for clause in clauses {
            let clause = match clause {
                Clause::Ground(b) => Clause::Ground(b.canonical()),
                Clause::Quantified {
                    quantifier,
                    var,
                    domain,
                    body,
                } => Clause::Quantified {
                    quantifier,
                    var,
                    domain,
                    body: body.canonical(),
                },
            };
            match (out.last_mut(), clause) {
                (Some(Clause::Ground(prev)), Clause::Ground(next)) => {
                    let merged = std::mem::replace(prev, Body::And(Vec::new()));
                    *prev = Body::and(vec![merged, next]);
                }
                (_, clause) => out.push(clause),
            }
        }
        Predicate { clauses: out }
    }

    pub fn single(clause: Clause) -> Predicate {
        Predicate::new(vec![clause])
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// All atoms of all clauses.
    pub fn atoms(&self) -> Vec<&Atom> {
        self.clauses
            .iter()
            .flat_map(|c| match c {
                Clause::Ground(b) => b.atoms(),
                Clause::Quantified { body, .. } => body.atoms(),
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Canonical printing

impl fmt::Display for PointRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointRef::Var(v) => f.write_str(v),
            PointRef::First => f.write_str("pf"),
            PointRef::Last => f.write_str("pl"),
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.op, self.object)
    }
}

impl fmt::Display for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Body::Atom(a) => write!(f, "{a}"),
            Body::Not(inner) => write!(f, "NOT ({inner})"),
            Body::Or(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" OR ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            Body::And(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" AND ")?;
                    }
                    match p {
                        Body::Or(_) => write!(f, "({p})")?,
                        _ => write!(f, "{p}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantifier::Exists => "EXISTS",
            Quantifier::ForAll => "FORALL",
        })
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::All => "T",
            Domain::Inner => "TFL",
        })
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::Ground(b) => write!(f, "{b}"),
            Clause::Quantified {
                quantifier,
                var,
                domain,
                body,
            } => {
                write!(f, "{quantifier} {var} IN {domain}: {body}")
            }
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let multi = self.clauses.len() > 1;
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" AND ")?;
            }
            let wrap =
                multi && matches!(c, Clause::Quantified { .. } | Clause::Ground(Body::Or(_)));
            if wrap {
                write!(f, "({c})")?;
            } else {
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

/// Canonical text of a predicate.
pub fn format_predicate(ast: &Predicate) -> String {
    ast.to_string()
}
