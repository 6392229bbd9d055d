//! Catalogs of the 19 line/area topological relations and the 13 interval
//! relations, each expressed in the predicate language, plus classifiers.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::eval::{Bound, EvalEnv, EvalError, Strictness};
use crate::geometry::{Interval, Region};
use crate::model::Trajectory;
use crate::predicate::{parse_predicate, Predicate};

/// Name under which catalog predicates refer to the region.
pub const REGION_NAME: &str = "R";
/// Name under which catalog predicates refer to the interval.
pub const INTERVAL_NAME: &str = "I";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("trajectory time span is degenerate (fewer than two points)")]
    DegenerateSpan,
    #[error("unknown relation label `{0}`")]
    UnknownLabel(String),
}

macro_rules! labels {
    ($name:ident { $($variant:ident),* $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),*
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),*];

            pub fn name(self) -> &'static str {
                match self {
                    $($name::$variant => stringify!($variant)),*
                }
            }

            fn index(self) -> usize {
                self as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = RelationError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                $name::ALL
                    .iter()
                    .copied()
                    .find(|l| l.name().eq_ignore_ascii_case(s))
                    .ok_or_else(|| RelationError::UnknownLabel(s.to_owned()))
            }
        }
    };
}

labels!(De9imLabel {
    R031,
    R095,
    R179,
    R223,
    R243,
    R247,
    R255,
    R279,
    R287,
    R339,
    R343,
    R351,
    R403,
    R435,
    R467,
    R471,
    R479,
    R499,
    R503,
});

labels!(AllenLabel {
    Precedes,
    Meets,
    Overlaps,
    Starts,
    During,
    Finishes,
    Equals,
    PrecededBy,
    MetBy,
    OverlappedBy,
    StartedBy,
    Contains,
    FinishedBy,
});

impl De9imLabel {
    /// Labels whose formula treats the first and last point differently, so
    /// the reversed trajectory may match where the original does not.
    pub fn is_direction_sensitive(self) -> bool {
        use De9imLabel::*;
        matches!(self, R255 | R287 | R351 | R435 | R467 | R479 | R503)
    }

    pub fn text(self) -> &'static str {
        use De9imLabel::*;
        match self {
            R031 => "FORALL p IN T: p OUTSIDE R",
            R095 => "pf OUTSIDE R AND pl OUTSIDE R AND (EXISTS p IN TFL: p WITHIN R AND NOT (p INSIDE R))",
            R179 => "FORALL p IN T: p INSIDE R",
            R223 => "pf OUTSIDE R AND pl OUTSIDE R AND (EXISTS p IN TFL: p INSIDE R)",
            R243 => concat!(
                "pf INSIDE R AND pl INSIDE R AND (FORALL p IN TFL: p WITHIN R)",
                " AND (EXISTS p IN TFL: NOT (p INSIDE R))"
            ),
            R247 => "pf INSIDE R AND pl INSIDE R AND (EXISTS p IN TFL: p OUTSIDE R)",
            R255 => "pf INSIDE R AND pl OUTSIDE R",
            R279 => concat!(
                "pf WITHIN R AND pl WITHIN R AND NOT (pf INSIDE R) AND NOT (pl INSIDE R)",
                " AND (FORALL p IN TFL: p OUTSIDE R)"
            ),
            R287 => "pf WITHIN R AND NOT (pf INSIDE R) AND pl OUTSIDE R AND (FORALL p IN TFL: p OUTSIDE R)",
            R339 => "FORALL p IN T: p WITHIN R AND NOT (p INSIDE R)",
            R343 => concat!(
                "pf WITHIN R AND pl WITHIN R AND NOT (pf INSIDE R) AND NOT (pl INSIDE R)",
                " AND (FORALL p IN TFL: NOT (p INSIDE R)) AND (EXISTS p1 IN TFL: p1 WITHIN R)",
                " AND (EXISTS p2 IN TFL: p2 OUTSIDE R)"
            ),
            R351 => concat!(
                "pf WITHIN R AND NOT (pf INSIDE R) AND pl OUTSIDE R AND (FORALL p IN TFL: NOT (p INSIDE R))",
                " AND (EXISTS p1 IN TFL: p1 WITHIN R) AND (EXISTS p2 IN TFL: p2 OUTSIDE R)"
            ),
            R403 => concat!(
                "pf WITHIN R AND pl WITHIN R AND NOT (pf INSIDE R) AND NOT (pl INSIDE R)",
                " AND (FORALL p IN TFL: p INSIDE R)"
            ),
            R435 => "pf WITHIN R AND NOT (pf INSIDE R) AND pl INSIDE R AND (FORALL p IN TFL: p INSIDE R)",
            R467 => concat!(
                "pf WITHIN R AND NOT (pf INSIDE R) AND pl INSIDE R AND (FORALL p IN TFL: p WITHIN R)",
                " AND (EXISTS p1 IN TFL: p1 INSIDE R) AND (EXISTS p2 IN TFL: NOT (p2 INSIDE R))"
            ),
            R471 => concat!(
                "pf WITHIN R AND pl WITHIN R AND NOT (pf INSIDE R) AND NOT (pl INSIDE R)",
                " AND (EXISTS p1 IN TFL: p1 INSIDE R) AND (EXISTS p2 IN TFL: p2 OUTSIDE R)"
            ),
            R479 => concat!(
                "pf WITHIN R AND NOT (pf INSIDE R) AND pl OUTSIDE R",
                " AND (EXISTS p1 IN TFL: p1 INSIDE R) AND (EXISTS p2 IN TFL: p2 OUTSIDE R)"
            ),
            R499 => concat!(
                "pf WITHIN R AND pl WITHIN R AND NOT (pf INSIDE R) AND NOT (pl INSIDE R)",
                " AND (FORALL p IN TFL: p WITHIN R) AND (EXISTS p1 IN TFL: p1 INSIDE R)",
                " AND (EXISTS p2 IN TFL: NOT (p2 INSIDE R))"
            ),
            R503 => "pf WITHIN R AND NOT (pf INSIDE R) AND pl INSIDE R AND (EXISTS p IN TFL: p OUTSIDE R)",
        }
    }

    pub fn description(self) -> &'static str {
        use De9imLabel::*;
        match self {
            R031 => "disjoint: every point strictly outside",
            R095 => "both ends outside; touches the border without entering",
            R179 => "entirely in the interior",
            R223 => "both ends outside; passes through the interior",
            R243 => "both ends inside; touches the border from inside",
            R247 => "both ends inside; leaves the region in between",
            R255 => "starts inside, ends outside",
            R279 => "both ends on the border; outside in between",
            R287 => "starts on the border, ends outside; outside in between",
            R339 => "runs along the border",
            R343 => "both ends on the border; outside and on the border in between, never inside",
            R351 => {
                "starts on the border, ends outside; touches the border in between, never inside"
            }
            R403 => "both ends on the border; inside in between",
            R435 => "starts on the border, ends inside; inside in between",
            R467 => "starts on the border, ends inside; along the border and through the interior",
            R471 => "both ends on the border; through the interior and the exterior",
            R479 => "starts on the border, ends outside; passes through the interior",
            R499 => "both ends on the border; through the interior and along the border",
            R503 => "starts on the border, ends inside; leaves the region in between",
        }
    }
}

impl AllenLabel {
    pub fn text(self) -> &'static str {
        use AllenLabel::*;
        match self {
            Precedes => "FORALL p IN T: p BEFORE I",
            Meets => "pl WITHIN I AND NOT (pl INSIDE I) AND (FORALL p IN TFL: p BEFORE I)",
            Overlaps => "pl INSIDE I AND (EXISTS p IN TFL: p BEFORE I)",
            Starts => "pf WITHIN I AND NOT (pf INSIDE I) AND pl INSIDE I",
            During => "FORALL p IN T: p INSIDE I",
            Finishes => "pl WITHIN I AND NOT (pl INSIDE I) AND pf INSIDE I",
            Equals => "pf WITHIN I AND NOT (pf INSIDE I) AND pl WITHIN I AND NOT (pl INSIDE I)",
            PrecededBy => "FORALL p IN T: p AFTER I",
            MetBy => "pf WITHIN I AND NOT (pf INSIDE I) AND (FORALL p IN TFL: p AFTER I)",
            OverlappedBy => "pf INSIDE I AND (EXISTS p IN TFL: p AFTER I)",
            StartedBy => "pf WITHIN I AND NOT (pf INSIDE I) AND pl AFTER I AND (EXISTS p IN TFL: p INSIDE I)",
            Contains => "pf BEFORE I AND pl AFTER I",
            FinishedBy => "pf BEFORE I AND pl WITHIN I AND NOT (pl INSIDE I) AND (EXISTS p IN TFL: p INSIDE I)",
        }
    }

    pub fn description(self) -> &'static str {
        use AllenLabel::*;
        match self {
            Precedes => "trajectory ends before the interval starts",
            Meets => "trajectory ends exactly when the interval starts",
            Overlaps => "trajectory starts before the interval and ends inside it",
            Starts => "both start together; trajectory ends inside the interval",
            During => "trajectory lies strictly inside the interval",
            Finishes => "trajectory starts inside the interval; both end together",
            Equals => "same start and same end",
            PrecededBy => "trajectory starts after the interval ends",
            MetBy => "trajectory starts exactly when the interval ends",
            OverlappedBy => "trajectory starts inside the interval and ends after it",
            StartedBy => "both start together; trajectory ends after the interval",
            Contains => "trajectory starts before and ends after the interval",
            FinishedBy => "trajectory starts before the interval; both end together",
        }
    }
}

fn parsed<L: Copy>(all: &[L], text: impl Fn(L) -> &'static str) -> Vec<Predicate> {
    all.iter()
        .map(|&l| parse_predicate(text(l)).expect("catalog formulas parse"))
        .collect()
}

/// The catalog formula for a topological relation; refers to the region as `R`.
pub fn de9im_predicate(label: De9imLabel) -> Predicate {
    de9im_predicates()[label.index()].clone()
}

/// The catalog formula for an interval relation; refers to the interval as `I`.
pub fn allen_predicate(label: AllenLabel) -> Predicate {
    allen_predicates()[label.index()].clone()
}

fn de9im_predicates() -> &'static [Predicate] {
    static CACHE: OnceLock<Vec<Predicate>> = OnceLock::new();
    CACHE.get_or_init(|| parsed(De9imLabel::ALL, De9imLabel::text))
}

fn allen_predicates() -> &'static [Predicate] {
    static CACHE: OnceLock<Vec<Predicate>> = OnceLock::new();
    CACHE.get_or_init(|| parsed(AllenLabel::ALL, AllenLabel::text))
}

/// Every topological relation whose formula holds for `t` against `r`.
///
/// With `normalize_orientation`, direction-sensitive labels are also checked
/// on the reversed trajectory.
pub fn classify_de9im(
    t: &Trajectory,
    r: &Region,
    s: &Strictness,
    normalize_orientation: bool,
) -> Result<BTreeSet<De9imLabel>, EvalError> {
    let env = EvalEnv::new().with_region(REGION_NAME, *r);
    let reversed = normalize_orientation.then(|| t.reversed());
    let mut out = BTreeSet::new();
    for (&label, pred) in De9imLabel::ALL.iter().zip(de9im_predicates()) {
        let bound = Bound::new(pred, &env)?;
        let mut holds = bound.evaluate(t, s)?;
        if !holds && label.is_direction_sensitive() {
            if let Some(rev) = &reversed {
                holds = bound.evaluate(rev, s)?;
            }
        }
        if holds {
            out.insert(label);
        }
    }
    Ok(out)
}

/// Every interval relation whose formula holds for `t` against `i`.
pub fn matching_allen(
    t: &Trajectory,
    i: &Interval,
    s: &Strictness,
) -> Result<BTreeSet<AllenLabel>, EvalError> {
    let env = EvalEnv::new().with_interval(INTERVAL_NAME, *i);
    let mut out = BTreeSet::new();
    for (&label, pred) in AllenLabel::ALL.iter().zip(allen_predicates()) {
        if Bound::new(pred, &env)?.evaluate(t, s)? {
            out.insert(label);
        }
    }
    Ok(out)
}

/// Interval relation between the trajectory's time span and `i`, decided by
/// comparing endpoints.
pub fn classify_allen(t: &Trajectory, i: &Interval) -> Result<AllenLabel, RelationError> {
    if t.len() < 2 {
        return Err(RelationError::DegenerateSpan);
    }
    let (tf, tl) = t.span();
    classify_span(tf, tl, i)
}

/// Endpoint classification of the span `[tf, tl]` (with `tf < tl`) against `i`.
pub fn classify_span(tf: f64, tl: f64, i: &Interval) -> Result<AllenLabel, RelationError> {
    use AllenLabel::*;
    // Rejects NaN as well as empty spans.
    if tf.partial_cmp(&tl) != Some(std::cmp::Ordering::Less) {
        return Err(RelationError::DegenerateSpan);
    }
    let (ts, te) = (i.start(), i.end());
    let label = if tl < ts {
        Precedes
    } else if tl == ts {
        Meets
    } else if tf > te {
        PrecededBy
    } else if tf == te {
        MetBy
    } else {
        // The span and the interval share more than a point.
        match (tf.partial_cmp(&ts), tl.partial_cmp(&te)) {
            (Some(Ordering::Less), Some(Ordering::Less)) => Overlaps,
            (Some(Ordering::Less), Some(Ordering::Equal)) => FinishedBy,
            (Some(Ordering::Less), _) => Contains,
            (Some(Ordering::Equal), Some(Ordering::Less)) => Starts,
            (Some(Ordering::Equal), Some(Ordering::Equal)) => Equals,
            (Some(Ordering::Equal), _) => StartedBy,
            (_, Some(Ordering::Less)) => During,
            (_, Some(Ordering::Equal)) => Finishes,
            _ => OverlappedBy,
        }
    };
    Ok(label)
}

/// One catalog row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub label: &'static str,
    pub predicate: &'static str,
    pub description: &'static str,
}

/// Both catalogs, topological relations first.
pub fn catalog() -> Vec<CatalogEntry> {
    let de9im = De9imLabel::ALL.iter().map(|&l| CatalogEntry {
        label: l.name(),
        predicate: l.text(),
        description: l.description(),
    });
    let allen = AllenLabel::ALL.iter().map(|&l| CatalogEntry {
        label: l.name(),
        predicate: l.text(),
        description: l.description(),
    });
    de9im.chain(allen).collect()
}

/// Tab-separated catalog with a header line.
pub fn catalog_tsv() -> String {
    let mut out = String::from("label\tpredicate\tdescription\n");
    for e in catalog() {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            e.label, e.predicate, e.description
        ));
    }
    out
}
