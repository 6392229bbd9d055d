//! Predicate evaluation under the three strictness levels.
//!
//! * `Strict` looks at recorded points only.
//! * `Relaxed` treats each segment as the continuum of its linear
//!   interpolation and decides quantifiers exactly with [`ParamSet`] algebra.
//! * `Approximated` densifies the trajectory with strategy-chosen samples and
//!   then evaluates strictly.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{
    classify_point_region, classify_time_interval, lerp, segment_interval_partition,
    segment_region_partition, Interval, PointClass, Region, TimeClass,
};
use crate::model::{Segment, TrajectoriesRelation, Trajectory, TrajectoryPoint};
use crate::paramset::{ParamSet, Span};
use crate::predicate::{
    is_identifier, validate, Body, Clause, Declarations, Domain, Op, PointRef, Predicate,
    Quantifier, RangeKind, ValidationError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("`{0}` is not a valid region or interval name")]
    InvalidName(String),
    #[error("`{0}` is already bound")]
    DuplicateName(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("invalid predicate: {0}")]
    Invalid(#[from] ValidationError),
    #[error("unknown approximation strategy `{0}`")]
    UnknownStrategy(String),
    #[error("bad strictness `{0}` (expected strict, relaxed or approx:<name>[:k])")]
    BadStrictness(String),
    #[error("strategy `{strategy}` produced parameter {value}, outside (0, 1)")]
    BadParameter { strategy: String, value: f64 },
}

/// Named regions and intervals a predicate may refer to.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalEnv {
    regions: BTreeMap<String, Region>,
    intervals: BTreeMap<String, Interval>,
}

impl EvalEnv {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_name(&self, name: &str) -> Result<(), EnvError> {
        if !is_identifier(name) {
            return Err(EnvError::InvalidName(name.to_owned()));
        }
        if self.regions.contains_key(name) || self.intervals.contains_key(name) {
            return Err(EnvError::DuplicateName(name.to_owned()));
        }
        Ok(())
    }

    pub fn add_region(&mut self, name: &str, region: Region) -> Result<(), EnvError> {
        self.check_name(name)?;
        self.regions.insert(name.to_owned(), region);
        Ok(())
    }

    pub fn add_interval(&mut self, name: &str, interval: Interval) -> Result<(), EnvError> {
        self.check_name(name)?;
        self.intervals.insert(name.to_owned(), interval);
        Ok(())
    }

    /// Builder form of [`EvalEnv::add_region`]; panics on a bad name.
    pub fn with_region(mut self, name: &str, region: Region) -> Self {
        self.add_region(name, region).expect("region name");
        self
    }

    /// Builder form of [`EvalEnv::add_interval`]; panics on a bad name.
    pub fn with_interval(mut self, name: &str, interval: Interval) -> Self {
        self.add_interval(name, interval).expect("interval name");
        self
    }

    pub fn region(&self, name: &str) -> Option<&Region> {
        self.regions.get(name)
    }

    pub fn interval(&self, name: &str) -> Option<&Interval> {
        self.intervals.get(name)
    }

    pub fn declarations(&self) -> Declarations {
        let mut d: Declarations = self
            .regions
            .keys()
            .map(|k| (k.clone(), RangeKind::Region))
            .collect();
        d.extend(
            self.intervals
                .keys()
                .map(|k| (k.clone(), RangeKind::Interval)),
        );
        d
    }
}

type StrategyFn = dyn Fn(&Segment) -> Vec<f64> + Send + Sync;

/// Chooses interpolation parameters in `(0, 1)` at which a segment is sampled.
#[derive(Clone)]
pub struct ApproxStrategy {
    name: String,
    params: Arc<StrategyFn>,
}

impl ApproxStrategy {
    pub fn new<F>(name: &str, params: F) -> Self
    where
        F: Fn(&Segment) -> Vec<f64> + Send + Sync + 'static,
    {
        ApproxStrategy {
            name: name.to_owned(),
            params: Arc::new(params),
        }
    }

    /// `k` evenly spaced samples `j / (k + 1)` per segment.
    pub fn uniform(k: usize) -> Self {
        let params: Vec<f64> = (1..=k).map(|j| j as f64 / (k + 1) as f64).collect();
        ApproxStrategy::new(&format!("uniform:{k}"), move |_| params.clone())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self, segment: &Segment) -> Vec<f64> {
        (self.params)(segment)
    }
}

impl fmt::Debug for ApproxStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ApproxStrategy")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum Strictness {
    Strict,
    Relaxed,
    Approximated(ApproxStrategy),
}

impl fmt::Display for Strictness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strictness::Strict => f.write_str("strict"),
            Strictness::Relaxed => f.write_str("relaxed"),
            Strictness::Approximated(s) => write!(f, "approx:{}", s.name()),
        }
    }
}

type StrategyFactory = dyn Fn(Option<usize>) -> ApproxStrategy + Send + Sync;

/// Approximation strategies by name. A factory receives the optional
/// numeric argument of `approx:<name>:<k>`.
#[derive(Clone)]
pub struct StrategyRegistry {
    factories: BTreeMap<String, Arc<StrategyFactory>>,
}

pub const DEFAULT_UNIFORM_SAMPLES: usize = 10;

impl Default for StrategyRegistry {
    fn default() -> Self {
        let mut r = StrategyRegistry {
            factories: BTreeMap::new(),
        };
        r.register("uniform", |k| {
            ApproxStrategy::uniform(k.unwrap_or(DEFAULT_UNIFORM_SAMPLES))
        });
        r
    }
}

impl StrategyRegistry {
    /// Registry with the built-in `uniform` strategy.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(Option<usize>) -> ApproxStrategy + Send + Sync + 'static,
    {
        self.factories.insert(name.to_owned(), Arc::new(factory));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn resolve(&self, name: &str, k: Option<usize>) -> Result<ApproxStrategy, EvalError> {
        self.factories
            .get(name)
            .map(|f| f(k))
            .ok_or_else(|| EvalError::UnknownStrategy(name.to_owned()))
    }

    /// Parses `strict`, `relaxed`, `approx:<name>` or `approx:<name>:<k>`.
    pub fn parse_strictness(&self, text: &str) -> Result<Strictness, EvalError> {
        match text {
            "strict" => return Ok(Strictness::Strict),
            "relaxed" => return Ok(Strictness::Relaxed),
            _ => {}
        }
        let bad = || EvalError::BadStrictness(text.to_owned());
        let rest = text.strip_prefix("approx:").ok_or_else(bad)?;
        let (name, k) = match rest.split_once(':') {
            Some((name, k)) => (name, Some(k.parse::<usize>().map_err(|_| bad())?)),
            None => (rest, None),
        };
        if name.is_empty() {
            return Err(bad());
        }
        self.resolve(name, k).map(Strictness::Approximated)
    }
}

// ---------------------------------------------------------------------------
// Name resolution

#[derive(Clone, Copy)]
enum Range<'a> {
    Region(&'a Region),
    Interval(&'a Interval),
}

enum Resolved<'a> {
    Atom {
        subject: Subject,
        op: Op,
        range: Range<'a>,
    },
    Not(Box<Resolved<'a>>),
    And(Vec<Resolved<'a>>),
    Or(Vec<Resolved<'a>>),
}

#[derive(Clone, Copy)]
enum Subject {
    Var,
    First,
    Last,
}

enum ResolvedClause<'a> {
    Ground(Resolved<'a>),
    Quantified {
        quantifier: Quantifier,
        domain: Domain,
        body: Resolved<'a>,
    },
}

fn resolve_body<'a>(body: &Body, env: &'a EvalEnv) -> Resolved<'a> {
    match body {
        Body::Atom(a) => {
            let range = match env.region(&a.object) {
                Some(r) => Range::Region(r),
                None => Range::Interval(env.interval(&a.object).expect("validated name")),
            };
            let subject = match a.subject {
                PointRef::Var(_) => Subject::Var,
                PointRef::First => Subject::First,
                PointRef::Last => Subject::Last,
            };
            Resolved::Atom {
                subject,
                op: a.op,
                range,
            }
        }
        Body::Not(b) => Resolved::Not(Box::new(resolve_body(b, env))),
        Body::And(bs) => Resolved::And(bs.iter().map(|b| resolve_body(b, env)).collect()),
        Body::Or(bs) => Resolved::Or(bs.iter().map(|b| resolve_body(b, env)).collect()),
    }
}

/// A predicate checked against an environment, ready to run on many
/// trajectories.
pub struct Bound<'a> {
    clauses: Vec<ResolvedClause<'a>>,
}

impl<'a> Bound<'a> {
    pub fn new(pred: &Predicate, env: &'a EvalEnv) -> Result<Self, EvalError> {
        validate(pred, &env.declarations())?;
        let clauses = pred
            .clauses()
            .iter()
            .map(|c| match c {
                Clause::Ground(b) => ResolvedClause::Ground(resolve_body(b, env)),
                Clause::Quantified {
                    quantifier,
                    domain,
                    body,
                    ..
                } => ResolvedClause::Quantified {
                    quantifier: *quantifier,
                    domain: *domain,
                    body: resolve_body(body, env),
                },
            })
            .collect();
        Ok(Bound { clauses })
    }

    pub fn strict(&self, t: &Trajectory) -> bool {
        self.clauses.iter().all(|c| match c {
            ResolvedClause::Ground(b) => holds_at(b, None, t),
            ResolvedClause::Quantified {
                quantifier,
                domain,
                body,
            } => {
                let points = match domain {
                    Domain::All => t.points(),
                    Domain::Inner => t.inner_points(),
                };
                let mut it = points.iter();
                match quantifier {
                    Quantifier::Exists => it.any(|p| holds_at(body, Some(p), t)),
                    Quantifier::ForAll => it.all(|p| holds_at(body, Some(p), t)),
                }
            }
        })
    }

    pub fn relaxed(&self, t: &Trajectory) -> bool {
        self.clauses.iter().all(|c| match c {
            ResolvedClause::Ground(b) => holds_at(b, None, t),
            ResolvedClause::Quantified {
                quantifier,
                domain,
                body,
            } => relaxed_clause(*quantifier, *domain, body, t),
        })
    }

    pub fn approximated(
        &self,
        t: &Trajectory,
        strategy: &ApproxStrategy,
    ) -> Result<bool, EvalError> {
        Ok(self.strict(&augment(t, strategy)?))
    }

    pub fn evaluate(&self, t: &Trajectory, strictness: &Strictness) -> Result<bool, EvalError> {
        match strictness {
            Strictness::Strict => Ok(self.strict(t)),
            Strictness::Relaxed => Ok(self.relaxed(t)),
            Strictness::Approximated(s) => self.approximated(t, s),
        }
    }
}

// ---------------------------------------------------------------------------
// Point semantics

fn region_op(op: Op, c: PointClass) -> bool {
    match op {
        Op::Within => c != PointClass::Exterior,
        Op::Inside => c == PointClass::Interior,
        Op::Outside => c == PointClass::Exterior,
        // Rejected by validation.
        Op::Before | Op::After => false,
    }
}

fn interval_op(op: Op, c: TimeClass) -> bool {
    match op {
        Op::Within => matches!(c, TimeClass::Interior | TimeClass::Boundary),
        Op::Inside => c == TimeClass::Interior,
        Op::Outside => matches!(c, TimeClass::Before | TimeClass::After),
        Op::Before => c == TimeClass::Before,
        Op::After => c == TimeClass::After,
    }
}

fn atom_at(op: Op, range: Range<'_>, p: &TrajectoryPoint) -> bool {
    match range {
        Range::Region(r) => region_op(op, classify_point_region(p.x, p.y, r)),
        Range::Interval(i) => interval_op(op, classify_time_interval(p.tau, i)),
    }
}

fn holds_at(body: &Resolved<'_>, var: Option<&TrajectoryPoint>, t: &Trajectory) -> bool {
    match body {
        Resolved::Atom { subject, op, range } => {
            let p = match subject {
                Subject::Var => match var {
                    Some(p) => p,
                    None => return false,
                },
                Subject::First => t.first_point(),
                Subject::Last => t.last_point(),
            };
            atom_at(*op, *range, p)
        }
        Resolved::Not(b) => !holds_at(b, var, t),
        Resolved::And(bs) => bs.iter().all(|b| holds_at(b, var, t)),
        Resolved::Or(bs) => bs.iter().any(|b| holds_at(b, var, t)),
    }
}

// ---------------------------------------------------------------------------
// Segment semantics

fn atom_set(op: Op, range: Range<'_>, s: &Segment) -> ParamSet {
    match range {
        Range::Region(r) => {
            let [interior, _, exterior] = segment_region_partition(s, r);
            match op {
                Op::Within => exterior.complement(),
                Op::Inside => interior,
                Op::Outside => exterior,
                Op::Before | Op::After => ParamSet::empty(),
            }
        }
        Range::Interval(i) => {
            let [before, boundary, interior, after] = segment_interval_partition(s, i);
            match op {
                Op::Within => boundary.union(&interior),
                Op::Inside => interior,
                Op::Outside => before.union(&after),
                Op::Before => before,
                Op::After => after,
            }
        }
    }
}

/// Parameters along `s` where the body holds for the moving point.
fn body_set(body: &Resolved<'_>, s: &Segment, t: &Trajectory) -> ParamSet {
    match body {
        Resolved::Atom {
            subject: Subject::Var,
            op,
            range,
        } => atom_set(*op, *range, s),
        Resolved::Atom { .. } => {
            if holds_at(body, None, t) {
                ParamSet::unit()
            } else {
                ParamSet::empty()
            }
        }
        Resolved::Not(b) => body_set(b, s, t).complement(),
        Resolved::And(bs) => {
            let mut acc = ParamSet::unit();
            for b in bs {
                if acc.is_empty() {
                    break;
                }
                acc = acc.intersect(&body_set(b, s, t));
            }
            acc
        }
        Resolved::Or(bs) => bs
            .iter()
            .fold(ParamSet::empty(), |acc, b| acc.union(&body_set(b, s, t))),
    }
}

/// The part of segment `index` (out of `count`) that belongs to the domain.
/// Shared vertices are covered by both neighbours, which does not change any
/// quantifier's value.
fn segment_domain(domain: Domain, index: usize, count: usize) -> ParamSet {
    match domain {
        Domain::All => ParamSet::unit(),
        Domain::Inner => ParamSet::span(Span {
            lo: 0.0,
            hi: 1.0,
            lo_closed: index > 0,
            hi_closed: index + 1 < count,
        }),
    }
}

fn relaxed_clause(
    quantifier: Quantifier,
    domain: Domain,
    body: &Resolved<'_>,
    t: &Trajectory,
) -> bool {
    let count = t.len() - 1;
    if count == 0 {
        // A single point: T is that point, TFL is empty.
        return match (domain, quantifier) {
            (Domain::All, Quantifier::Exists) | (Domain::All, Quantifier::ForAll) => {
                holds_at(body, Some(t.first_point()), t)
            }
            (Domain::Inner, Quantifier::Exists) => false,
            (Domain::Inner, Quantifier::ForAll) => true,
        };
    }
    let mut segments = t.segments().enumerate();
    match quantifier {
        Quantifier::Exists => segments.any(|(i, s)| {
            let dom = segment_domain(domain, i, count);
            !body_set(body, &s, t).intersect(&dom).is_empty()
        }),
        Quantifier::ForAll => segments.all(|(i, s)| {
            let dom = segment_domain(domain, i, count);
            dom.is_subset(&body_set(body, &s, t))
        }),
    }
}

/// Inserts strategy samples into every segment. Samples whose timestamp
/// would not be strictly increasing (possible through rounding on very short
/// segments) are skipped.
pub fn augment(t: &Trajectory, strategy: &ApproxStrategy) -> Result<Trajectory, EvalError> {
    let mut points: Vec<TrajectoryPoint> = Vec::with_capacity(t.len());
    points.push(*t.first_point());
    for s in t.segments() {
        let mut params = strategy.params(&s);
        if let Some(&bad) = params.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
            return Err(EvalError::BadParameter {
                strategy: strategy.name().to_owned(),
                value: bad,
            });
        }
        params.sort_by(f64::total_cmp);
        params.dedup();
        for l in params {
            let (x, y, tau) = lerp(&s, l).expect("parameter in range");
            if tau > points.last().expect("non-empty").tau && tau < s.end.tau {
                points.push(TrajectoryPoint::new(points.len(), x, y, tau));
            }
        }
        points.push(TrajectoryPoint::new(
            points.len(),
            s.end.x,
            s.end.y,
            s.end.tau,
        ));
    }
    Ok(Trajectory::from_points(points).expect("augmented trajectory keeps its invariants"))
}

pub fn eval_strict(pred: &Predicate, t: &Trajectory, env: &EvalEnv) -> Result<bool, EvalError> {
    Ok(Bound::new(pred, env)?.strict(t))
}

pub fn eval_relaxed(pred: &Predicate, t: &Trajectory, env: &EvalEnv) -> Result<bool, EvalError> {
    Ok(Bound::new(pred, env)?.relaxed(t))
}

pub fn eval_approximated(
    pred: &Predicate,
    t: &Trajectory,
    env: &EvalEnv,
    strategy: &ApproxStrategy,
) -> Result<bool, EvalError> {
    Bound::new(pred, env)?.approximated(t, strategy)
}

pub fn evaluate(
    pred: &Predicate,
    t: &Trajectory,
    env: &EvalEnv,
    strictness: &Strictness,
) -> Result<bool, EvalError> {
    Bound::new(pred, env)?.evaluate(t, strictness)
}

/// Keeps the trajectories that satisfy `pred`, in their original order.
pub fn select_st(
    rel: &TrajectoriesRelation,
    pred: &Predicate,
    env: &EvalEnv,
    strictness: &Strictness,
) -> Result<TrajectoriesRelation, EvalError> {
    let bound = Bound::new(pred, env)?;
    let keep: Vec<bool> = rel
        .rows()
        .par_iter()
        .map(|(_, t)| bound.evaluate(t, strictness))
        .collect::<Result<_, _>>()?;
    Ok(rel.retain_mask(&keep))
}
