//! Trajectory data model.
//!
//! A [`Trajectory`] is a non-empty sequence of timestamped planar points whose
//! `order` column runs `0..n` and whose timestamps strictly increase with the
//! order. Trajectories are grouped into a [`TrajectoriesRelation`] keyed by a
//! string `tid`, and application attributes live next to them in a
//! [`PropertyRelation`].

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("trajectory has no points")]
    EmptyTrajectory,
    #[error("timestamps must strictly increase: point {index} has tau {tau} after {previous}")]
    NonMonotoneTime {
        index: usize,
        previous: f64,
        tau: f64,
    },
    #[error("non-finite value in field `{field}` of point {index}")]
    NonFiniteValue { index: usize, field: &'static str },
    #[error("point {index} has order {found}, expected {expected}")]
    OrderGap {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("duplicate tid `{0}`")]
    DuplicateTid(String),
    #[error("unknown tid `{0}`")]
    UnknownTid(String),
    #[error("unknown property `{prop}` for tid `{tid}`")]
    UnknownProperty { tid: String, prop: String },
    #[error("point property `{prop}` of `{tid}` references missing order {order}")]
    DanglingOrder {
        tid: String,
        prop: String,
        order: usize,
    },
    #[error("point property `{prop}` of `{tid}` lists order {order} twice")]
    DuplicatePropertyOrder {
        tid: String,
        prop: String,
        order: usize,
    },
}

/// One sampled location of a moving object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub order: usize,
    pub x: f64,
    pub y: f64,
    pub tau: f64,
}

impl TrajectoryPoint {
    pub fn new(order: usize, x: f64, y: f64, tau: f64) -> Self {
        TrajectoryPoint { order, x, y, tau }
    }
}

impl fmt::Display for TrajectoryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.order, self.x, self.y, self.tau)
    }
}

/// Time-ordered point sequence. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    /// Builds a trajectory from `(x, y, tau)` triples, assigning orders in
    /// input sequence.
    pub fn new<I>(points: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (f64, f64, f64)>,
    {
        let points = points
            .into_iter()
            .enumerate()
            .map(|(order, (x, y, tau))| TrajectoryPoint { order, x, y, tau })
            .collect();
        Self::from_points(points)
    }

    /// Builds a trajectory from fully specified points, checking every
    /// invariant including the gap-free order column.
    pub fn from_points(points: Vec<TrajectoryPoint>) -> Result<Self, ModelError> {
        if points.is_empty() {
            return Err(ModelError::EmptyTrajectory);
        }
        for (index, p) in points.iter().enumerate() {
            for (field, v) in [("x", p.x), ("y", p.y), ("tau", p.tau)] {
                if !v.is_finite() {
                    return Err(ModelError::NonFiniteValue { index, field });
                }
            }
            if p.order != index {
                return Err(ModelError::OrderGap {
                    index,
                    expected: index,
                    found: p.order,
                });
            }
            if index > 0 {
                let previous = points[index - 1].tau;
                if p.tau <= previous {
                    return Err(ModelError::NonMonotoneTime {
                        index,
                        previous,
                        tau: p.tau,
                    });
                }
            }
        }
        Ok(Trajectory { points })
    }

    pub fn points(&self) -> &[TrajectoryPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for the `len`/`is_empty` convention.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first_point(&self) -> &TrajectoryPoint {
        &self.points[0]
    }

    pub fn last_point(&self) -> &TrajectoryPoint {
        &self.points[self.points.len() - 1]
    }

    /// Every point except the first and the last; empty for `n <= 2`.
    pub fn inner_points(&self) -> &[TrajectoryPoint] {
        if self.points.len() <= 2 {
            &[]
        } else {
            &self.points[1..self.points.len() - 1]
        }
    }

    /// Consecutive point pairs, ordered by start order.
    pub fn segments(&self) -> impl ExactSizeIterator<Item = Segment> + '_ {
        self.points.windows(2).map(|w| Segment {
            start: w[0],
            end: w[1],
        })
    }

    /// Time span `[tau_first, tau_last]`.
    pub fn span(&self) -> (f64, f64) {
        (self.first_point().tau, self.last_point().tau)
    }

    /// The `(x, y, tau)` triples this trajectory was built from.
    pub fn export(&self) -> Vec<(f64, f64, f64)> {
        self.points.iter().map(|p| (p.x, p.y, p.tau)).collect()
    }

    /// Same spatial path traversed backwards. Timestamps are negated so they
    /// still increase; only meaningful for purely spatial evaluation.
    pub fn reversed(&self) -> Trajectory {
        let points = self
            .points
            .iter()
            .rev()
            .enumerate()
            .map(|(order, p)| TrajectoryPoint {
                order,
                x: p.x,
                y: p.y,
                tau: -p.tau,
            })
            .collect();
        Trajectory { points }
    }
}

/// Straight line between two consecutive trajectory points. May have zero
/// spatial length; never zero duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: TrajectoryPoint,
    pub end: TrajectoryPoint,
}

impl Segment {
    pub fn is_stationary(&self) -> bool {
        self.start.x == self.end.x && self.start.y == self.end.y
    }
}

/// Relation of `(tid, trajectory)` rows with unique tids, kept in insertion
/// order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoriesRelation {
    rows: Vec<(String, Trajectory)>,
}

impl TrajectoriesRelation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rows(rows: Vec<(String, Trajectory)>) -> Result<Self, ModelError> {
        let mut seen = HashSet::with_capacity(rows.len());
        for (tid, _) in &rows {
            if !seen.insert(tid.as_str()) {
                return Err(ModelError::DuplicateTid(tid.clone()));
            }
        }
        Ok(TrajectoriesRelation { rows })
    }

    pub fn push(
        &mut self,
        tid: impl Into<String>,
        trajectory: Trajectory,
    ) -> Result<(), ModelError> {
        let tid = tid.into();
        if self.get(&tid).is_some() {
            return Err(ModelError::DuplicateTid(tid));
        }
        self.rows.push((tid, trajectory));
        Ok(())
    }

    pub fn rows(&self) -> &[(String, Trajectory)] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, tid: &str) -> Option<&Trajectory> {
        self.rows.iter().find(|(t, _)| t == tid).map(|(_, tr)| tr)
    }

    pub fn tids(&self) -> impl Iterator<Item = &str> {
        self.rows.iter().map(|(t, _)| t.as_str())
    }

    /// Keeps the rows for which `keep` is true, preserving order.
    pub(crate) fn retain_mask(&self, keep: &[bool]) -> TrajectoriesRelation {
        let rows = self
            .rows
            .iter()
            .zip(keep)
            .filter(|(_, k)| **k)
            .map(|(r, _)| r.clone())
            .collect();
        TrajectoriesRelation { rows }
    }
}

/// Scalar property value.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Str(String),
    Int(i64),
    Float(f64),
    Bool(bool),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Str(s) => f.write_str(s),
            Scalar::Int(i) => write!(f, "{i}"),
            // Debug keeps the trailing `.0`, so floats stay floats on re-read.
            Scalar::Float(v) => write!(f, "{v:?}"),
            Scalar::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<&str> for Scalar {
    fn from(s: &str) -> Self {
        Scalar::Str(s.to_owned())
    }
}

/// Properties attached to one trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryProperties {
    pub trajectory_props: BTreeMap<String, Scalar>,
    /// Point properties keyed by name; entries sorted by order.
    pub point_props: BTreeMap<String, Vec<(usize, Scalar)>>,
}

impl TrajectoryProperties {
    pub fn is_empty(&self) -> bool {
        self.trajectory_props.is_empty() && self.point_props.is_empty()
    }
}

/// Trajectory- and point-level properties, referencing trajectories by tid.
/// Point properties are tied to the point order, never to a timestamp.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PropertyRelation {
    rows: BTreeMap<String, TrajectoryProperties>,
}

impl PropertyRelation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.values().all(TrajectoryProperties::is_empty)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &TrajectoryProperties)> {
        self.rows.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn get(&self, tid: &str) -> Option<&TrajectoryProperties> {
        self.rows.get(tid)
    }

    pub fn set_trajectory_prop(&mut self, tid: &str, name: &str, value: Scalar) {
        self.rows
            .entry(tid.to_owned())
            .or_default()
            .trajectory_props
            .insert(name.to_owned(), value);
    }

    /// Sets the value of a point property; an existing value at the same
    /// order is replaced.
    pub fn set_point_prop(&mut self, tid: &str, name: &str, order: usize, value: Scalar) {
        let entries = self
            .rows
            .entry(tid.to_owned())
            .or_default()
            .point_props
            .entry(name.to_owned())
            .or_default();
        match entries.binary_search_by_key(&order, |(o, _)| *o) {
            Ok(i) => entries[i].1 = value,
            Err(i) => entries.insert(i, (order, value)),
        }
    }

    /// Names of all trajectory-level properties in use.
    pub fn trajectory_prop_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .rows
            .values()
            .flat_map(|r| r.trajectory_props.keys().cloned())
            .collect();
        names.sort();
        names.dedup();
        names
    }

    /// Names of all point-level properties in use.
    pub fn point_prop_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .rows
            .values()
            .flat_map(|r| r.point_props.keys().cloned())
            .collect();
        names.sort();
        names.dedup();
        names
    }

    /// Checks that every tid and every point order exists in `trajectories`.
    pub fn validate(&self, trajectories: &TrajectoriesRelation) -> Result<(), ModelError> {
        for (tid, props) in &self.rows {
            let t = trajectories
                .get(tid)
                .ok_or_else(|| ModelError::UnknownTid(tid.clone()))?;
            for (prop, entries) in &props.point_props {
                let mut prev: Option<usize> = None;
                for &(order, _) in entries {
                    if order >= t.len() {
                        return Err(ModelError::DanglingOrder {
                            tid: tid.clone(),
                            prop: prop.clone(),
                            order,
                        });
                    }
                    if prev == Some(order) {
                        return Err(ModelError::DuplicatePropertyOrder {
                            tid: tid.clone(),
                            prop: prop.clone(),
                            order,
                        });
                    }
                    prev = Some(order);
                }
            }
        }
        Ok(())
    }
}

/// One run of a point property read as holding over a stretch of the
/// trajectory: orders `begin..=end` all carry `value`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyRun {
    pub begin: usize,
    pub end: usize,
    pub value: Scalar,
}

/// Query-time view that merges consecutive orders sharing a point property
/// value into runs. Runs break on a value change or a gap in the orders.
pub fn segment_property_view(
    pr: &PropertyRelation,
    tid: &str,
    prop: &str,
) -> Result<Vec<PropertyRun>, ModelError> {
    let props = pr
        .get(tid)
        .ok_or_else(|| ModelError::UnknownTid(tid.to_owned()))?;
    let entries = props
        .point_props
        .get(prop)
        .ok_or_else(|| ModelError::UnknownProperty {
            tid: tid.to_owned(),
            prop: prop.to_owned(),
        })?;
    let mut runs: Vec<PropertyRun> = Vec::new();
    for (order, value) in entries {
        match runs.last_mut() {
            Some(run) if run.end + 1 == *order && run.value == *value => run.end = *order,
            _ => runs.push(PropertyRun {
                begin: *order,
                end: *order,
                value: value.clone(),
            }),
        }
    }
    Ok(runs)
}
