//! Point and segment classification against query rectangles and time
//! intervals.
//!
//! All comparisons are exact: there is no epsilon anywhere in this module.
//! A point on the rectangle's perimeter is [`PointClass::Boundary`]; callers
//! that want tolerance must snap their coordinates first.

use std::fmt;

use thiserror::Error;

use crate::model::Segment;
use crate::paramset::{ParamSet, Span};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate region: need x_min < x_max and y_min < y_max, got ({0}, {1}, {2}, {3})")]
    DegenerateRegion(f64, f64, f64, f64),
    #[error("degenerate interval: need tau_s < tau_e, got ({0}, {1})")]
    DegenerateInterval(f64, f64),
    #[error("interpolation parameter {0} outside [0, 1]")]
    OutOfRange(f64),
}

/// Axis-aligned query rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    x_min: f64,
    y_min: f64,
    x_max: f64,
    y_max: f64,
}

impl Region {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self, GeometryError> {
        // Negated comparison also rejects NaN.
        if !(x_min < x_max && y_min < y_max)
            || ![x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite())
        {
            return Err(GeometryError::DegenerateRegion(x_min, y_min, x_max, y_max));
        }
        Ok(Region {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn y_min(&self) -> f64 {
        self.y_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn y_max(&self) -> f64 {
        self.y_max
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.x_min, self.y_min, self.x_max, self.y_max
        )
    }
}

/// Closed time interval; both endpoints are its border.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    tau_s: f64,
    tau_e: f64,
}

impl Interval {
    pub fn new(tau_s: f64, tau_e: f64) -> Result<Self, GeometryError> {
        if !tau_s.is_finite() || !tau_e.is_finite() || tau_s >= tau_e {
            return Err(GeometryError::DegenerateInterval(tau_s, tau_e));
        }
        Ok(Interval { tau_s, tau_e })
    }

    pub fn start(&self) -> f64 {
        self.tau_s
    }
    pub fn end(&self) -> f64 {
        self.tau_e
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.tau_s, self.tau_e)
    }
}

/// Where a point lies relative to a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointClass {
    Interior,
    Boundary,
    Exterior,
}

impl PointClass {
    pub const ALL: [PointClass; 3] = [
        PointClass::Interior,
        PointClass::Boundary,
        PointClass::Exterior,
    ];
}

/// Where a timestamp lies relative to an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TimeClass {
    Before,
    Boundary,
    Interior,
    After,
}

impl TimeClass {
    pub const ALL: [TimeClass; 4] = [
        TimeClass::Before,
        TimeClass::Boundary,
        TimeClass::Interior,
        TimeClass::After,
    ];
}

/// Position of one coordinate relative to a closed range `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AxisClass {
    Below,
    AtLo,
    Between,
    AtHi,
    Above,
}

fn classify_axis(v: f64, lo: f64, hi: f64) -> AxisClass {
    if v < lo {
        AxisClass::Below
    } else if v == lo {
        AxisClass::AtLo
    } else if v < hi {
        AxisClass::Between
    } else if v == hi {
        AxisClass::AtHi
    } else {
        AxisClass::Above
    }
}

pub fn classify_point_region(x: f64, y: f64, r: &Region) -> PointClass {
    use AxisClass::*;
    match (
        classify_axis(x, r.x_min, r.x_max),
        classify_axis(y, r.y_min, r.y_max),
    ) {
        (Below | Above, _) | (_, Below | Above) => PointClass::Exterior,
        (Between, Between) => PointClass::Interior,
        _ => PointClass::Boundary,
    }
}

pub fn classify_time_interval(tau: f64, i: &Interval) -> TimeClass {
    match classify_axis(tau, i.tau_s, i.tau_e) {
        AxisClass::Below => TimeClass::Before,
        AxisClass::AtLo | AxisClass::AtHi => TimeClass::Boundary,
        AxisClass::Between => TimeClass::Interior,
        AxisClass::Above => TimeClass::After,
    }
}

/// Linear interpolation of position and time along a segment. Exact at both
/// ends and constant along stationary axes.
pub fn lerp(s: &Segment, lambda: f64) -> Result<(f64, f64, f64), GeometryError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(GeometryError::OutOfRange(lambda));
    }
    if lambda == 1.0 {
        return Ok((s.end.x, s.end.y, s.end.tau));
    }
    let at = |a: f64, b: f64| a + lambda * (b - a);
    Ok((
        at(s.start.x, s.end.x),
        at(s.start.y, s.end.y),
        at(s.start.tau, s.end.tau),
    ))
}

/// Parameters where a linear coordinate `v(λ) = v0 + λ (v1 - v0)` is below,
/// equal to, and above `bound`. The three sets partition `[0, 1]` and the
/// endpoints always agree with a direct comparison of `v0` and `v1`.
fn split_at_bound(v0: f64, v1: f64, bound: f64) -> [ParamSet; 3] {
    let side = |v: f64| -> usize {
        if v < bound {
            0
        } else if v == bound {
            1
        } else {
            2
        }
    };
    let mut sets = if v0 == v1 {
        let mut sets = [ParamSet::empty(), ParamSet::empty(), ParamSet::empty()];
        sets[side(v0)] = ParamSet::unit();
        sets
    } else {
        let cross = (bound - v0) / (v1 - v0);
        let before = Span {
            lo: 0.0,
            hi: cross,
            lo_closed: true,
            hi_closed: false,
        };
        let after = Span {
            lo: cross,
            hi: 1.0,
            lo_closed: false,
            hi_closed: true,
        };
        let at = ParamSet::point(cross);
        if v1 > v0 {
            [ParamSet::span(before), at, ParamSet::span(after)]
        } else {
            [ParamSet::span(after), at, ParamSet::span(before)]
        }
    };
    // Rounding in `cross` must never contradict the exact vertex comparison.
    for (lambda, v) in [(0.0, v0), (1.0, v1)] {
        let correct = side(v);
        let p = ParamSet::point(lambda);
        for (k, set) in sets.iter_mut().enumerate() {
            let has = set.contains(lambda);
            if k == correct && !has {
                *set = set.union(&p);
            } else if k != correct && has {
                *set = set.difference(&p);
            }
        }
    }
    sets
}

struct AxisSets {
    outside: ParamSet,
    between: ParamSet,
}

fn axis_sets(v0: f64, v1: f64, lo: f64, hi: f64) -> AxisSets {
    let [below_lo, _, above_lo] = split_at_bound(v0, v1, lo);
    let [below_hi, _, above_hi] = split_at_bound(v0, v1, hi);
    AxisSets {
        outside: below_lo.union(&above_hi),
        between: above_lo.intersect(&below_hi),
    }
}

/// The three region classes along a segment, in [`PointClass::ALL`] order.
/// They partition `[0, 1]`.
pub fn segment_region_partition(s: &Segment, r: &Region) -> [ParamSet; 3] {
    let ax = axis_sets(s.start.x, s.end.x, r.x_min, r.x_max);
    let ay = axis_sets(s.start.y, s.end.y, r.y_min, r.y_max);
    let interior = ax.between.intersect(&ay.between);
    let exterior = ax.outside.union(&ay.outside);
    let boundary = interior.union(&exterior).complement();
    [interior, boundary, exterior]
}

/// `{λ ∈ [0, 1] : classify_point_region(lerp(s, λ), r) = c}`, computed by
/// clipping against the rectangle's edge lines.
pub fn segment_region_params(s: &Segment, r: &Region, c: PointClass) -> ParamSet {
    let [interior, boundary, exterior] = segment_region_partition(s, r);
    match c {
        PointClass::Interior => interior,
        PointClass::Boundary => boundary,
        PointClass::Exterior => exterior,
    }
}

/// The four time classes along a segment, in [`TimeClass::ALL`] order.
pub fn segment_interval_partition(s: &Segment, i: &Interval) -> [ParamSet; 4] {
    let [before, at_s, after_s] = split_at_bound(s.start.tau, s.end.tau, i.tau_s);
    let [before_e, at_e, after] = split_at_bound(s.start.tau, s.end.tau, i.tau_e);
    let interior = after_s.intersect(&before_e);
    [before, at_s.union(&at_e), interior, after]
}

/// `{λ ∈ [0, 1] : classify_time_interval(τ(λ), i) = c}`.
pub fn segment_interval_params(s: &Segment, i: &Interval, c: TimeClass) -> ParamSet {
    let [before, boundary, interior, after] = segment_interval_partition(s, i);
    match c {
        TimeClass::Before => before,
        TimeClass::Boundary => boundary,
        TimeClass::Interior => interior,
        TimeClass::After => after,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TrajectoryPoint;

    fn unit() -> Region {
        Region::new(0.0, 0.0, 1.0, 1.0).unwrap()
    }

    fn seg(a: (f64, f64, f64), b: (f64, f64, f64)) -> Segment {
        Segment {
            start: TrajectoryPoint::new(0, a.0, a.1, a.2),
            end: TrajectoryPoint::new(1, b.0, b.1, b.2),
        }
    }

    #[test]
    fn rejects_degenerate_ranges() {
        assert!(Region::new(1.0, 0.0, 1.0, 2.0).is_err());
        assert!(Region::new(0.0, f64::NAN, 1.0, 2.0).is_err());
        assert!(Interval::new(5.0, 5.0).is_err());
        assert!(Interval::new(6.0, 5.0).is_err());
    }

    #[test]
    fn point_classes() {
        assert_eq!(
            classify_point_region(0.5, 0.5, &unit()),
            PointClass::Interior
        );
        assert_eq!(
            classify_point_region(0.0, 0.0, &unit()),
            PointClass::Boundary
        );
        assert_eq!(
            classify_point_region(1.0, 0.3, &unit()),
            PointClass::Boundary
        );
        assert_eq!(
            classify_point_region(2.0, 2.0, &unit()),
            PointClass::Exterior
        );
        assert_eq!(
            classify_point_region(1.0, 1.5, &unit()),
            PointClass::Exterior
        );
    }

    #[test]
    fn time_classes() {
        let i = Interval::new(100.0, 140.0).unwrap();
        assert_eq!(classify_time_interval(115.0, &i), TimeClass::Interior);
        assert_eq!(classify_time_interval(140.0, &i), TimeClass::Boundary);
        assert_eq!(classify_time_interval(100.0, &i), TimeClass::Boundary);
        assert_eq!(classify_time_interval(150.0, &i), TimeClass::After);
        assert_eq!(classify_time_interval(99.0, &i), TimeClass::Before);
    }

    #[test]
    fn lerp_endpoints_and_midpoint() {
        let s = seg((0.0, 0.0, 0.0), (2.0, 4.0, 10.0));
        assert_eq!(lerp(&s, 0.0).unwrap(), (0.0, 0.0, 0.0));
        assert_eq!(lerp(&s, 1.0).unwrap(), (2.0, 4.0, 10.0));
        assert_eq!(lerp(&s, 0.5).unwrap(), (1.0, 2.0, 5.0));
        assert_eq!(lerp(&s, 1.5), Err(GeometryError::OutOfRange(1.5)));
        assert!(lerp(&s, f64::NAN).is_err());
    }

    #[test]
    fn horizontal_crossing_interior_is_open_third() {
        let s = seg((-1.0, 0.5, 0.0), (2.0, 0.5, 1.0));
        let p = segment_region_params(&s, &unit(), PointClass::Interior);
        assert_eq!(p.spans(), &[Span::open(1.0 / 3.0, 2.0 / 3.0)]);
        let b = segment_region_params(&s, &unit(), PointClass::Boundary);
        assert_eq!(
            b,
            ParamSet::point(1.0 / 3.0).union(&ParamSet::point(2.0 / 3.0))
        );
    }

    #[test]
    fn inside_and_collinear_edge_cases() {
        let inside = seg((0.2, 0.2, 0.0), (0.8, 0.7, 1.0));
        assert!(segment_region_params(&inside, &unit(), PointClass::Interior).is_unit());
        let edge = seg((0.0, 0.0, 0.0), (1.0, 0.0, 1.0));
        assert!(segment_region_params(&edge, &unit(), PointClass::Boundary).is_unit());
        let partly = seg((-1.0, 0.0, 0.0), (0.5, 0.0, 1.0));
        let b = segment_region_params(&partly, &unit(), PointClass::Boundary);
        assert_eq!(b.spans(), &[Span::closed(2.0 / 3.0, 1.0)]);
    }

    #[test]
    fn stationary_segment_takes_point_class() {
        let s = seg((0.0, 0.5, 0.0), (0.0, 0.5, 1.0));
        assert!(segment_region_params(&s, &unit(), PointClass::Boundary).is_unit());
        assert!(segment_region_params(&s, &unit(), PointClass::Interior).is_empty());
    }

    #[test]
    fn corner_touch_is_single_boundary_point() {
        let s = seg((-1.0, 0.0, 0.0), (1.0, 2.0, 1.0));
        let b = segment_region_params(&s, &unit(), PointClass::Boundary);
        assert_eq!(b, ParamSet::point(0.5));
        assert!(segment_region_params(&s, &unit(), PointClass::Interior).is_empty());
    }

    #[test]
    fn interval_params() {
        let i = Interval::new(100.0, 140.0).unwrap();
        let s = seg((0.0, 0.0, 120.0), (0.0, 0.0, 140.0));
        let p = segment_interval_params(&s, &i, TimeClass::Interior);
        assert_eq!(
            p.spans(),
            &[Span {
                lo: 0.0,
                hi: 1.0,
                lo_closed: true,
                hi_closed: false
            }]
        );
        assert_eq!(
            segment_interval_params(&s, &i, TimeClass::Boundary),
            ParamSet::point(1.0)
        );

        let late = seg((0.0, 0.0, 150.0), (0.0, 0.0, 160.0));
        assert!(segment_interval_params(&late, &i, TimeClass::After).is_unit());

        let early = seg((0.0, 0.0, 90.0), (0.0, 0.0, 110.0));
        let p = segment_interval_params(&early, &i, TimeClass::Before);
        assert_eq!(
            p.spans(),
            &[Span {
                lo: 0.0,
                hi: 0.5,
                lo_closed: true,
                hi_closed: false
            }]
        );
    }

    #[test]
    fn vertex_on_edge_stays_boundary_at_endpoint() {
        // Endpoint lies exactly on x = 1; the crossing must land on λ = 1.
        let s = seg((0.1, 0.5, 0.0), (1.0, 0.5, 1.0));
        let b = segment_region_params(&s, &unit(), PointClass::Boundary);
        assert!(b.contains(1.0));
        assert!(!segment_region_params(&s, &unit(), PointClass::Interior).contains(1.0));
    }
}
