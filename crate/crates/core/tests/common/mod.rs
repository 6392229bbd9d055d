#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;
use trajql::geometry::{Interval, Region};
use trajql::model::{TrajectoriesRelation, Trajectory};
use trajql::predicate::{Body, Clause, Domain, Op, PointRef, Predicate, Quantifier};
use trajql::relations::De9imLabel;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub fn traj(points: &[(f64, f64, f64)]) -> Trajectory {
    Trajectory::new(points.iter().copied()).unwrap()
}

/// Points with taus 0, 1, 2, ...
pub fn path(points: &[(f64, f64)]) -> Trajectory {
    Trajectory::new(
        points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| (x, y, i as f64)),
    )
    .unwrap()
}

pub fn unit_square() -> Region {
    Region::new(0.0, 0.0, 1.0, 1.0).unwrap()
}

pub fn crossing() -> (Trajectory, Region) {
    let t = traj(&[
        (0.5, 1.5, 100.0),
        (2.2, 0.9, 110.0),
        (3.5, 0.35, 120.0),
        (5.4, 0.25, 130.0),
    ]);
    (t, Region::new(2.65, 0.6, 4.5, 1.75).unwrap())
}

/// `n` points with coordinates uniform in `[lo, hi)` and time steps in `[0.5, 10)`.
pub fn random_trajectory(rng: &mut StdRng, n: usize, lo: f64, hi: f64, t0: f64) -> Trajectory {
    let mut tau = t0;
    let pts: Vec<(f64, f64, f64)> = (0..n)
        .map(|_| {
            let p = (rng.gen_range(lo..hi), rng.gen_range(lo..hi), tau);
            tau += rng.gen_range(0.5..10.0);
            p
        })
        .collect();
    Trajectory::new(pts).unwrap()
}

pub fn random_region(rng: &mut StdRng, lo: f64, hi: f64) -> Region {
    let (a, b) = ordered_pair(rng, lo, hi);
    let (c, d) = ordered_pair(rng, lo, hi);
    Region::new(a, c, b, d).unwrap()
}

pub fn random_interval(rng: &mut StdRng, lo: f64, hi: f64) -> Interval {
    let (a, b) = ordered_pair(rng, lo, hi);
    Interval::new(a, b).unwrap()
}

/// Up to `max_rows` trajectories of 1 to `max_points` points, keyed `t0`, `t1`, ...
/// Coordinates lie in `[0, 10)` and start times in `[50, 150)`.
pub fn random_relation(
    rng: &mut StdRng,
    max_rows: usize,
    max_points: usize,
) -> TrajectoriesRelation {
    let rows = rng.gen_range(0..=max_rows);
    let mut rel = TrajectoriesRelation::new();
    for i in 0..rows {
        let n = rng.gen_range(1..=max_points);
        let t0 = rng.gen_range(50.0..150.0);
        rel.push(format!("t{i}"), random_trajectory(rng, n, 0.0, 10.0, t0))
            .unwrap();
    }
    rel
}

fn ordered_pair(rng: &mut StdRng, lo: f64, hi: f64) -> (f64, f64) {
    loop {
        let a: f64 = rng.gen_range(lo..hi);
        let b: f64 = rng.gen_range(lo..hi);
        if a < b {
            return (a, b);
        }
        if b < a {
            return (b, a);
        }
    }
}

// ---------------------------------------------------------------------------
// Relation witnesses

/// One hand-drawn trajectory per topological relation against the unit square.
pub const WITNESSES: &[(De9imLabel, &[(f64, f64)])] = &[
    (De9imLabel::R031, &[(0.5, 1.25), (1.0, 1.25)]),
    (
        De9imLabel::R095,
        &[(0.25, 1.25), (0.33, 1.0), (0.66, 1.0), (0.75, 1.25)],
    ),
    (De9imLabel::R179, &[(0.45, 0.25), (0.85, 0.75)]),
    (
        De9imLabel::R223,
        &[(0.5, 1.25), (0.875, 0.875), (1.25, 0.5)],
    ),
    (
        De9imLabel::R243,
        &[(0.25, 0.3), (0.25, 1.0), (0.75, 1.0), (0.75, 0.6)],
    ),
    (
        De9imLabel::R247,
        &[(0.75, 0.85), (1.25, 0.85), (1.25, 0.35), (0.75, 0.35)],
    ),
    (De9imLabel::R255, &[(0.5, 0.5), (1.25, 0.5)]),
    (
        De9imLabel::R279,
        &[(0.25, 1.0), (0.25, 1.25), (0.75, 1.25), (0.75, 1.0)],
    ),
    (De9imLabel::R287, &[(1.0, 0.25), (1.1, 0.5), (1.25, 0.75)]),
    (De9imLabel::R339, &[(0.25, 1.0), (1.0, 1.0), (1.0, 0.5)]),
    (
        De9imLabel::R343,
        &[
            (0.5, 0.0),
            (0.5, -0.25),
            (1.0, -0.25),
            (1.0, 0.0),
            (1.0, 0.5),
        ],
    ),
    (
        De9imLabel::R351,
        &[
            (1.0, 1.0),
            (1.0, 0.5),
            (1.0, 0.0),
            (0.75, -0.125),
            (0.5, -0.25),
        ],
    ),
    (De9imLabel::R403, &[(0.5, 0.0), (0.5, 0.5), (0.5, 1.0)]),
    (De9imLabel::R435, &[(0.5, 1.0), (0.5, 0.75), (0.5, 0.5)]),
    (
        De9imLabel::R467,
        &[(1.0, 0.75), (1.0, 0.5), (0.9, 0.3), (0.5, 0.25)],
    ),
    (
        De9imLabel::R471,
        &[
            (0.25, 1.0),
            (0.25, 1.25),
            (0.75, 1.25),
            (0.75, 0.5),
            (0.75, 0.0),
        ],
    ),
    (
        De9imLabel::R479,
        &[(0.5, 1.0), (0.5, 0.5), (0.5, -0.1), (0.5, -0.25)],
    ),
    (
        De9imLabel::R499,
        &[(0.25, 1.0), (0.75, 1.0), (0.75, 0.5), (0.75, 0.0)],
    ),
    (
        De9imLabel::R503,
        &[(0.25, 1.0), (0.25, 1.25), (0.75, 1.25), (0.75, 0.5)],
    ),
];

// ---------------------------------------------------------------------------
// Predicate ASTs

const RANGE_NAMES: &[&str] = &["R", "I", "Zone", "window2", "R_b"];
const VAR_NAMES: &[&str] = &["p", "q", "pt", "p1", "x_"];
const OPS: &[Op] = &[Op::Within, Op::Inside, Op::Outside, Op::Before, Op::After];

fn arb_body(subjects: Vec<PointRef>) -> impl Strategy<Value = Body> {
    let leaf = (
        proptest::sample::select(subjects),
        proptest::sample::select(OPS),
        proptest::sample::select(RANGE_NAMES),
    )
        .prop_map(|(s, op, name)| Body::atom(s, op, name));
    leaf.prop_recursive(4, 24, 4, |inner| {
        prop_oneof![
            inner.clone().prop_map(Body::not),
            proptest::collection::vec(inner.clone(), 2..4).prop_map(Body::and),
            proptest::collection::vec(inner, 2..4).prop_map(Body::or),
        ]
    })
}

fn arb_clause() -> impl Strategy<Value = Clause> {
    let quantified = (
        prop_oneof![Just(Quantifier::Exists), Just(Quantifier::ForAll)],
        proptest::sample::select(VAR_NAMES),
        prop_oneof![Just(Domain::All), Just(Domain::Inner)],
    )
        .prop_flat_map(|(quantifier, var, domain)| {
            arb_body(vec![PointRef::Var(var.to_owned())]).prop_map(move |body| Clause::Quantified {
                quantifier,
                var: var.to_owned(),
                domain,
                body,
            })
        });
    prop_oneof![
        arb_body(vec![PointRef::First, PointRef::Last]).prop_map(Clause::Ground),
        quantified
    ]
}

/// Structurally valid predicates; names are not checked against any environment.
pub fn arb_predicate() -> impl Strategy<Value = Predicate> {
    proptest::collection::vec(arb_clause(), 1..4).prop_map(Predicate::new)
}

// ---------------------------------------------------------------------------
// Generic instances for sampling oracles

/// Existential and universal predicates over `R` and `I` without
/// boundary-only atoms, so dense sampling converges to the continuum.
pub const SAMPLING_CORPUS: &[&str] = &[
    "EXISTS p IN T: p INSIDE R",
    "EXISTS p IN T: p WITHIN R AND p WITHIN I",
    "EXISTS p IN TFL: p OUTSIDE R",
    "FORALL p IN T: p OUTSIDE R",
    "FORALL p IN T: p WITHIN R",
    "FORALL p IN TFL: p INSIDE R OR p BEFORE I",
    "EXISTS p IN T: p INSIDE R AND NOT (p INSIDE I)",
    "FORALL p IN T: NOT (p INSIDE R) OR p AFTER I",
    "pf OUTSIDE R AND pl OUTSIDE R AND (EXISTS p IN TFL: p INSIDE R)",
];

/// Parameters where some coordinate of the segment `a -> b` meets a bound.
/// A segment running along a bound counts as crossing it at both ends.
fn crossings(a: f64, b: f64, bounds: [f64; 2], out: &mut Vec<f64>) {
    if a == b {
        if bounds.contains(&a) {
            out.extend([0.0, 1.0]);
        }
        return;
    }
    for bound in bounds {
        let l = (bound - a) / (b - a);
        if (-1e-9..=1.0 + 1e-9).contains(&l) {
            out.push(l);
        }
    }
}

/// True when, on every segment, all crossings of the region edges and the
/// interval endpoints are at least `gap` apart from each other and from the
/// segment ends, and no vertex lies on a border.
pub fn is_generic(t: &Trajectory, r: &Region, i: &Interval, gap: f64) -> bool {
    t.segments().all(|s| {
        let mut ls = Vec::new();
        crossings(s.start.x, s.end.x, [r.x_min(), r.x_max()], &mut ls);
        crossings(s.start.y, s.end.y, [r.y_min(), r.y_max()], &mut ls);
        crossings(s.start.tau, s.end.tau, [i.start(), i.end()], &mut ls);
        ls.push(0.0);
        ls.push(1.0);
        ls.sort_by(f64::total_cmp);
        ls.windows(2).all(|w| w[1] - w[0] >= gap)
    })
}

/// A trajectory of 3 to 6 points with region and interval, generic for
/// sampling at `k` points per segment.
pub fn generic_instance(rng: &mut StdRng, k: usize) -> (Trajectory, Region, Interval) {
    let gap = 3.0 / (k as f64 + 1.0);
    loop {
        let n = rng.gen_range(3..=6);
        let t0 = rng.gen_range(90.0..110.0);
        let t = random_trajectory(rng, n, 0.0, 10.0, t0);
        let r = random_region(rng, 0.0, 10.0);
        let i = random_interval(rng, 80.0, 170.0);
        if is_generic(&t, &r, &i, gap) {
            return (t, r, i);
        }
    }
}
