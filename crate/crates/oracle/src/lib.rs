//! Brute-force reference implementations. Slow on purpose and written
//! without the production geometry, so tests can compare two code paths.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use trajql::eval::{eval_strict, EvalEnv, EvalError};
use trajql::geometry::Interval;
use trajql::model::{Trajectory, TrajectoryPoint};
use trajql::predicate::{format_predicate, Predicate};
use trajql::relations::AllenLabel;

/// Number of evenly spaced points inserted into every segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResampleSpec {
    k: usize,
}

impl ResampleSpec {
    /// `None` for `k = 0`.
    pub fn new(k: usize) -> Option<Self> {
        (k >= 1).then_some(ResampleSpec { k })
    }

    pub fn k(self) -> usize {
        self.k
    }
}

/// Inserts `k` points at `λ = j/(k+1)` into each segment.
///
/// A generated point whose time does not strictly exceed its predecessor's
/// (possible only for segments spanning a few ulps) is dropped.
pub fn resample(t: &Trajectory, spec: ResampleSpec) -> Trajectory {
    let pts = t.points();
    let mut out: Vec<(f64, f64, f64)> = Vec::with_capacity(pts.len() + spec.k * pts.len());
    let mut push = |x: f64, y: f64, tau: f64| {
        if out.last().map_or(true, |&(_, _, prev)| tau > prev) {
            out.push((x, y, tau));
        }
    };
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        push(a.x, a.y, a.tau);
        for j in 1..=spec.k {
            let l = j as f64 / (spec.k + 1) as f64;
            push(
                a.x + l * (b.x - a.x),
                a.y + l * (b.y - a.y),
                a.tau + l * (b.tau - a.tau),
            );
        }
    }
    let last = pts[pts.len() - 1];
    push(last.x, last.y, last.tau);
    let points = out
        .into_iter()
        .enumerate()
        .map(|(order, (x, y, tau))| TrajectoryPoint::new(order, x, y, tau))
        .collect();
    Trajectory::from_points(points).expect("resampled points keep the trajectory invariants")
}

/// Strict evaluation over the resampled trajectory.
pub fn relaxed_oracle(
    pred: &Predicate,
    t: &Trajectory,
    env: &EvalEnv,
    spec: ResampleSpec,
) -> Result<bool, EvalError> {
    eval_strict(pred, &resample(t, spec), env)
}

/// Interval relation of `[tf, tl]` against `i`, by listing the thirteen
/// endpoint orderings one by one. Requires `tf < tl`.
pub fn allen_case_oracle(tf: f64, tl: f64, i: &Interval) -> AllenLabel {
    use AllenLabel::*;
    let (s, e) = (i.start(), i.end());
    assert!(tf < tl, "allen_case_oracle needs a non-degenerate span");
    let cases: [(bool, AllenLabel); 13] = [
        (tl < s, Precedes),
        (tl == s, Meets),
        (tf < s && s < tl && tl < e, Overlaps),
        (tf == s && tl < e, Starts),
        (s < tf && tl < e, During),
        (s < tf && tf < e && tl == e, Finishes),
        (tf == s && tl == e, Equals),
        (tf < s && tl == e, FinishedBy),
        (tf < s && e < tl, Contains),
        (tf == s && e < tl, StartedBy),
        (s < tf && tf < e && e < tl, OverlappedBy),
        (tf == e, MetBy),
        (e < tf, PrecededBy),
    ];
    let mut hits = cases.iter().filter(|(cond, _)| *cond).map(|&(_, l)| l);
    let label = hits.next().expect("the endpoint cases are exhaustive");
    assert!(hits.next().is_none(), "the endpoint cases overlap");
    label
}

/// One disagreement between two evaluation paths, serialized as a JSON line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub predicate: String,
    /// `(x, y, tau)` per point, in order.
    pub trajectory: Vec<(f64, f64, f64)>,
    /// `[x_min, y_min, x_max, y_max]` per region name.
    pub regions: BTreeMap<String, [f64; 4]>,
    /// `[start, end]` per interval name.
    pub intervals: BTreeMap<String, [f64; 2]>,
    pub verdicts: BTreeMap<String, bool>,
}

impl Counterexample {
    /// Records `pred` on `t`; region and interval values are looked up in `env`
    /// for every name the predicate mentions.
    pub fn new(pred: &Predicate, t: &Trajectory, env: &EvalEnv, verdicts: &[(&str, bool)]) -> Self {
        let mut regions = BTreeMap::new();
        let mut intervals = BTreeMap::new();
        for atom in pred.atoms() {
            if let Some(r) = env.region(&atom.object) {
                regions.insert(
                    atom.object.clone(),
                    [r.x_min(), r.y_min(), r.x_max(), r.y_max()],
                );
            } else if let Some(i) = env.interval(&atom.object) {
                intervals.insert(atom.object.clone(), [i.start(), i.end()]);
            }
        }
        Counterexample {
            predicate: format_predicate(pred),
            trajectory: t.export(),
            regions,
            intervals,
            verdicts: verdicts.iter().map(|&(k, v)| (k.to_owned(), v)).collect(),
        }
    }
}

/// Writes one JSON object per line.
pub fn dump_jsonl<'a>(
    out: &mut dyn Write,
    items: impl IntoIterator<Item = &'a Counterexample>,
) -> io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut *out, item)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
