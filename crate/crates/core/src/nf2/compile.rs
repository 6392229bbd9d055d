//! Algebra expressions for spatial and temporal trajectory selection.

use crate::eval::Strictness;
use crate::geometry::{Interval, Region};
use crate::model::TrajectoriesRelation;
use crate::relations::{AllenLabel, De9imLabel};

use super::exec::execute;
use super::expr::{Cond, HitMode, ProjItem, RelExpr, ScalarExpr};
use super::value::{Relation, Schema, Value};
use super::Nf2Error;

/// Converts a trajectories relation into the nested `(tid, T(order, x, y, tau))` form.
pub fn to_nf2(rel: &TrajectoriesRelation) -> Relation {
    let rows = rel
        .rows()
        .iter()
        .map(|(tid, t)| {
            let points = t
                .points()
                .iter()
                .map(|p| {
                    vec![
                        Value::Int(p.order as i64),
                        Value::Float(p.x),
                        Value::Float(p.y),
                        Value::Float(p.tau),
                    ]
                })
                .collect();
            vec![
                Value::Str(tid.clone()),
                Value::Rel(Relation::from_parts(Schema::trajectory(), points)),
            ]
        })
        .collect();
    Relation::from_parts(Schema::trajectories(), rows)
}

fn t() -> RelExpr {
    RelExpr::attr("T")
}

fn attr(name: &str) -> ScalarExpr {
    ScalarExpr::attr(name)
}

fn lit(v: f64) -> ScalarExpr {
    ScalarExpr::float(v)
}

/// `SELECT[order = 0](T)`
pub fn p_first() -> RelExpr {
    t().select(attr("order").eq(ScalarExpr::int(0)))
}

/// `SELECT[order = MAX(PROJECT[order](T))](T)`
pub fn p_last() -> RelExpr {
    t().select(attr("order").eq(ScalarExpr::max(t().project(&["order"]))))
}

/// Consecutive point pairs of `T`:
/// `PROJECT[T.order, T.x, T.y, T'.x, T'.y](JOIN[T.order + 1 = T'.order](T AS T, T AS T'))`
pub fn t_sgmt() -> RelExpr {
    let cond = attr("T.order")
        .plus(ScalarExpr::int(1))
        .eq(attr("T'.order"));
    t().join("T", t(), "T'", cond)
        .project(&["T.order", "T.x", "T.y", "T'.x", "T'.y"])
}

/// `PROJECT[tid, <t_sgmt> AS T_sgmt](Trajectories)` evaluated on `trajectories`.
pub fn segment_join(trajectories: &Relation) -> Result<Relation, Nf2Error> {
    let e = RelExpr::Input.project_items(vec![
        ProjItem::Attr {
            name: "tid".into(),
            alias: None,
        },
        ProjItem::Nested {
            expr: t_sgmt(),
            alias: "T_sgmt".into(),
        },
    ]);
    execute(&e, trajectories)
}

fn coord(e: RelExpr, axis: &str) -> ScalarExpr {
    ScalarExpr::single(e.project(&[axis]))
}

fn strictly_inside(e: fn() -> RelExpr, r: &Region) -> Vec<Cond> {
    vec![
        coord(e(), "x").gt(lit(r.x_min())),
        coord(e(), "x").lt(lit(r.x_max())),
        coord(e(), "y").gt(lit(r.y_min())),
        coord(e(), "y").lt(lit(r.y_max())),
    ]
}

fn strictly_outside(e: fn() -> RelExpr, r: &Region) -> Cond {
    Cond::or(vec![
        coord(e(), "x").lt(lit(r.x_min())),
        coord(e(), "y").lt(lit(r.y_min())),
        coord(e(), "x").gt(lit(r.x_max())),
        coord(e(), "y").gt(lit(r.y_max())),
    ])
}

fn interior_points(r: &Region) -> RelExpr {
    t().select(Cond::and(vec![
        lit(r.x_min()).lt(attr("x")),
        lit(r.y_min()).lt(attr("y")),
        lit(r.x_max()).gt(attr("x")),
        lit(r.y_max()).gt(attr("y")),
    ]))
}

fn segments_hitting(r: &Region, mode: HitMode) -> RelExpr {
    t_sgmt().select(Cond::SegmentHits {
        coords: Box::new([attr("T.x"), attr("T.y"), attr("T'.x"), attr("T'.y")]),
        region: *r,
        mode,
    })
}

/// Selection expression for one of R031, R179, R223, R247 and R255.
///
/// Strict expressions compare recorded points only. Under `Relaxed`, R031
/// and R223 additionally test every segment against the region; the other
/// three are unchanged because the rectangle is convex.
pub fn compile_spatial(label: De9imLabel, r: &Region, s: &Strictness) -> Result<RelExpr, Nf2Error> {
    let relaxed = match s {
        Strictness::Strict => false,
        Strictness::Relaxed => true,
        Strictness::Approximated(_) => return Err(Nf2Error::UnsupportedStrictness(s.to_string())),
    };
    let cond = match label {
        De9imLabel::R179 => Cond::and(vec![
            lit(r.x_min()).lt(ScalarExpr::min(t().project(&["x"]))),
            lit(r.y_min()).lt(ScalarExpr::min(t().project(&["y"]))),
            lit(r.x_max()).gt(ScalarExpr::max(t().project(&["x"]))),
            lit(r.y_max()).gt(ScalarExpr::max(t().project(&["y"]))),
        ]),
        De9imLabel::R247 => {
            let mut parts = strictly_inside(p_first, r);
            parts.extend(strictly_inside(p_last, r));
            parts.push(Cond::or(vec![
                ScalarExpr::min(t().project(&["x"])).lt(lit(r.x_min())),
                ScalarExpr::max(t().project(&["x"])).gt(lit(r.x_max())),
                ScalarExpr::min(t().project(&["y"])).lt(lit(r.y_min())),
                ScalarExpr::max(t().project(&["y"])).gt(lit(r.y_max())),
            ]));
            Cond::and(parts)
        }
        De9imLabel::R255 => {
            let mut parts = strictly_inside(p_first, r);
            parts.push(Cond::or(vec![
                ScalarExpr::min(p_last().project(&["x"])).lt(lit(r.x_min())),
                ScalarExpr::max(p_last().project(&["x"])).gt(lit(r.x_max())),
                ScalarExpr::min(p_last().project(&["y"])).lt(lit(r.y_min())),
                ScalarExpr::max(p_last().project(&["y"])).gt(lit(r.y_max())),
            ]));
            Cond::and(parts)
        }
        De9imLabel::R031 => {
            let none_inside = ScalarExpr::count(interior_points(r)).eq(ScalarExpr::int(0));
            if relaxed {
                let no_hit =
                    ScalarExpr::count(segments_hitting(r, HitMode::Closed)).eq(ScalarExpr::int(0));
                Cond::and(vec![none_inside, no_hit])
            } else {
                none_inside
            }
        }
        De9imLabel::R223 => {
            let inside = t().select(Cond::and(vec![
                attr("x").gt(lit(r.x_min())),
                attr("y").gt(lit(r.y_min())),
                attr("x").lt(lit(r.x_max())),
                attr("y").lt(lit(r.y_max())),
            ]));
            let points_inside = ScalarExpr::count(inside).gt(ScalarExpr::int(0));
            let enters = if relaxed {
                let hits = ScalarExpr::count(segments_hitting(r, HitMode::Interior))
                    .gt(ScalarExpr::int(0));
                Cond::or(vec![points_inside, hits])
            } else {
                points_inside
            };
            Cond::and(vec![
                strictly_outside(p_first, r),
                strictly_outside(p_last, r),
                enters,
            ])
        }
        other => return Err(Nf2Error::UnsupportedLabel(other.to_string())),
    };
    Ok(RelExpr::Input.select(cond))
}

/// Selection expression for an interval relation that avoids touching the
/// interval's endpoints: Precedes, Overlaps, During and their mirrors.
pub fn compile_temporal(label: AllenLabel, i: &Interval) -> Result<RelExpr, Nf2Error> {
    let min = || ScalarExpr::min(t().project(&["tau"]));
    let max = || ScalarExpr::max(t().project(&["tau"]));
    let (ts, te) = (|| lit(i.start()), || lit(i.end()));
    let cond = match label {
        AllenLabel::Precedes => max().lt(ts()),
        AllenLabel::Overlaps => Cond::and(vec![min().lt(ts()), max().gt(ts()), max().lt(te())]),
        AllenLabel::During => Cond::and(vec![min().gt(ts()), max().lt(te())]),
        AllenLabel::PrecededBy => min().gt(te()),
        AllenLabel::OverlappedBy => Cond::and(vec![min().gt(ts()), min().lt(te()), max().gt(te())]),
        AllenLabel::Contains => Cond::and(vec![min().lt(ts()), max().gt(te())]),
        other => return Err(Nf2Error::UnsupportedLabel(other.to_string())),
    };
    Ok(RelExpr::Input.select(cond))
}
