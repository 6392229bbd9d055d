//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use trajql::eval::{eval_relaxed, evaluate, select_st, EvalEnv, Strictness};
use trajql::geometry::{
    classify_point_region, classify_time_interval, lerp, segment_interval_params,
    segment_region_params, Interval, PointClass, Region, TimeClass,
};
use trajql::io::{export_csv, ingest_csv};
use trajql::model::{
    segment_property_view, Scalar, Segment, TrajectoriesRelation, TrajectoryPoint,
};
use trajql::nf2::{compile_spatial, compile_temporal, execute, to_nf2};
use trajql::paramset::ParamSet;
use trajql::predicate::{format_predicate, parse_predicate, Predicate};
use trajql::relations::{
    allen_predicate, classify_allen, classify_de9im, de9im_predicate, matching_allen, AllenLabel,
    De9imLabel,
};
use trajql_oracle::{allen_case_oracle, relaxed_oracle, ResampleSpec};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn parse(text: &str) -> Predicate {
    parse_predicate(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

// ---------------------------------------------------------------------------

fn crossing_example() -> Outcome {
    let (t, r) = common::crossing();
    let env = EvalEnv::new().with_region("R", r);
    let q1 = parse("EXISTS p IN T: p INSIDE R");
    let q2 = parse("FORALL p IN T: p OUTSIDE R");
    let got = [
        evaluate(&q1, &t, &env, &Strictness::Strict).map_err(|e| e.to_string())?,
        evaluate(&q1, &t, &env, &Strictness::Relaxed).map_err(|e| e.to_string())?,
        evaluate(&q2, &t, &env, &Strictness::Strict).map_err(|e| e.to_string())?,
        evaluate(&q2, &t, &env, &Strictness::Relaxed).map_err(|e| e.to_string())?,
    ];
    ensure(got == [false, true, true, false], || {
        format!("exists-inside strict/relaxed, forall-outside strict/relaxed = {got:?}")
    })?;
    Ok("exists-inside strict=false relaxed=true, forall-outside strict=true relaxed=false".into())
}

fn allen_completeness() -> Outcome {
    for &l in AllenLabel::ALL {
        let text = format_predicate(&allen_predicate(l));
        ensure(
            parse_predicate(&text).as_ref() == Ok(&allen_predicate(l)),
            || format!("{l} does not reparse"),
        )?;
    }
    const N: u64 = 100_000;
    let bad: Vec<String> = (0..N)
        .into_par_iter()
        .filter_map(|seed| {
            let mut rng = StdRng::seed_from_u64(0xA11E_0000 + seed);
            let a = rng.gen_range(0..40);
            let b = a + rng.gen_range(1..15);
            let s = rng.gen_range(0..40);
            let e = s + rng.gen_range(1..15);
            let i = Interval::new(f64::from(s), f64::from(e)).unwrap();
            let t = common::traj(&[(0.0, 0.0, f64::from(a)), (1.0, 1.0, f64::from(b))]);
            let label = classify_allen(&t, &i).ok()?;
            let oracle = allen_case_oracle(f64::from(a), f64::from(b), &i);
            let matching = matching_allen(&t, &i, &Strictness::Relaxed).unwrap();
            (label != oracle || matching != BTreeSet::from([label])).then(|| {
                format!("[{a},{b}] vs ({s},{e}): {label} / oracle {oracle} / formulas {matching:?}")
            })
        })
        .collect();
    ensure(bad.is_empty(), || {
        format!("{} disagreements, first: {}", bad.len(), bad[0])
    })?;
    Ok(format!(
        "13 labels parse; {N} grid instances agree with the case oracle, one label each"
    ))
}

fn de9im_completeness() -> Outcome {
    let sq = common::unit_square();
    for &l in De9imLabel::ALL {
        let text = format_predicate(&de9im_predicate(l));
        ensure(
            parse_predicate(&text).as_ref() == Ok(&de9im_predicate(l)),
            || format!("{l} does not reparse"),
        )?;
    }
    ensure(common::WITNESSES.len() == De9imLabel::ALL.len(), || {
        "witness table incomplete".into()
    })?;
    for &(label, pts) in common::WITNESSES {
        let t = common::path(pts);
        let got = classify_de9im(&t, &sq, &Strictness::Strict, true).map_err(|e| e.to_string())?;
        ensure(got == BTreeSet::from([label]), || {
            format!("witness for {label} matched {got:?}")
        })?;
    }
    Ok("19 labels parse; every witness matches only its own label".into())
}

fn five_relation_partition() -> Outcome {
    const N: u64 = 10_000;
    let five = [
        De9imLabel::R031,
        De9imLabel::R179,
        De9imLabel::R223,
        De9imLabel::R247,
        De9imLabel::R255,
    ];
    let bad: Vec<String> = (0..N)
        .into_par_iter()
        .filter_map(|seed| {
            let mut rng = StdRng::seed_from_u64(0x5_0000 + seed);
            let (t, r) = loop {
                let n = rng.gen_range(3..=20);
                let t = common::random_trajectory(&mut rng, n, 0.0, 10.0, 0.0);
                let r = common::random_region(&mut rng, 0.0, 10.0);
                if t.points()
                    .iter()
                    .all(|p| classify_point_region(p.x, p.y, &r) != PointClass::Boundary)
                {
                    break (t, r);
                }
            };
            let labels = classify_de9im(&t, &r, &Strictness::Strict, true).unwrap();
            let hits = five.iter().filter(|l| labels.contains(l)).count();
            (hits != 1).then(|| format!("seed {seed}: {labels:?}"))
        })
        .collect();
    ensure(bad.is_empty(), || {
        format!("{} violations, first: {}", bad.len(), bad[0])
    })?;
    Ok(format!("{N} trajectories, exactly one relation each"))
}

fn tids(rel: &TrajectoriesRelation) -> Vec<String> {
    rel.tids().map(str::to_owned).collect()
}

fn nf2_equivalence() -> Outcome {
    use De9imLabel::*;
    const N: u64 = 1_000;
    let mut checks: Vec<(Option<De9imLabel>, Option<AllenLabel>, Strictness)> = Vec::new();
    for l in [R031, R179, R223, R247, R255] {
        checks.push((Some(l), None, Strictness::Strict));
    }
    for l in [R031, R223] {
        checks.push((Some(l), None, Strictness::Relaxed));
    }
    for l in [
        AllenLabel::Precedes,
        AllenLabel::Overlaps,
        AllenLabel::During,
    ] {
        checks.push((None, Some(l), Strictness::Relaxed));
    }
    for l in [AllenLabel::Precedes, AllenLabel::During] {
        checks.push((None, Some(l), Strictness::Strict));
    }
    let bad: Vec<String> = (0..N)
        .into_par_iter()
        .flat_map_iter(|seed| {
            let mut rng = StdRng::seed_from_u64(0x0F2_0000 + seed);
            let rel = common::random_relation(&mut rng, 50, 20);
            let r = common::random_region(&mut rng, 0.0, 10.0);
            let i = common::random_interval(&mut rng, 40.0, 260.0);
            let env = EvalEnv::new().with_region("R", r).with_interval("I", i);
            let nested = to_nf2(&rel);
            checks
                .iter()
                .filter_map(|(spatial, temporal, s)| {
                    let (expr, pred, name) = match (spatial, temporal) {
                        (Some(l), _) => (
                            compile_spatial(*l, &r, s).unwrap(),
                            de9im_predicate(*l),
                            l.to_string(),
                        ),
                        (_, Some(l)) => (
                            compile_temporal(*l, &i).unwrap(),
                            allen_predicate(*l),
                            l.to_string(),
                        ),
                        _ => unreachable!(),
                    };
                    let engine = execute(&expr, &nested).unwrap().tids();
                    let evaluator = tids(&select_st(&rel, &pred, &env, s).unwrap());
                    (engine != evaluator)
                        .then(|| format!("seed {seed} {name} {s}: {engine:?} vs {evaluator:?}"))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    ensure(bad.is_empty(), || {
        format!("{} mismatches, first: {}", bad.len(), bad[0])
    })?;
    Ok(format!(
        "{N} relations, {} label/strictness pairs each, identical tid lists",
        checks.len()
    ))
}

/// Span endpoints of every set, midpoints between consecutive ones, and 0 and 1.
fn probes(sets: &[ParamSet]) -> (Vec<f64>, Vec<f64>) {
    let mut cuts = vec![0.0, 1.0];
    for s in sets {
        for sp in s.spans() {
            cuts.extend([sp.lo, sp.hi]);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mids = cuts
        .windows(2)
        .map(|w| w[0] + (w[1] - w[0]) / 2.0)
        .collect();
    (cuts, mids)
}

fn random_segment(rng: &mut StdRng) -> Segment {
    let mut c = || {
        if rng.gen_bool(0.5) {
            f64::from(rng.gen_range(-4i32..=8)) / 2.0
        } else {
            rng.gen_range(-2.0..4.0)
        }
    };
    let (x0, y0, x1, y1) = (c(), c(), c(), c());
    let t0 = f64::from(rng.gen_range(-4i32..=8)) / 2.0;
    let dt = f64::from(rng.gen_range(1i32..8)) / 2.0;
    Segment {
        start: TrajectoryPoint::new(0, x0, y0, t0),
        end: TrajectoryPoint::new(1, x1, y1, t0 + dt),
    }
}

fn paramset_partitions(rng: &mut StdRng) -> Result<(), String> {
    let s = random_segment(rng);
    let x = f64::from(rng.gen_range(-4i32..=6)) / 2.0;
    let y = f64::from(rng.gen_range(-4i32..=6)) / 2.0;
    let r = Region::new(
        x,
        y,
        x + f64::from(rng.gen_range(1i32..6)) / 2.0,
        y + f64::from(rng.gen_range(1i32..6)) / 2.0,
    )
    .unwrap();
    let a = f64::from(rng.gen_range(-4i32..=8)) / 2.0;
    let i = Interval::new(a, a + f64::from(rng.gen_range(1i32..6)) / 2.0).unwrap();

    let regions: Vec<ParamSet> = PointClass::ALL
        .iter()
        .map(|&c| segment_region_params(&s, &r, c))
        .collect();
    let times: Vec<ParamSet> = TimeClass::ALL
        .iter()
        .map(|&c| segment_interval_params(&s, &i, c))
        .collect();
    for sets in [&regions, &times] {
        let (cuts, mids) = probes(sets);
        for l in cuts.iter().chain(&mids) {
            let n = sets.iter().filter(|p| p.contains(*l)).count();
            ensure(n == 1, || format!("λ={l} in {n} classes on {s:?}"))?;
        }
    }
    // Open stretches between span endpoints, checked pointwise.
    let (_, mids) = probes(&regions);
    for l in mids {
        let (px, py, _) = lerp(&s, l).unwrap();
        let actual = classify_point_region(px, py, &r);
        let k = PointClass::ALL.iter().position(|c| *c == actual).unwrap();
        ensure(regions[k].contains(l), || {
            format!("λ={l}: point is {actual:?} on {s:?} vs {r}")
        })?;
    }
    let (_, mids) = probes(&times);
    for l in mids {
        let (_, _, tau) = lerp(&s, l).unwrap();
        let actual = classify_time_interval(tau, &i);
        let k = TimeClass::ALL.iter().position(|c| *c == actual).unwrap();
        ensure(times[k].contains(l), || {
            format!("λ={l}: time is {actual:?} on {s:?} vs {i}")
        })?;
    }
    Ok(())
}

fn relaxed_oracle_agreement() -> Outcome {
    const N: u64 = 10_000;
    const K: usize = 1_000;
    let corpus: Vec<Predicate> = common::SAMPLING_CORPUS.iter().map(|t| parse(t)).collect();
    let spec = ResampleSpec::new(K).unwrap();
    let bad: Vec<String> = (0..N)
        .into_par_iter()
        .flat_map_iter(|seed| {
            let mut rng = StdRng::seed_from_u64(0xAC1E_0000 + seed);
            let (t, r, i) = common::generic_instance(&mut rng, K);
            let env = EvalEnv::new().with_region("R", r).with_interval("I", i);
            corpus
                .iter()
                .filter_map(|p| {
                    let exact = eval_relaxed(p, &t, &env).unwrap();
                    let sampled = relaxed_oracle(p, &t, &env, spec).unwrap();
                    (exact != sampled)
                        .then(|| format!("seed {seed}: `{}` exact={exact}", format_predicate(p)))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    ensure(bad.is_empty(), || {
        format!("{} disagreements, first: {}", bad.len(), bad[0])
    })?;

    const SEGMENTS: u64 = 100_000;
    let bad: Vec<String> = (0..SEGMENTS)
        .into_par_iter()
        .filter_map(|seed| {
            paramset_partitions(&mut StdRng::seed_from_u64(0x9A4A_0000 + seed)).err()
        })
        .collect();
    ensure(bad.is_empty(), || {
        format!("{} partition failures, first: {}", bad.len(), bad[0])
    })?;
    Ok(format!(
        "{N} instances x {} predicates agree at k={K}; partitions hold on {SEGMENTS} segments",
        corpus.len()
    ))
}

fn property_fixtures() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = ingest_csv(common::fixture("goose.csv")).map_err(|e| e.to_string())?;
    let out = dir.path().join("goose.csv");
    export_csv(&d, &out).map_err(|e| e.to_string())?;
    for suffix in [".csv", ".props.csv", ".pprops.csv"] {
        let a =
            std::fs::read(common::fixture(&format!("goose{suffix}"))).map_err(|e| e.to_string())?;
        let b =
            std::fs::read(dir.path().join(format!("goose{suffix}"))).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("goose{suffix} differs after export"))?;
    }
    let again = ingest_csv(&out).map_err(|e| e.to_string())?;
    ensure(
        again.trajectories == d.trajectories && again.properties == d.properties,
        || "ingest is not a fixpoint".into(),
    )?;

    let runs: Vec<(usize, usize, Scalar)> =
        segment_property_view(&d.properties, "T0", "movement_type")
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|r| (r.begin, r.end, r.value))
            .collect();
    let want = vec![
        (0, 1, Scalar::Str("walking".into())),
        (2, 4, Scalar::Str("flying".into())),
    ];
    ensure(runs == want, || format!("runs {runs:?}"))?;
    Ok("three files byte-identical after export; runs [(0,1,walking),(2,4,flying)]".into())
}

fn combined_selection() -> Outcome {
    let d = ingest_csv(common::fixture("birds.csv")).map_err(|e| e.to_string())?;
    let env = EvalEnv::new()
        .with_region("R", Region::new(1.5, 0.5, 4.5, 1.5).unwrap())
        .with_interval("I", Interval::new(100.0, 140.0).unwrap());
    let pred = parse("EXISTS p IN T: p WITHIN R AND p WITHIN I");
    let selected = tids(
        &select_st(&d.trajectories, &pred, &env, &Strictness::Relaxed)
            .map_err(|e| e.to_string())?,
    );
    let has = |t: &str| selected.iter().any(|s| s == t);
    ensure(has("Tb") && !has("Tc"), || format!("selected {selected:?}"))?;
    Ok("T_b selected, T_c rejected".into())
}

fn mutate(rng: &mut StdRng, base: &str) -> Vec<u8> {
    const TOKENS: &[&[u8]] = &[
        b"EXISTS", b"FORALL", b"NOT", b"(", b")", b",", b":", b"AND", b"OR", b" ", b"pf", b"TFL",
    ];
    let mut b = base.as_bytes().to_vec();
    for _ in 0..rng.gen_range(1..=4) {
        let at = rng.gen_range(0..=b.len());
        match rng.gen_range(0..4) {
            0 if at < b.len() => {
                b.remove(at);
            }
            1 => b.insert(at, rng.gen()),
            2 if at < b.len() => b[at] = rng.gen(),
            _ => {
                let tok = TOKENS[rng.gen_range(0..TOKENS.len())];
                b.splice(at..at, tok.iter().copied());
            }
        }
    }
    b
}

fn parser_robustness() -> Outcome {
    let corpus: Vec<String> = std::fs::read_to_string(common::fixture("corpus.tsv"))
        .map_err(|e| e.to_string())?
        .lines()
        .map(|l| l.split_once('\t').map_or(l, |(_, t)| t).to_owned())
        .collect();
    for text in &corpus {
        parse_predicate(text).map_err(|e| format!("corpus `{text}`: {e}"))?;
    }

    const ASTS: u32 = 10_000;
    let config = Config {
        cases: ASTS,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner =
        TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[7; 32]));
    runner
        .run(&common::arb_predicate(), |ast| {
            let text = format_predicate(&ast);
            match parse_predicate(&text) {
                Ok(back) if back == ast => Ok(()),
                other => Err(TestCaseError::fail(format!("`{text}` -> {other:?}"))),
            }
        })
        .map_err(|e| e.to_string())?;

    const FUZZ: u64 = 100_000;
    let bad: Vec<String> = (0..FUZZ)
        .into_par_iter()
        .filter_map(|seed| {
            let mut rng = StdRng::seed_from_u64(0xF022_0000 + seed);
            let bytes = if seed % 2 == 0 {
                let n = rng.gen_range(0..80);
                (0..n).map(|_| rng.gen()).collect::<Vec<u8>>()
            } else {
                let base = rng.gen_range(0..corpus.len());
                mutate(&mut rng, &corpus[base])
            };
            let text = String::from_utf8_lossy(&bytes).into_owned();
            match catch_unwind(AssertUnwindSafe(|| parse_predicate(&text))) {
                Err(_) => Some(format!("panic on {text:?}")),
                Ok(Err(e)) if e.position > text.len() => {
                    Some(format!("position {} past end of {text:?}", e.position))
                }
                Ok(_) => None,
            }
        })
        .collect();
    ensure(bad.is_empty(), || {
        format!("{} failures, first: {}", bad.len(), bad[0])
    })?;
    Ok(format!(
        "{} corpus predicates parse; {ASTS} ASTs roundtrip; {FUZZ} fuzz inputs handled",
        corpus.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("crossing strict/relaxed", crossing_example),
        ("interval relations", allen_completeness),
        ("topological relations", de9im_completeness),
        ("five-relation partition", five_relation_partition),
        ("algebra/evaluator equivalence", nf2_equivalence),
        ("relaxed oracle and partitions", relaxed_oracle_agreement),
        ("property fixtures", property_fixtures),
        ("combined selection", combined_selection),
        ("parser robustness", parser_robustness),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(run).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} ({secs:.1}s)", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail} ({secs:.1}s)", n + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
