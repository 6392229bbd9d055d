mod common;

use std::fs;
use std::path::Path;

use rand::rngs::StdRng;
use rand::SeedableRng;
use trajql::io::{export_csv, ingest_csv, Dataset, DatasetError};
use trajql::model::{segment_property_view, Scalar};

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn fixtures_roundtrip_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["crossing", "goose", "birds"] {
        let src = common::fixture(&format!("{name}.csv"));
        let d = ingest_csv(&src).unwrap();
        let dst = dir.path().join(format!("{name}.csv"));
        export_csv(&d, &dst).unwrap();
        for suffix in [".csv", ".props.csv", ".pprops.csv"] {
            let a = common::fixture(&format!("{name}{suffix}"));
            let b = dir.path().join(format!("{name}{suffix}"));
            assert_eq!(a.exists(), b.exists(), "{name}{suffix}");
            if a.exists() {
                assert_eq!(
                    fs::read(&a).unwrap(),
                    fs::read(&b).unwrap(),
                    "{name}{suffix}"
                );
            }
        }
        let again = ingest_csv(&dst).unwrap();
        assert_eq!(again.trajectories, d.trajectories);
        assert_eq!(again.properties, d.properties);
    }
}

#[test]
fn property_runs_of_goose() {
    let d = ingest_csv(common::fixture("goose.csv")).unwrap();
    let runs: Vec<(usize, usize, Scalar)> =
        segment_property_view(&d.properties, "T0", "movement_type")
            .unwrap()
            .into_iter()
            .map(|r| (r.begin, r.end, r.value))
            .collect();
    assert_eq!(
        runs,
        vec![
            (0, 1, Scalar::Str("walking".into())),
            (2, 4, Scalar::Str("flying".into()))
        ]
    );
    assert_eq!(
        d.properties
            .get("T0")
            .unwrap()
            .trajectory_props
            .get("species"),
        Some(&Scalar::Str("goose".into()))
    );
}

#[test]
fn random_datasets_reach_a_fixpoint() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = StdRng::seed_from_u64(11);
    for k in 0..50 {
        let d = Dataset::new(common::random_relation(&mut rng, 6, 8));
        let p = dir.path().join(format!("r{k}.csv"));
        export_csv(&d, &p).unwrap();
        let first = fs::read(&p).unwrap();
        let back = ingest_csv(&p).unwrap();
        assert_eq!(back.trajectories, d.trajectories);
        export_csv(&back, &p).unwrap();
        assert_eq!(fs::read(&p).unwrap(), first);
    }
}

#[test]
fn empty_dataset_exports_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("empty.csv");
    export_csv(&Dataset::default(), &p).unwrap();
    assert_eq!(fs::read_to_string(&p).unwrap(), "tid,order,x,y,tau\n");
    assert!(!dir.path().join("empty.props.csv").exists());
    assert!(ingest_csv(&p).unwrap().trajectories.is_empty());
}

#[test]
fn stale_property_files_are_removed() {
    let dir = tempfile::tempdir().unwrap();
    let d = ingest_csv(common::fixture("goose.csv")).unwrap();
    let p = dir.path().join("out.csv");
    export_csv(&d, &p).unwrap();
    assert!(
        dir.path().join("out.props.csv").exists() && dir.path().join("out.pprops.csv").exists()
    );
    export_csv(&Dataset::new(d.trajectories.clone()), &p).unwrap();
    assert!(
        !dir.path().join("out.props.csv").exists() && !dir.path().join("out.pprops.csv").exists()
    );
}

#[test]
fn rows_are_grouped_and_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "mixed.csv",
        "tid,order,x,y,tau\nb,1,1,1,2\na,0,0,0,0\nb,0,0,0,1\n",
    );
    let d = ingest_csv(&p).unwrap();
    let tids: Vec<&str> = d.trajectories.tids().collect();
    assert_eq!(tids, vec!["a", "b"]);
    assert_eq!(
        d.trajectories.get("b").unwrap().export(),
        vec![(0.0, 0.0, 1.0), (1.0, 1.0, 2.0)]
    );
}

#[test]
fn malformed_inputs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "tau.csv",
        "tid,order,x,y,tau\na,0,0,0,5\na,1,1,1,5\n",
    );
    assert!(
        matches!(ingest_csv(&p), Err(DatasetError::InvariantViolation { tid, .. }) if tid == "a")
    );

    let p = write(
        dir.path(),
        "dup.csv",
        "tid,order,x,y,tau\na,0,0,0,1\na,0,1,1,2\n",
    );
    assert_eq!(
        ingest_csv(&p),
        Err(DatasetError::DuplicateKey {
            tid: "a".into(),
            order: 0
        })
    );

    let p = write(dir.path(), "num.csv", "tid,order,x,y,tau\na,0,0,zero,1\n");
    match ingest_csv(&p) {
        Err(DatasetError::ParseError { line, column, .. }) => assert_eq!((line, column), (2, 4)),
        other => panic!("{other:?}"),
    }

    let p = write(dir.path(), "inf.csv", "tid,order,x,y,tau\na,0,0,0,inf\n");
    assert!(matches!(
        ingest_csv(&p),
        Err(DatasetError::ParseError { column: 5, .. })
    ));

    let p = write(dir.path(), "head.csv", "tid,x,order,y,tau\n");
    assert!(matches!(
        ingest_csv(&p),
        Err(DatasetError::ParseError { line: 1, .. })
    ));

    let p = write(dir.path(), "orphan.csv", "tid,order,x,y,tau\na,0,0,0,1\n");
    write(dir.path(), "orphan.props.csv", "tid,color\nzz,red\n");
    assert!(matches!(
        ingest_csv(&p),
        Err(DatasetError::InvariantViolation { .. })
    ));

    assert!(matches!(
        ingest_csv(dir.path().join("missing.csv")),
        Err(DatasetError::IoError { .. })
    ));
}
