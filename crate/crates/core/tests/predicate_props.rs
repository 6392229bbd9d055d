mod common;

use proptest::prelude::*;
use trajql::predicate::{
    format_predicate, parse_checked, parse_predicate, validate, Body, Clause, Declarations,
    Diagnostic, Domain, Op, PointRef, Predicate, PredicateError, RangeKind,
};
use trajql::relations::{allen_predicate, de9im_predicate, AllenLabel, De9imLabel};

fn corpus() -> Vec<(String, String)> {
    std::fs::read_to_string(common::fixture("corpus.tsv"))
        .unwrap()
        .lines()
        .map(|l| {
            let (label, text) = l.split_once('\t').unwrap();
            (label.to_owned(), text.to_owned())
        })
        .collect()
}

fn decls() -> Declarations {
    [
        ("R".to_owned(), RangeKind::Region),
        ("I".to_owned(), RangeKind::Interval),
    ]
    .into_iter()
    .collect()
}

#[test]
fn corpus_parses_and_validates() {
    let corpus = corpus();
    assert_eq!(
        corpus.iter().filter(|(l, _)| l != "inline").count(),
        19 + 13
    );
    for (label, text) in &corpus {
        let ast = parse_checked(text, &decls()).unwrap_or_else(|e| panic!("{label}: {e}"));
        assert_eq!(
            parse_predicate(&format_predicate(&ast)).unwrap(),
            ast,
            "{label}"
        );
    }
}

#[test]
fn catalog_matches_checked_in_corpus() {
    let corpus = corpus();
    let find = |label: &str| {
        corpus
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, t)| t.clone())
            .unwrap()
    };
    for &l in De9imLabel::ALL {
        assert_eq!(format_predicate(&de9im_predicate(l)), find(l.name()), "{l}");
    }
    for &l in AllenLabel::ALL {
        assert_eq!(format_predicate(&allen_predicate(l)), find(l.name()), "{l}");
    }
}

#[test]
fn documented_parses() {
    let ast = parse_predicate("EXISTS p IN T: p WITHIN R AND p WITHIN I").unwrap();
    let expect = Predicate::single(Clause::exists(
        "p",
        Domain::All,
        Body::and(vec![
            Body::atom(PointRef::Var("p".into()), Op::Within, "R"),
            Body::atom(PointRef::Var("p".into()), Op::Within, "I"),
        ]),
    ));
    assert_eq!(ast, expect);

    let ast = parse_predicate("pf INSIDE R AND pl OUTSIDE R").unwrap();
    assert_eq!(
        ast,
        Predicate::single(Clause::Ground(Body::and(vec![
            Body::atom(PointRef::First, Op::Inside, "R"),
            Body::atom(PointRef::Last, Op::Outside, "R"),
        ])))
    );

    let err = parse_checked("FORALL p IN T: p BEFORE R", &decls()).unwrap_err();
    assert!(
        matches!(err, PredicateError::Invalid(ref v) if matches!(v.diagnostics[0], Diagnostic::TypeError { .. }))
    );

    let ast = parse_predicate("pf, pl INSIDE R AND (EXISTS p IN TFL: p OUTSIDE R)").unwrap();
    assert!(validate(&ast, &decls()).is_ok());
    let ast = parse_predicate("EXISTS p IN T: p INSIDE J").unwrap();
    let diags = validate(&ast, &decls()).unwrap_err().diagnostics;
    assert!(matches!(&diags[..], [Diagnostic::UnknownName { name }] if name == "J"));
}

#[test]
fn canonical_printing() {
    let ast = Predicate::single(Clause::forall(
        "p",
        Domain::All,
        Body::atom(PointRef::Var("p".into()), Op::Outside, "R"),
    ));
    assert_eq!(format_predicate(&ast), "FORALL p IN T: p OUTSIDE R");
    let border = parse_predicate("EXISTS p IN T: p WITHIN R AND NOT(p INSIDE R)").unwrap();
    assert_eq!(
        format_predicate(&border),
        "EXISTS p IN T: p WITHIN R AND NOT (p INSIDE R)"
    );
}

#[test]
fn syntax_errors_point_at_the_offence() {
    for (text, pos) in [
        ("EXISTS p IN T p INSIDE R", 14),
        ("pf INSIDE", 9),
        ("pf INSIDE R AND", 15),
        ("EXISTS p IN X: p INSIDE R", 12),
        ("pf inside R", 3),
        ("", 0),
        ("pf INSIDE R)", 11),
    ] {
        let err = parse_predicate(text).unwrap_err();
        assert_eq!(err.position, pos, "{text:?}: {err}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn parse_inverts_format(ast in common::arb_predicate()) {
        let text = format_predicate(&ast);
        let back = parse_predicate(&text);
        prop_assert_eq!(back.as_ref(), Ok(&ast), "{}", text);
    }

    #[test]
    fn arbitrary_text_never_panics(text in any::<String>()) {
        if let Err(e) = parse_predicate(&text) {
            prop_assert!(e.position <= text.len());
        }
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
        let text = String::from_utf8_lossy(&bytes);
        if let Err(e) = parse_predicate(&text) {
            prop_assert!(e.position <= text.len());
        }
    }

    #[test]
    fn token_soup_never_panics(
        words in proptest::collection::vec(
            proptest::sample::select(vec![
                "EXISTS", "FORALL", "p", "IN", "T", "TFL", ":", "pf", "pl", ",", "WITHIN", "INSIDE",
                "OUTSIDE", "BEFORE", "AFTER", "R", "I", "AND", "OR", "NOT", "(", ")",
            ]),
            0..30,
        )
    ) {
        let text = words.join(" ");
        if let Err(e) = parse_predicate(&text) {
            prop_assert!(e.position <= text.len());
        }
    }
}
