use flrank::blues::{blues_ensemble, extract_statements};
use flrank::corpus::{load_corpus, load_defect_bundle, validate_bundle, Mode};
use flrank::evalkit::{evaluate_corpus, CorpusReport, Cutoff, EvalOptions, Technique};
use flrank::rafl::sbir_localize;
use flrank::sbfl::rank_sbfl;
use serde::Deserialize;
use std::path::{Path, PathBuf};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

#[test]
fn every_fixture_bundle_validates() {
    let bundles = load_corpus(&fixtures().join("corpus")).unwrap();
    assert_eq!(bundles.len(), 11);
    let ids: Vec<&str> = bundles.iter().map(|b| b.defect_id.as_str()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    for b in &bundles {
        let report = validate_bundle(b, Mode::Sbir);
        assert!(report.runnable, "{}: {:?}", b.defect_id, report.reasons);
        assert!(b.failing_tests() > 0, "{} has no failing test", b.defect_id);
    }
}

#[test]
fn bank_ranks_per_technique() {
    let bundle = load_defect_bundle(&fixtures().join("corpus/bank-1")).unwrap();
    let bug = "Account.java:29:0";
    assert_eq!(rank_sbfl(&bundle).unwrap().rank_of(bug), Some(3));
    assert_eq!(blues_ensemble(&bundle).unwrap().rank_of(bug), Some(2));
    assert_eq!(sbir_localize(&bundle).unwrap().rank_of(bug), Some(2));
}

#[test]
fn sbir_output_is_a_subset_of_inputs() {
    for b in load_corpus(&fixtures().join("corpus")).unwrap() {
        let sbfl = rank_sbfl(&b).unwrap();
        let blues = blues_ensemble(&b).unwrap();
        let fused = sbir_localize(&b).unwrap();
        for (i, e) in fused.entries().iter().enumerate() {
            assert_eq!(e.rank, i + 1);
            assert!((e.score - 1.0 / e.rank as f64).abs() < 1e-12);
            assert!(
                sbfl.rank_of(&e.item_id).is_some() || blues.rank_of(&e.item_id).is_some(),
                "{}: {} came from nowhere",
                b.defect_id,
                e.item_id
            );
        }
    }
}

#[test]
fn corpus_report_matches_golden() {
    let bundles = load_corpus(&fixtures().join("corpus")).unwrap();
    let opts = EvalOptions {
        union_mode: true,
        ..EvalOptions::default()
    };
    let report = evaluate_corpus(&bundles, &Technique::standard(50), &opts).unwrap();
    let golden: CorpusReport =
        serde_json::from_str(&std::fs::read_to_string(fixtures().join("golden_report.json")).unwrap()).unwrap();
    assert_eq!(report.techniques.len(), golden.techniques.len());
    for (got, want) in report.techniques.iter().zip(&golden.techniques) {
        assert_eq!(got.technique, want.technique);
        assert_eq!(got.defects, want.defects);
        for k in Cutoff::STANDARD {
            assert_eq!(got.e_inspect(k), want.e_inspect(k), "{} at {k}", got.technique);
        }
        for (a, b) in got.cutoffs.iter().zip(&want.cutoffs) {
            assert!((a.mean_exam - b.mean_exam).abs() < 1e-9, "{}", got.technique);
        }
    }
    let table = std::fs::read_to_string(fixtures().join("golden_table.txt")).unwrap();
    assert_eq!(report.to_table(), table);
}

#[derive(Deserialize)]
struct Expected {
    statement_id: String,
    kind: String,
    start_line: u32,
    end_line: u32,
}

#[test]
fn extraction_matches_reference() {
    let dir = fixtures().join("extract");
    let src = std::fs::read_to_string(dir.join("Calculator.java")).unwrap();
    let expected: Vec<Expected> =
        serde_json::from_str(&std::fs::read_to_string(dir.join("Calculator.expected.json")).unwrap()).unwrap();
    let got = extract_statements("Calculator.java", &src);
    assert!(got.diagnostics.is_empty());
    assert_eq!(got.statements.len(), expected.len());
    for (g, e) in got.statements.iter().zip(&expected) {
        assert_eq!(g.statement_id, e.statement_id);
        assert_eq!(g.kind, e.kind, "{}", e.statement_id);
        assert_eq!(
            (g.start_line, g.end_line),
            (e.start_line, e.end_line),
            "{}",
            e.statement_id
        );
    }
}
