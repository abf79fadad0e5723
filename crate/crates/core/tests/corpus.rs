use nqverify::corpus::{example, run_corpus, run_example};
use nqverify::linalg::{identity, max_abs_diff};
use nqverify::verifier::generated_matrix;
use nqverify::VerifyOptions;

#[test]
fn every_example_has_its_expected_outcome() {
    let outcomes = run_corpus(&VerifyOptions::default());
    for o in &outcomes {
        assert!(o.ok(), "{}: expected {:?}, got {:?} ({})", o.name, o.expected, o.actual, o.detail);
    }
}

#[test]
fn walk_condition_is_identity() {
    let r = run_example(example("qwalk").unwrap(), &VerifyOptions::default()).unwrap();
    let vc = &r.proof("pf").unwrap().outline.verification_condition;
    assert_eq!(vc, "VAR2[q1 q2]");
    let m = generated_matrix(&r, "VAR2").unwrap();
    assert!(max_abs_diff(&m, &identity(4)) < 1e-6);
    println!("{}", r.text);
}
