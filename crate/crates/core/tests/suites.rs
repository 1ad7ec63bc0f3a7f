use qentangle::verify::{run_suites, suite_names};

#[test]
fn every_verify_suite_passes() {
    let results = run_suites("all", 7).unwrap();
    assert_eq!(results.len(), suite_names().len());
    for r in &results {
        assert!(r.cases > 0, "{} ran no cases", r.name);
        assert!(r.passed, "{}: {} failures, worst excess {}", r.name, r.failures, r.worst_excess);
    }
}

#[test]
fn unknown_suite_is_rejected() {
    assert!(run_suites("no-such-suite", 7).is_err());
}
