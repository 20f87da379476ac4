use dtsch::scenarios::{run, SCENARIOS};

#[test]
fn every_builtin_scenario_passes() {
    for (name, _) in SCENARIOS {
        let v = run(name).unwrap();
        assert!(v.passed(), "{v}");
        assert!(!v.checks.is_empty());
    }
}

#[test]
fn unknown_scenario_is_an_error() {
    assert!(run("five-node").is_err());
}
