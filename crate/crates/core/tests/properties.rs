mod common;

fn assert_suite(result: Result<u32, String>) {
    match result {
        Ok(cases) => assert!(cases >= 200, "only {cases} cases"),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn monotone_in_speed_and_response_time() {
    assert_suite(common::monotonicity());
}

#[test]
fn range_width_identities() {
    assert_suite(common::range_width());
}

#[test]
fn classification_is_monotone() {
    assert_suite(common::classify_monotone());
}

#[test]
fn sweep_csv_round_trip() {
    assert_suite(common::csv_round_trip());
}

#[test]
fn constant_speed_balance() {
    assert_suite(common::constant_speed_balance());
}

#[test]
fn braking_distance_is_quadratic() {
    assert_suite(common::quadratic_braking());
}

#[test]
fn dispatcher_matches_direct_formulas() {
    assert_suite(common::dispatcher_consistency());
}
