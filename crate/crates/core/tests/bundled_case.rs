use millopt::case_study::{builtin_case, load_plan, PlanDocument, BUNDLED_CASE};
use sha2::{Digest, Sha256};

// Any edit to the bundled case must be deliberate: update this digest with it.
const BUNDLED_SHA256: &str = "45cfba4ecef469d459ca64c1b234c23cd4e5ff9c06fddc12208b66de6f3d4171";

#[test]
fn bundled_case_is_unchanged() {
    let digest = Sha256::digest(BUNDLED_CASE.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(hex, BUNDLED_SHA256);
}

#[test]
fn bundled_case_round_trips_through_toml() {
    let (plan, _) = builtin_case();
    let text = PlanDocument::from_plan(&plan).to_toml().unwrap();
    assert_eq!(load_plan(&text).unwrap().plan, plan);
}

#[test]
fn bundled_case_declares_its_assumptions() {
    let loaded = load_plan(BUNDLED_CASE).unwrap();
    let assumed = loaded
        .warnings
        .iter()
        .filter(|w| w.contains("assumed value"))
        .count();
    assert_eq!(assumed, 5);
    assert!(loaded
        .warnings
        .iter()
        .any(|w| w == "operation 4: no surface finish requirement; finish constraint skipped"));
}
