//! Acceptance gate: one test per headline criterion, each printing its
//! pass/fail line. Tolerances and budgets live inside the checks; a failing
//! criterion fails its test with the computed values in the message.

use maslov::verify::{self, VerificationReport};

const SEED: u64 = 7;
const SAMPLES: usize = 720;

fn gate(report: VerificationReport) {
    println!(
        "[{}] {} — {} ({:.0} ms)",
        report.status, report.id, report.detail, report.runtime_ms
    );
    assert!(report.passed(), "{}: {}", report.id, report.detail);
}

#[test]
fn criterion_01_index_generator() {
    gate(verify::check_index_generator(SAMPLES));
}

#[test]
fn criterion_02_sp_embedding() {
    gate(verify::check_sp_embedding(SAMPLES));
}

#[test]
fn criterion_03_holonomy_index_law() {
    gate(verify::check_holonomy_index_law(SEED));
}

#[test]
fn criterion_04_branch_holonomy() {
    gate(verify::check_branch_holonomy(SAMPLES));
}

#[test]
fn criterion_05_sphere_cech_pipeline() {
    gate(verify::check_cp1_cech_pipeline());
}

#[test]
fn criterion_06_sign_reduction_pointwise() {
    gate(verify::check_sign_reduction());
}

#[test]
fn criterion_07_dual_route_equality() {
    gate(verify::check_dual_route_equality(SEED));
}

#[test]
fn criterion_08_gerbe_class_value() {
    gate(verify::check_gerbe_class_value());
}

#[test]
fn criterion_09_divisor_property() {
    gate(verify::check_divisor_property(SEED));
}

#[test]
fn criterion_10_class_invariance() {
    gate(verify::check_class_invariance(SEED));
}

#[test]
fn suite_runs_deterministically_and_detects_faults() {
    let a = verify::run_all(SEED, 120);
    let b = verify::run_all(SEED, 120);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!((x.id, x.status, &x.detail), (y.id, y.status, &y.detail));
    }
    let fault = a.iter().find(|r| r.id == "fault-injection").unwrap();
    assert!(fault.passed(), "{}", fault.detail);
}
