//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line to stderr whether or not output is captured.

use std::io::Write;

use hlgt::harness::checks::run_criterion;

fn criterion(id: u8) {
    let r = run_criterion(id).expect("valid criterion id");
    let mut err = std::io::stderr().lock();
    writeln!(err, "acceptance {r}").expect("stderr");
    assert!(r.passed, "criterion {id} failed: {}", r.detail);
}

#[test]
fn criterion_01_exterior_calculus() {
    criterion(1);
}

#[test]
fn criterion_02_antiderivative_correspondence() {
    criterion(2);
}

#[test]
fn criterion_03_unitary_gauge_identity() {
    criterion(3);
}

#[test]
fn criterion_04_coupling_marginals() {
    criterion(4);
}

#[test]
fn criterion_05_eset_stability() {
    criterion(5);
}

#[test]
fn criterion_06_resampling_identity() {
    criterion(6);
}

#[test]
fn criterion_07_line_reduction() {
    criterion(7);
}

#[test]
fn criterion_08_upper_bound() {
    criterion(8);
}

#[test]
fn criterion_09_z2_closed_forms() {
    criterion(9);
}

#[test]
fn criterion_10_spin_duality() {
    criterion(10);
}

#[test]
fn criterion_11_main_comparison() {
    criterion(11);
}

#[test]
fn criterion_12_cluster_event_bounds() {
    criterion(12);
}

#[test]
fn criterion_13_short_line_bound() {
    criterion(13);
}
