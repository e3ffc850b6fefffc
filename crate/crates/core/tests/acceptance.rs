//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line with the measured value and the pinned tolerance.
//!
//! Run with `cargo test -p expldp-core --test acceptance -- --nocapture`.

use expldp_core::verify::{run_criterion, seed_from_env, CRITERIA};

fn gate(id: u8, tolerance: &str) {
    let criterion = CRITERIA
        .iter()
        .copied()
        .find(|c| c.id == id)
        .expect("criterion id");
    let outcome = run_criterion(criterion, seed_from_env());
    println!("{outcome}");
    assert!(
        outcome.tolerance.starts_with(tolerance),
        "criterion {id} tolerance drifted: {}",
        outcome.tolerance
    );
    assert!(outcome.passed, "criterion {id} ({}) failed", criterion.key);
}

#[test]
fn criterion_01_closed_form() {
    gate(1, "1e-9; 1e-8; runtime < 1 s");
}

#[test]
fn criterion_02_posterior_ldp() {
    gate(2, "relative 2%; runtime < 30 s");
}

#[test]
fn criterion_03_pythagoras() {
    gate(3, "< 1e-10; curved > 1e-3");
}

#[test]
fn criterion_04_legendre() {
    gate(4, "1e-8; one grid step");
}

#[test]
fn criterion_05_mle_oracle() {
    gate(5, "relative 5%; runtime < 60 s");
}

#[test]
fn criterion_06_sanov_failure() {
    gate(6, "gap > 1e-4; < 1e-9 at truth; 1e-6");
}

#[test]
fn criterion_07_boundary() {
    gate(7, "increasing, > 10 at 0.01; (C) holds then fails");
}

#[test]
fn criterion_08_duality() {
    gate(8, "1e-10; 1e-12");
}

#[test]
fn criterion_09_landau() {
    gate(9, "1e-3; 1e-3");
}

#[test]
fn criterion_10_properties() {
    gate(10, "zero failures");
}
