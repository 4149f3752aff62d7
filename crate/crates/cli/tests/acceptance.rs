//! Acceptance gate: one test per built-in verification criterion, each
//! printing its PASS/FAIL line with the measured numbers (run with
//! `--nocapture` to see the lines for passing tests too).
//!
//! Criterion 8 currently fails by design of the measurement itself: on a
//! periodic box the dispersed radiation of the leading corner cannot escape
//! (the refocusing mechanism needs it retained), and its wrapped interference
//! floor sits orders of magnitude above the two smallest scheduled corner
//! sizes. The failure detail carries the measured numbers.

use dispersia_cli::suites::criterion;

fn run(id: u32) {
    let r = criterion(id);
    println!("{}", r.line());
    assert!(r.passed, "{}", r.line());
}

#[test]
fn acceptance_01_operator_identities() {
    run(1);
}

#[test]
fn acceptance_02_airy_group_laws() {
    run(2);
}

#[test]
fn acceptance_03_closed_form_regressions() {
    run(3);
}

#[test]
fn acceptance_04_conservation() {
    run(4);
}

#[test]
fn acceptance_05_vanishing_viscosity_ladder() {
    run(5);
}

#[test]
fn acceptance_06_weight_machinery() {
    run(6);
}

#[test]
fn acceptance_07_propagation_of_regularity() {
    run(7);
}

#[test]
fn acceptance_08_dispersive_blowup() {
    run(8);
}

#[test]
fn acceptance_09_weighted_propagator_identity() {
    run(9);
}

#[test]
fn acceptance_10_singularity_kinematics() {
    run(10);
}

#[test]
fn acceptance_11_peakon_ode_vs_pde() {
    run(11);
}

#[test]
fn acceptance_12_determinism() {
    run(12);
}
