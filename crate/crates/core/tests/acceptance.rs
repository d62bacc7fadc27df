//! One test per acceptance criterion; each prints a PASS/FAIL line
//! followed by its evidence.

use std::io::Write;

use sl3t::acceptance::{self, Outcome};

// Written to the stderr handle directly rather than through `eprintln!`,
// which the test harness captures, so the verdicts always reach the log.
fn report(o: Outcome) {
    let mut text = format!("{}\n", o.line());
    for d in &o.details {
        text.push_str(&format!("       {d}\n"));
    }
    std::io::stderr().lock().write_all(text.as_bytes()).unwrap();
    assert!(o.passed, "{}", o.line());
}

#[test]
fn criterion_01_holder_bound() {
    report(acceptance::holder_bound_check());
}

#[test]
fn criterion_02_schatten_decay() {
    report(acceptance::schatten_decay_check());
}

#[test]
fn criterion_03_p4_boundary_probe() {
    report(acceptance::boundary_probe_check());
}

#[test]
fn criterion_04_spectral_quadrature() {
    report(acceptance::spectral_quadrature_check());
}

#[test]
fn criterion_05_markov_contraction() {
    report(acceptance::markov_contraction_check());
}

#[test]
fn criterion_06_dyadic_decomposition() {
    report(acceptance::dyadic_decomposition_check());
}

#[test]
fn criterion_07_interpolation() {
    report(acceptance::interpolation_check());
}

#[test]
fn criterion_08_kak_fidelity() {
    report(acceptance::kak_fidelity_check());
}

#[test]
fn criterion_09_embedding2() {
    report(acceptance::embedding2_check());
}

#[test]
fn criterion_10_zigzag_constants() {
    report(acceptance::zigzag_check());
}

#[test]
fn criterion_11_coefficient_decay() {
    report(acceptance::howe_moore_check());
}

#[test]
fn criterion_12_invariant_gap() {
    report(acceptance::invariant_gap_check());
}
