//! Acceptance suite: every criterion runs at its stated size and tolerance
//! and prints one pass/fail line. Exact checks throughout; the timed
//! criteria assert their wall-clock budgets.

use std::time::{Duration, Instant};
use torelli_core::suites::{run_suite, SuiteResult};

fn run(criterion: usize, suite: &str, budget: Option<Duration>) -> SuiteResult {
    let start = Instant::now();
    let result = run_suite(suite, 0).expect("suite runs");
    let elapsed = start.elapsed();
    let mut pass = result.pass;
    let mut note = String::new();
    if let Some(budget) = budget {
        if elapsed > budget {
            pass = false;
            note = format!(" (budget {budget:?} exceeded)");
        }
    }
    println!(
        "acceptance {criterion} [{suite}]: {}{} in {elapsed:?}",
        if pass { "PASS" } else { "FAIL" },
        note
    );
    for c in &result.checks {
        if !c.pass {
            println!("  failed: {} {}", c.name, c.detail);
        }
    }
    assert!(pass, "criterion {criterion} ({suite}) failed");
    result
}

#[test]
fn criterion_01_boolean_algebra_dimensions() {
    run(1, "boolalg-dims", Some(Duration::from_secs(1)));
}

#[test]
fn criterion_02_degree_four_obstruction() {
    run(2, "sigmahat-kernel", Some(Duration::from_secs(1)));
}

#[test]
fn criterion_03_form_families() {
    run(3, "form-family", None);
}

#[test]
fn criterion_04_theta_pairing() {
    run(4, "theta-pairing", None);
}

#[test]
fn criterion_05_generator_tables() {
    run(5, "generator-tables", None);
}

#[test]
fn criterion_06_psi_tables() {
    run(6, "psi-tables", None);
}

#[test]
fn criterion_07_taxonomy_and_lattice() {
    run(7, "taxonomy-lattice", Some(Duration::from_secs(10)));
}

#[test]
fn criterion_08_d1_identities() {
    run(8, "d1-identities", None);
}

#[test]
fn criterion_09_descent() {
    run(9, "descent", Some(Duration::from_secs(60)));
}

#[test]
fn criterion_10_d1_squared_vanishes() {
    run(10, "d1-squared", None);
}
