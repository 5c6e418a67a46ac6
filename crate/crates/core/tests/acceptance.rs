//! Acceptance suite: one pass/fail line per criterion, every tolerance
//! pinned in `bifcc_core::verify`. Run with `--nocapture` to see the lines
//! as they complete.

use std::time::Instant;

use bifcc_core::verify::{self, SuiteReport};

fn report(criterion: &str, suite: &SuiteReport, names: &[&str], budget_s: f64, elapsed: f64) {
    let mut all_ok = true;
    for check in suite.checks.iter().filter(|c| names.contains(&c.name.as_str())) {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!(
            "acceptance {criterion:<28} {status} [{elapsed:7.2}s] {} — {}",
            check.name, check.details
        );
        all_ok &= check.passed;
    }
    assert!(all_ok, "criterion {criterion} failed: {suite:?}");
    assert!(
        elapsed <= budget_s,
        "criterion {criterion} exceeded its runtime budget: {elapsed:.1}s > {budget_s}s"
    );
}

#[test]
fn criterion_01_algebraic_identities() {
    let t = Instant::now();
    let suite = verify::suite_identities();
    let dt = t.elapsed().as_secs_f64();
    report(
        "1-identities",
        &suite,
        &[
            "critical-values-exact",
            "cocritical-4ulp",
            "involution-squared-8ulp",
            "green-swap-1e-9",
        ],
        1.0,
        dt,
    );
}

#[test]
fn criterion_02_and_05_degrees_and_equidistribution() {
    let t = Instant::now();
    let suite = verify::suite_degrees();
    let dt = t.elapsed().as_secs_f64();
    report(
        "2-degrees",
        &suite,
        &["total-degrees", "v-root-counts"],
        30.0,
        dt,
    );
    report("5-equidistribution", &suite, &["equidistribution-rate"], 30.0, dt);
}

#[test]
fn criterion_03_and_04_near_infinity() {
    let t = Instant::now();
    let suite = verify::suite_kiwi();
    let dt = t.elapsed().as_secs_f64();
    report("3-bottcher-asymptotic", &suite, &["bottcher-asymptotic"], 10.0, dt);
    report("4-wedge-bounds", &suite, &["wedge-green-bounds"], 30.0, dt);
}

#[test]
fn criterion_06_and_07_wringing() {
    let t = Instant::now();
    let suite = verify::suite_wring();
    let dt = t.elapsed().as_secs_f64();
    report(
        "6-wringing",
        &suite,
        &["group-axioms", "leaf-scaling", "rotation-arc"],
        20.0,
        dt,
    );
    report("7-transversal-graphs", &suite, &["transversal-graphs"], 60.0, dt);
}

#[test]
fn criterion_08_and_09_cylinders() {
    let t = Instant::now();
    let suite = verify::suite_cylinders();
    let dt = t.elapsed().as_secs_f64();
    report(
        "8-cylinder-statistics",
        &suite,
        &["depth-2-fractions", "depth-3-fractions", "excluded-mass"],
        600.0,
        dt,
    );
    report("9-point-component-proxy", &suite, &["periodic-proxy"], 600.0, dt);
}

#[test]
fn criterion_10_misiurewicz_and_mass() {
    let t = Instant::now();
    let mis = verify::suite_misiurewicz();
    let mass = verify::suite_mass();
    let dt = t.elapsed().as_secs_f64();
    report(
        "10-misiurewicz",
        &mis,
        &["strict-point", "impostor-filtered"],
        60.0,
        dt,
    );
    report(
        "10-intersection-mass",
        &mass,
        &["pair-1010-total", "pair-1021-window"],
        60.0,
        dt,
    );
}

#[test]
fn criterion_11_monge_ampere() {
    let t = Instant::now();
    let suite = verify::suite_monge_ampere();
    let dt = t.elapsed().as_secs_f64();
    report(
        "11-monge-ampere",
        &suite,
        &[
            "escape-side-vanishes",
            "interior-vanishes",
            "misiurewicz-window-stable",
        ],
        900.0,
        dt,
    );
}
