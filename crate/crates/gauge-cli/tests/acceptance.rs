//! Acceptance suite: the eleven top-level criteria at their stated
//! sizes and tolerances, one pass/fail line each (run with
//! `cargo test --test acceptance -- --nocapture` to see the lines).

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use gauge_cli::verify::{self, Check, Sizes};
use tempfile::TempDir;

const SEED: u64 = 20_260_826;

fn report(criterion: u32, label: &str, start: Instant, budget: Duration, checks: &[Check]) {
    let elapsed = start.elapsed();
    let pass = checks.iter().all(|c| c.pass) && elapsed <= budget;
    println!(
        "criterion {criterion:>2} ({label}): {} [{:.1?}]",
        if pass { "PASS" } else { "FAIL" },
        elapsed
    );
    for c in checks {
        assert!(
            c.pass,
            "criterion {criterion} ({label}): {} failed: {}",
            c.name, c.detail
        );
    }
    assert!(
        elapsed <= budget,
        "criterion {criterion} ({label}): took {elapsed:.1?}, budget {budget:.1?}"
    );
}

#[test]
fn criterion_01_u1_dual_series() {
    let t = Instant::now();
    let c = verify::check_u1_dual_series();
    report(1, "U1 dual-series agreement", t, Duration::from_secs(1), &[c]);
}

#[test]
fn criterion_02_dual_form_ratio_constancy() {
    let t = Instant::now();
    let checks = [verify::check_su2_dual_ratio(), verify::check_su3_dual_ratio()];
    report(2, "dual-form ratio constancy", t, Duration::from_secs(10), &checks);
}

#[test]
fn criterion_03_normalization() {
    let t = Instant::now();
    let c = verify::check_normalization(0.4, 1_000_000, SEED ^ 3);
    report(3, "kernel normalization", t, Duration::from_secs(60), &[c]);
}

#[test]
fn criterion_04_convolution_semigroup() {
    use gauge_core::group::GroupKind;
    let t = Instant::now();
    let checks = [
        verify::check_convolution(GroupKind::U1, 200_000, SEED ^ 41),
        verify::check_convolution(GroupKind::Su2, 200_000, SEED ^ 42),
        verify::check_convolution(GroupKind::Su3, 200_000, SEED ^ 43),
    ];
    report(4, "convolution semigroup", t, Duration::from_secs(60), &checks);
}

#[test]
fn criterion_05_laplacian_spectral() {
    let t = Instant::now();
    let c = verify::check_laplacian_spectral(SEED ^ 5);
    report(5, "Laplacian spectral check", t, Duration::from_secs(10), &[c]);
}

#[test]
fn criterion_06_kinematical_consistency() {
    use gauge_core::group::GroupKind;
    let t = Instant::now();
    let n = Sizes::acceptance().kinematical_n;
    let checks = [
        verify::check_kinematical(GroupKind::U1, n, 0.01, SEED ^ 61),
        verify::check_kinematical(GroupKind::Su2, n, 0.01, SEED ^ 62),
        verify::check_kinematical_control(n, SEED ^ 63),
    ];
    report(6, "kinematical projective consistency", t, Duration::from_secs(120), &checks);
}

#[test]
fn criterion_07_refinement_consistency() {
    use gauge_core::group::GroupKind;
    let t = Instant::now();
    let n = Sizes::acceptance().refinement_n;
    let checks = [
        verify::check_refinement(GroupKind::U1, n, 0.01, 4.0, SEED ^ 71),
        verify::check_refinement(GroupKind::Su2, n, 0.01, 4.0, SEED ^ 72),
        verify::check_refinement_control(n, SEED ^ 73),
    ];
    report(7, "refinement consistency", t, Duration::from_secs(600), &checks);
}

#[test]
fn criterion_08_small_beta_limit() {
    let t = Instant::now();
    let s = Sizes::acceptance();
    let checks = [
        verify::check_gaussian_pointwise(),
        verify::check_wilson_small_beta(s.wilson_n, SEED ^ 81),
        verify::check_wilson_large_beta_control(s.wilson_control_n, SEED ^ 82),
    ];
    report(8, "small-beta physical limit", t, Duration::from_secs(300), &checks);
}

#[test]
fn criterion_09_strata_tables() {
    let t = Instant::now();
    let checks = [
        verify::check_strata_tables(SEED ^ 91),
        verify::check_strata_round_trip(SEED ^ 92),
    ];
    report(9, "strata classification tables", t, Duration::from_secs(30), &checks);
}

#[test]
fn criterion_10_hida_norms() {
    let t = Instant::now();
    let c = verify::check_hida(SEED ^ 10);
    report(10, "Hida norms and pairing", t, Duration::from_secs(10), &[c]);
}

#[test]
fn criterion_11_determinism() {
    let t = Instant::now();
    let tmp = TempDir::new().unwrap();
    let run = |dir: &str| {
        let d = tmp.path().join(dir);
        let status = Command::new(env!("CARGO_BIN_EXE_gauge"))
            .args(["--quick", "--seed", "123", "--out", d.to_str().unwrap(), "verify"])
            .status()
            .unwrap();
        assert!(status.success(), "quick verify must pass");
        fs::read(d.join("verify_report.json")).unwrap()
    };
    let a = run("a");
    let b = run("b");
    let pass = a == b;
    println!(
        "criterion 11 (verify determinism): {} [{:.1?}]",
        if pass { "PASS" } else { "FAIL" },
        t.elapsed()
    );
    assert!(pass, "same seed must produce byte-identical JSON reports");
}
