//! Acceptance suite: every quantitative contract of the library, one test
//! per criterion, each printing a single pass/fail line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use lipfree::suites::{self, CheckRow, SuiteConfig};

fn run(id: &str, f: fn(&SuiteConfig) -> lipfree::Result<Vec<CheckRow>>) {
    let cfg = SuiteConfig::default();
    let started = std::time::Instant::now();
    let rows = f(&cfg).unwrap_or_else(|e| panic!("{id}: failed to run: {e}"));
    let failed: Vec<&CheckRow> = rows.iter().filter(|r| !r.pass).collect();
    let worst = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let status = if failed.is_empty() { "PASS" } else { "FAIL" };
    println!(
        "[{status}] {id}: {} checks, min margin {worst:.3e}, {:.2}s",
        rows.len(),
        started.elapsed().as_secs_f64()
    );
    if let Some(first) = failed.first() {
        panic!(
            "{id}: {} of {} checks failed; first: {} [{}] measured {:.12e} vs bound {:.12e}",
            failed.len(),
            rows.len(),
            first.id,
            first.instance,
            first.measured,
            first.bound
        );
    }
}

#[test]
fn criterion_01_norm_oracle_equivalence() {
    run("c01-oracle-agreement", suites::c01_oracle_agreement);
}

#[test]
fn criterion_02_telescoping_sums_have_norm_m_minus_k() {
    run("c02-telescoping", suites::c02_telescoping);
}

#[test]
fn criterion_03_even_odd_subbases_are_isometric_sequence_bases() {
    run("c03-even-odd-subbasis", suites::c03_even_odd_subbasis);
}

#[test]
fn criterion_04_window_projections_have_norm_one() {
    run("c04-window-projections", suites::c04_window_projections);
}

#[test]
fn criterion_05_interval_projection_bound_and_identities() {
    run("c05-interval-projections", suites::c05_interval_projections);
}

#[test]
fn criterion_06_haar_system_constant() {
    run("c06-haar-system", suites::c06_haar_system);
}

#[test]
fn criterion_07_retraction_complements() {
    run(
        "c07-retraction-complements",
        suites::c07_retraction_complements,
    );
}

#[test]
fn criterion_08_bump_complementation() {
    run("c08-bump-complementation", suites::c08_bump_complementation);
}

#[test]
fn criterion_09_sum_isometry() {
    run("c09-sum-isometry", suites::c09_sum_isometry);
}

#[test]
fn criterion_10_chain_sandwich() {
    run("c10-chain-sandwich", suites::c10_chain_sandwich);
}

#[test]
fn criterion_11_ultrametric_distortion() {
    run(
        "c11-ultrametric-distortion",
        suites::c11_ultrametric_distortion,
    );
}

#[test]
fn criterion_12_disjoint_sum_lipschitz() {
    run("c12-disjoint-sums", suites::c12_disjoint_sums);
}

#[test]
fn criterion_13_quotient_preservation() {
    run(
        "c13-quotient-preservation",
        suites::c13_quotient_preservation,
    );
}

#[test]
fn criterion_14_dilation_bridge() {
    run("c14-dilation-bridge", suites::c14_dilation_bridge);
}
