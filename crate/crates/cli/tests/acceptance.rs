//! Acceptance gate: one test per shipped accuracy claim, each printing a
//! single verdict line (visible with `cargo test --test acceptance --
//! --nocapture`). The checks themselves live in `slan_cli::verify` and are
//! also reachable at runtime through `slan verify`.

use slan_cli::verify::run_check;

fn check(number: usize, id: &str) {
    let outcome = run_check(id).expect("registered check");
    println!(
        "ACCEPTANCE {number:2} ({}): {} — {}",
        outcome.name,
        if outcome.passed { "PASS" } else { "FAIL" },
        outcome.detail
    );
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn acceptance_01_near_optimality() {
    check(1, "criterion-01");
}

#[test]
fn acceptance_02_bound_chain_ordering() {
    check(2, "criterion-02");
}

#[test]
fn acceptance_03_kernel_route_matches_block_split() {
    check(3, "criterion-03");
}

#[test]
fn acceptance_04_component_ratio_band() {
    check(4, "criterion-04");
}

#[test]
fn acceptance_05_kernel_structure_invariants() {
    check(5, "criterion-05");
}

#[test]
fn acceptance_06_pythagorean_and_projection_identities() {
    check(6, "criterion-06");
}

#[test]
fn acceptance_07_corner_entry_closed_form() {
    check(7, "criterion-07");
}

#[test]
fn acceptance_08_minimax_correctness() {
    check(8, "criterion-08");
}

#[test]
fn acceptance_09_polynomial_comparison_bounds() {
    check(9, "criterion-09");
}

#[test]
fn acceptance_10_conjugate_gradient_special_case() {
    check(10, "criterion-10");
}

#[test]
fn acceptance_11_effective_spectral_interval() {
    check(11, "criterion-11");
}

#[test]
fn acceptance_12_shifted_log_experiment() {
    check(12, "criterion-12");
}

#[test]
fn acceptance_13_early_invariance() {
    check(13, "criterion-13");
}

/// The per-module invariant suites and the mutation smoke test ride along
/// so `cargo test` exercises every registered check.
#[test]
fn module_suites_and_mutation_smoke() {
    for id in slan_cli::verify::CHECK_IDS {
        if id.starts_with("criterion-") {
            continue;
        }
        let outcome = run_check(id).expect("registered check");
        println!("{outcome}");
        assert!(outcome.passed, "{outcome}");
    }
}
