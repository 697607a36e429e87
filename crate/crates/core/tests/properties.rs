//! Randomized invariants: properties that must hold for *every* valid input,
//! exercised over generated matrices, vectors, point sets, and shifts.

use nalgebra::DVector;
use proptest::prelude::*;
use slan_core::approx::remez_discrete;
use slan_core::bounds::bound_main;
use slan_core::kernels::epsilon_closed_form;
use slan_core::krylov::lanczos;
use slan_core::linalg::{SpectralMatrix, SymTridiagonal};
use slan_core::stieltjes::StieltjesFunction;

/// Strictly ascending positive eigenvalues with a guaranteed spread.
fn eigenvalue_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.01f64..1.0, n).prop_map(|gaps| {
        let mut acc = 0.5;
        gaps.iter()
            .map(|g| {
                acc += g.max(0.01);
                acc
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The recurrence's basis stays orthonormal and its projected operator
    /// equals the stored tridiagonal.
    #[test]
    fn lanczos_basis_is_orthonormal_and_projects_the_operator(
        eigs in (4usize..16).prop_flat_map(eigenvalue_vec),
        seed in 0u64..1000,
    ) {
        let n = eigs.len();
        let a = SpectralMatrix::diagonal(eigs).unwrap();
        let b = pseudo_unit(n, seed);
        let l = lanczos(&a, &b, n, 1e-12 * a.eigenvalues()[n - 1]).unwrap();
        let v = l.basis();
        let gram = v.transpose() * v;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[(i, j)] - want).abs() < 1e-10);
            }
        }
        let m = l.order();
        let t = l.tridiagonal(m).unwrap().to_dense();
        for j in 0..m {
            let col = a.apply(&DVector::from(v.column(j).into_owned())).unwrap();
            let projected = v.transpose() * col;
            for i in 0..m {
                prop_assert!((projected[i] - t[(i, j)]).abs() < 1e-9);
            }
        }
    }

    /// The projection onto the subspace can never do worse than the
    /// iteration, and the invariant split recomposes the error.
    #[test]
    fn optimal_error_is_a_lower_bound_and_split_recomposes(
        eigs in (5usize..16).prop_flat_map(eigenvalue_vec),
        seed in 0u64..1000,
    ) {
        let n = eigs.len();
        let a = SpectralMatrix::diagonal(eigs).unwrap();
        let b = pseudo_unit(n, seed);
        let f = StieltjesFunction::inv_sqrt().unwrap();
        let exact = a.apply_function(|z| z.powf(-0.5), &b).unwrap();
        let l = lanczos(&a, &b, n, 1e-12 * a.eigenvalues()[n - 1]).unwrap();
        let big_m = l.effective_invariance().unwrap_or(l.order());
        for m in 1..l.order() {
            let err_lan = (&exact - l.approximation(&f, m).unwrap()).norm();
            let (_, err_opt) = l.optimal_projection(&exact, m).unwrap();
            prop_assert!(err_opt <= err_lan * (1.0 + 1e-9));
            if m < big_m && err_lan >= 1e-5 * exact.norm() {
                let split = l.error_split(&f, m).unwrap();
                let recomposed =
                    (split.head_norm().powi(2) + split.tail_norm().powi(2)).sqrt();
                prop_assert!((recomposed - err_lan).abs() <= 1e-8 * err_lan);
                prop_assert!((split.tail_norm() - err_opt).abs() <= 1e-8 * err_opt);
            }
        }
    }

    /// Discrete minimax error never decreases when the point set grows and
    /// never increases when the degree grows.
    #[test]
    fn minimax_is_monotone_in_point_set_and_degree(
        raw in proptest::collection::vec(1.0f64..100.0, 8..24),
        d in 0usize..4,
    ) {
        let mut points = raw;
        points.sort_by(f64::total_cmp);
        points.dedup_by(|b, a| *b - *a < 1e-3);
        prop_assume!(points.len() > d + 3);
        let f = |z: f64| 1.0 / z;
        let full = remez_discrete(f, &points, d).unwrap();
        let subset = remez_discrete(f, &points[..points.len() - 1], d).unwrap();
        prop_assert!(subset.minimax_error <= full.minimax_error * (1.0 + 1e-9) + 1e-13);
        let higher = remez_discrete(f, &points, d + 1).unwrap();
        prop_assert!(higher.minimax_error <= full.minimax_error * (1.0 + 1e-9) + 1e-13);
    }

    /// The product form of the corner resolvent entry agrees with a direct
    /// solve on arbitrary positive-definite tridiagonals.
    #[test]
    fn corner_entry_product_form_matches_solves(
        diag in proptest::collection::vec(2.0f64..6.0, 1..12),
        off_pattern in proptest::collection::vec(0.05f64..0.9, 11),
        t in 0.0f64..100.0,
    ) {
        let m = diag.len();
        let off: Vec<f64> = off_pattern[..m - 1].to_vec();
        // Diagonal dominance keeps T positive definite.
        let tri = SymTridiagonal::new(diag, off).unwrap();
        let ritz = tri.eigh().unwrap().values;
        prop_assume!(ritz[0] > 1e-6);
        let closed = epsilon_closed_form(tri.offdiag(), &ritz, t).unwrap();
        let mut e1 = DVector::zeros(m);
        e1[0] = 1.0;
        let solved = tri.shifted_solve(t, &e1).unwrap()[m - 1];
        prop_assert!((closed - solved).abs() <= 1e-9 * solved.abs().max(1e-300));
    }

    /// The residual-based factor never exceeds the a-priori factor for any
    /// residual the recurrence can produce (β ≤ λ_hi).
    #[test]
    fn residual_bound_is_below_a_priori_bound(
        lambda_lo in 0.1f64..10.0,
        width in 1.0f64..1000.0,
        beta_frac in 0.0f64..1.0,
        err_opt in 1e-12f64..1.0,
    ) {
        let lambda_hi = lambda_lo + width;
        let beta = beta_frac * lambda_hi;
        let (b_residual, b_apriori) =
            bound_main(beta, lambda_lo, lambda_hi, err_opt).unwrap();
        prop_assert!(b_residual.value <= b_apriori.value * (1.0 + 1e-12));
        prop_assert!(b_residual.value >= err_opt);
    }
}

/// Deterministic pseudo-random unit vector (keeps the property tests free of
/// external RNG dependencies).
fn pseudo_unit(n: usize, seed: u64) -> DVector<f64> {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut v = DVector::zeros(n);
    for i in 0..n {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        // Map to [0.05, 1.05) with alternating sign: never exactly zero.
        let u = (state >> 11) as f64 / (1u64 << 53) as f64;
        v[i] = (u + 0.05) * if state & 1 == 0 { 1.0 } else { -1.0 };
    }
    let norm = v.norm();
    v / norm
}
