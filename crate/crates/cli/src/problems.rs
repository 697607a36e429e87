//! Builders turning configuration specs into concrete operators, starting
//! vectors, and function objects.

use crate::config::{FunctionSpec, MatrixSpec, VectorSpec};
use crate::error::{CliError, Result};
use crate::rng::SplitMix64;
use nalgebra::DVector;
use slan_core::linalg::SpectralMatrix;
use slan_core::stieltjes::StieltjesFunction;
use std::path::Path;

/// Decay parameter of the clustered test spectrum: eigenvalues crowd toward
/// the top of [1, 100] as ρ → 0.
const RHO: f64 = 1e-3;

fn read_numbers(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| {
                CliError::Config(format!(
                    "{} line {}: \"{tok}\" is not a number",
                    path.display(),
                    lineno + 1
                ))
            })?;
            out.push(v);
        }
    }
    if out.is_empty() {
        return Err(CliError::Config(format!(
            "{} contains no numbers",
            path.display()
        )));
    }
    Ok(out)
}

fn equispaced(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    // Convex-combination form pins both endpoints exactly.
    (0..n)
        .map(|i| {
            let w = i as f64 / (n - 1) as f64;
            lo * (1.0 - w) + hi * w
        })
        .collect()
}

fn geometric(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let ratio = hi / lo;
    let mut v: Vec<f64> = (0..n)
        .map(|i| lo * ratio.powf(i as f64 / (n - 1) as f64))
        .collect();
    // Anchor the endpoints exactly despite powf rounding.
    v[0] = lo;
    v[n - 1] = hi;
    v
}

/// Builds the operator and a short label for file names and headers.
pub fn build_matrix(spec: &MatrixSpec) -> Result<(SpectralMatrix, String)> {
    let (eigs, label): (Vec<f64>, String) = match spec {
        MatrixSpec::A1 => ((1..=100).map(|i| i as f64).collect(), "A1".into()),
        MatrixSpec::A2 => (
            (1..=100)
                .map(|i| 1.0 + 99.0 * (1.0 - RHO.powf((i - 1) as f64 / 99.0)) / (1.0 - RHO))
                .collect(),
            "A2".into(),
        ),
        MatrixSpec::A3 => (equispaced(100, 1.1, 110.0), "A3".into()),
        MatrixSpec::A4 => (geometric(100, 1.1, 110.0), "A4".into()),
        MatrixSpec::Diag { file } => (read_numbers(file)?, "diag".into()),
        MatrixSpec::Custom { eigenvalues } => (eigenvalues.clone(), "custom".into()),
        MatrixSpec::Equispaced { n, lo, hi } => {
            check_grid(*n, *lo, *hi)?;
            (equispaced(*n, *lo, *hi), format!("equispaced{n}"))
        }
        MatrixSpec::Geometric { n, lo, hi } => {
            check_grid(*n, *lo, *hi)?;
            (geometric(*n, *lo, *hi), format!("geometric{n}"))
        }
    };
    let a = SpectralMatrix::diagonal(eigs)
        .map_err(|e| CliError::Config(format!("matrix spec: {e}")))?;
    Ok((a, label))
}

fn check_grid(n: usize, lo: f64, hi: f64) -> Result<()> {
    if n < 2 || !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
        return Err(CliError::Config(format!(
            "spectrum grid needs n >= 2 and 0 < lo < hi, got n = {n}, [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// Builds the unit starting vector for an n-dimensional operator.
pub fn build_vector(spec: &VectorSpec, n: usize) -> Result<DVector<f64>> {
    let mut v = DVector::zeros(n);
    match spec {
        VectorSpec::Gaussian { seed } => {
            let mut rng = SplitMix64::new(*seed);
            rng.fill_normal(v.as_mut_slice());
        }
        VectorSpec::GaussianSupported { seed, i_lo, i_hi } => {
            if !(1 <= *i_lo && i_lo <= i_hi && *i_hi <= n) {
                return Err(CliError::Config(format!(
                    "support [{i_lo}, {i_hi}] is not a valid 1-based index range for n = {n}"
                )));
            }
            let mut rng = SplitMix64::new(*seed);
            rng.fill_normal(&mut v.as_mut_slice()[i_lo - 1..*i_hi]);
        }
        VectorSpec::File { file } => {
            let vals = read_numbers(file)?;
            if vals.len() != n {
                return Err(CliError::Config(format!(
                    "{}: {} entries for an n = {n} operator",
                    file.display(),
                    vals.len()
                )));
            }
            v = DVector::from_vec(vals);
        }
        VectorSpec::Eigenvectors { indices } => {
            if indices.is_empty() {
                return Err(CliError::Config("eigenvector index list is empty".into()));
            }
            for &i in indices {
                if !(1..=n).contains(&i) {
                    return Err(CliError::Config(format!(
                        "eigenvector index {i} outside 1..={n}"
                    )));
                }
                if v[i - 1] != 0.0 {
                    return Err(CliError::Config(format!("eigenvector index {i} repeated")));
                }
                v[i - 1] = 1.0;
            }
        }
    }
    let norm = v.norm();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(CliError::Config(
            "starting vector has zero or non-finite norm".into(),
        ));
    }
    v /= norm;
    Ok(v)
}

/// Builds the function object. The boolean is true when the pipeline must
/// run on the shifted operator B = A − I (log via log(1+·)).
pub fn build_function(spec: &FunctionSpec) -> Result<(StieltjesFunction, bool, String)> {
    let wrap = |r: slan_core::Result<StieltjesFunction>| {
        r.map_err(|e| CliError::Config(format!("function spec: {e}")))
    };
    Ok(match spec {
        FunctionSpec::InvPower { alpha } if *alpha == 1.0 => {
            (wrap(StieltjesFunction::reciprocal())?, false, "inv".into())
        }
        FunctionSpec::InvPower { alpha } => (
            wrap(StieltjesFunction::inv_power(*alpha))?,
            false,
            format!("inv_power{alpha}"),
        ),
        FunctionSpec::InvSqrt => (wrap(StieltjesFunction::inv_sqrt())?, false, "inv_sqrt".into()),
        FunctionSpec::Sqrt => (wrap(StieltjesFunction::sqrt())?, false, "sqrt".into()),
        FunctionSpec::Log1pOverZ => (
            wrap(StieltjesFunction::log1p_over_z())?,
            false,
            "log1p_over_z".into(),
        ),
        FunctionSpec::LogShifted => (wrap(StieltjesFunction::log1p())?, true, "log".into()),
        FunctionSpec::Reciprocal => (wrap(StieltjesFunction::reciprocal())?, false, "inv".into()),
        FunctionSpec::PartialFraction { file } => {
            let nums = read_numbers(file)?;
            if nums.len() % 2 != 0 {
                return Err(CliError::Config(format!(
                    "{}: expected weight/offset pairs, got {} numbers",
                    file.display(),
                    nums.len()
                )));
            }
            let atoms: Vec<(f64, f64)> = nums.chunks(2).map(|c| (c[0], c[1])).collect();
            (
                wrap(StieltjesFunction::partial_fraction(atoms))?,
                false,
                "partial_fraction".into(),
            )
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn named_matrices_have_condition_number_100() {
        for spec in [MatrixSpec::A1, MatrixSpec::A2] {
            let (a, _) = build_matrix(&spec).unwrap();
            assert_eq!(a.n(), 100);
            assert_eq!(a.kappa(), 100.0, "{spec:?}");
        }
        for spec in [MatrixSpec::A3, MatrixSpec::A4] {
            let (a, _) = build_matrix(&spec).unwrap();
            assert_eq!(a.n(), 100);
            assert_eq!(a.lambda_min(), 1.1);
            assert_eq!(a.lambda_max(), 110.0);
            assert_relative_eq!(a.kappa(), 100.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn clustered_spectrum_endpoints_are_exact() {
        let (a, _) = build_matrix(&MatrixSpec::A2).unwrap();
        let e = a.eigenvalues();
        assert_eq!(e[0], 1.0);
        assert_eq!(e[99], 100.0);
        // Eigenvalues crowd toward the top: the median sits high and the
        // first gap dwarfs the last.
        assert!(e[49] > 90.0);
        assert!(e[1] - e[0] > 100.0 * (e[99] - e[98]));
    }

    #[test]
    fn log_shift_keeps_the_shifted_matrix_definite() {
        let (a, _) = build_matrix(&MatrixSpec::A3).unwrap();
        let b = a.shifted(-1.0).unwrap();
        assert_relative_eq!(b.lambda_min(), 0.1, max_relative = 1e-12);
        assert_relative_eq!(b.kappa(), 1090.0, max_relative = 1e-12);
    }

    #[test]
    fn gaussian_vectors_are_unit_and_reproducible() {
        let a = build_vector(&VectorSpec::Gaussian { seed: 9 }, 100).unwrap();
        let b = build_vector(&VectorSpec::Gaussian { seed: 9 }, 100).unwrap();
        let c = build_vector(&VectorSpec::Gaussian { seed: 10 }, 100).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
        assert_ne!(a.as_slice(), c.as_slice());
        assert!((a.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn supported_vector_is_zero_outside_its_range() {
        let v = build_vector(
            &VectorSpec::GaussianSupported { seed: 3, i_lo: 26, i_hi: 75 },
            100,
        )
        .unwrap();
        for i in 0..25 {
            assert_eq!(v[i], 0.0);
        }
        for i in 75..100 {
            assert_eq!(v[i], 0.0);
        }
        assert!(v.rows(25, 50).iter().all(|x| *x != 0.0));
        assert!((v.norm() - 1.0).abs() < 1e-15);

        assert!(build_vector(
            &VectorSpec::GaussianSupported { seed: 3, i_lo: 0, i_hi: 4 },
            100
        )
        .is_err());
        assert!(build_vector(
            &VectorSpec::GaussianSupported { seed: 3, i_lo: 7, i_hi: 4 },
            100
        )
        .is_err());
    }

    #[test]
    fn eigenvector_sums_normalize() {
        let v = build_vector(
            &VectorSpec::Eigenvectors { indices: vec![1, 20, 40, 60, 80] },
            100,
        )
        .unwrap();
        let expected = 1.0 / 5.0_f64.sqrt();
        assert_relative_eq!(v[0], expected, max_relative = 1e-15);
        assert_relative_eq!(v[79], expected, max_relative = 1e-15);
        assert_eq!(v.iter().filter(|x| **x != 0.0).count(), 5);

        assert!(build_vector(&VectorSpec::Eigenvectors { indices: vec![] }, 10).is_err());
        assert!(build_vector(&VectorSpec::Eigenvectors { indices: vec![11] }, 10).is_err());
        assert!(build_vector(&VectorSpec::Eigenvectors { indices: vec![2, 2] }, 10).is_err());
    }

    #[test]
    fn function_builders_dispatch() {
        let (f, shift, _) = build_function(&FunctionSpec::InvSqrt).unwrap();
        assert!(!shift);
        assert_relative_eq!(f.eval(4.0), 0.5, max_relative = 1e-15);

        let (f, shift, _) = build_function(&FunctionSpec::LogShifted).unwrap();
        assert!(shift);
        assert_relative_eq!(f.eval(1.0), 2.0_f64.ln(), max_relative = 1e-14);

        let (f, _, _) = build_function(&FunctionSpec::InvPower { alpha: 1.0 }).unwrap();
        assert_relative_eq!(f.eval(4.0), 0.25, max_relative = 1e-15);

        assert!(build_function(&FunctionSpec::InvPower { alpha: 1.5 }).is_err());
    }

    #[test]
    fn file_inputs_parse_and_validate() {
        let dir = std::env::temp_dir().join(format!("slan-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("eigs.txt");
        std::fs::write(&path, "1.0 2.0\n# comment\n3.0 # trailing\n").unwrap();
        let (a, _) = build_matrix(&MatrixSpec::Diag { file: path.clone() }).unwrap();
        assert_eq!(a.eigenvalues(), &[1.0, 2.0, 3.0]);

        let bad = dir.join("bad.txt");
        std::fs::write(&bad, "1.0 oops\n").unwrap();
        assert!(build_matrix(&MatrixSpec::Diag { file: bad }).is_err());

        let vecfile = dir.join("b.txt");
        std::fs::write(&vecfile, "3.0\n4.0\n").unwrap();
        let v = build_vector(&VectorSpec::File { file: vecfile.clone() }, 2).unwrap();
        assert_relative_eq!(v[0], 0.6, max_relative = 1e-15);
        assert!(build_vector(&VectorSpec::File { file: vecfile }, 3).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }
}
