//! Dense spectral matrices and symmetric tridiagonal kernels.
//!
//! Two workhorses live here. [`SymTridiagonal`] is the Jacobi-matrix type the
//! Lanczos process produces; it knows how to diagonalize itself (implicit-shift
//! QL) and how to solve shifted systems `(T + tI)x = r` in O(n) via LDL^T,
//! which the resolvent-kernel quadratures call thousands of times.
//! [`SpectralMatrix`] represents the operator under study through its
//! eigendecomposition `A = Q Λ Qᵀ`, so `f(A)b` is computable exactly and can
//! serve as ground truth.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Maximum implicit-shift sweeps per eigenvalue before giving up.
const MAX_QL_SWEEPS: usize = 50;

/// Symmetric tridiagonal matrix stored as its diagonal and subdiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

/// Eigendecomposition of a [`SymTridiagonal`]: `values` ascending, `vectors`
/// holding the corresponding orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymTridiagonal {
    /// Builds the matrix from its diagonal (length n) and subdiagonal
    /// (length n-1). Entries must be finite.
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidArgument("empty diagonal".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch(format!(
                "subdiagonal has length {}, expected {}",
                offdiag.len(),
                diag.len() - 1
            )));
        }
        if diag.iter().chain(offdiag.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite matrix entry".into()));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Leading principal block of order `m`.
    pub fn leading_block(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.dim() {
            return Err(Error::InvalidArgument(format!(
                "block order {m} outside 1..={}",
                self.dim()
            )));
        }
        Ok(Self {
            diag: self.diag[..m].to_vec(),
            offdiag: self.offdiag[..m - 1].to_vec(),
        })
    }

    /// Trailing principal block starting at row `m` (so of order n-m).
    pub fn trailing_block(&self, m: usize) -> Result<Self> {
        if m >= self.dim() {
            return Err(Error::InvalidArgument(format!(
                "trailing block start {m} outside 0..{}",
                self.dim()
            )));
        }
        Ok(Self {
            diag: self.diag[m..].to_vec(),
            offdiag: self.offdiag[m..].to_vec(),
        })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = self.diag[i];
            if i + 1 < n {
                a[(i, i + 1)] = self.offdiag[i];
                a[(i + 1, i)] = self.offdiag[i];
            }
        }
        a
    }

    pub fn matvec(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "matvec: vector length {} against order {n}",
                x.len()
            )));
        }
        let mut y = DVector::zeros(n);
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.offdiag[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.offdiag[i] * x[i + 1];
            }
            y[i] = s;
        }
        Ok(y)
    }

    /// Full eigendecomposition by implicit-shift QL with accumulated rotations.
    ///
    /// Cost is O(n²) per eigenvalue for the rotation updates, O(n³) overall —
    /// ample for the orders (≤ a few hundred) this crate works at. Eigenvalues
    /// are returned ascending; each eigenvector is sign-normalized so its
    /// largest-magnitude component is positive, keeping downstream output
    /// byte-stable.
    pub fn eigh(&self) -> Result<EigenPairs> {
        let n = self.dim();
        let mut d = self.diag.clone();
        // e[i] couples rows i and i+1; the trailing slot is workspace.
        let mut e = vec![0.0_f64; n];
        e[..n - 1].copy_from_slice(&self.offdiag);
        let mut z = DMatrix::<f64>::identity(n, n);

        for l in 0..n {
            let mut sweeps = 0;
            loop {
                // Find the first negligible coupling at or after l.
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(Error::EigenNonConvergence {
                        index: l,
                        sweeps: MAX_QL_SWEEPS,
                    });
                }

                // Wilkinson-style shift from the 2x2 at the low end.
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c) = (1.0_f64, 1.0_f64);
                let mut p = 0.0_f64;
                let mut restart = false;

                for i in (l..m).rev() {
                    let mut f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        // Rotation underflowed; drop the shift and retry.
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        restart = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for k in 0..n {
                        f = z[(k, i + 1)];
                        z[(k, i + 1)] = s * z[(k, i)] + c * f;
                        z[(k, i)] = c * z[(k, i)] - s * f;
                    }
                }
                if restart {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }

        // Sort ascending, permute the eigenvector columns along, and fix signs.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
        let values: Vec<f64> = order.iter().map(|&j| d[j]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (col, &j) in order.iter().enumerate() {
            let mut max_abs = 0.0_f64;
            let mut lead_sign = 1.0_f64;
            for k in 0..n {
                let v = z[(k, j)];
                if v.abs() > max_abs {
                    max_abs = v.abs();
                    lead_sign = if v < 0.0 { -1.0 } else { 1.0 };
                }
            }
            for k in 0..n {
                vectors[(k, col)] = lead_sign * z[(k, j)];
            }
        }
        Ok(EigenPairs { values, vectors })
    }

    /// Solves `(T + shift·I) x = rhs` by LDL^T elimination without pivoting.
    ///
    /// This is the O(n) resolvent kernel used inside the quadratures, valid
    /// whenever the shifted matrix is positive definite; a zero or negative
    /// pivot aborts with [`Error::SingularPivot`].
    pub fn shifted_solve(&self, shift: f64, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.dim();
        if rhs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "shifted_solve: rhs length {} against order {n}",
                rhs.len()
            )));
        }
        let mut pivots = vec![0.0_f64; n];
        let mut mult = vec![0.0_f64; n.saturating_sub(1)];
        pivots[0] = self.diag[0] + shift;
        if pivots[0] <= 0.0 || !pivots[0].is_finite() {
            return Err(Error::SingularPivot {
                row: 0,
                pivot: pivots[0],
            });
        }
        for i in 1..n {
            mult[i - 1] = self.offdiag[i - 1] / pivots[i - 1];
            pivots[i] = self.diag[i] + shift - mult[i - 1] * self.offdiag[i - 1];
            if pivots[i] <= 0.0 || !pivots[i].is_finite() {
                return Err(Error::SingularPivot {
                    row: i,
                    pivot: pivots[i],
                });
            }
        }
        let mut x = rhs.clone();
        for i in 1..n {
            x[i] -= mult[i - 1] * x[i - 1];
        }
        x[n - 1] /= pivots[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = x[i] / pivots[i] - mult[i] * x[i + 1];
        }
        Ok(x)
    }
}

/// Symmetric positive definite operator given by its eigendecomposition.
///
/// Experiments use diagonal matrices (`eigenvectors: None`, so `Q = I`); the
/// basis-carrying variant exists for rotation-invariance checks and callers
/// with a precomputed dense eigenbasis.
#[derive(Debug, Clone)]
pub struct SpectralMatrix {
    eigenvalues: Vec<f64>,
    eigenvectors: Option<DMatrix<f64>>,
}

/// Orthonormality slack accepted by [`SpectralMatrix::with_basis`].
const BASIS_TOL: f64 = 1e-12;

impl SpectralMatrix {
    /// Diagonal operator with the given eigenvalues (must be positive, finite,
    /// and ascending).
    pub fn diagonal(eigenvalues: Vec<f64>) -> Result<Self> {
        Self::validate_spectrum(&eigenvalues)?;
        Ok(Self {
            eigenvalues,
            eigenvectors: None,
        })
    }

    /// Operator `Q Λ Qᵀ` with an explicit orthonormal eigenbasis `Q`.
    pub fn with_basis(eigenvalues: Vec<f64>, basis: DMatrix<f64>) -> Result<Self> {
        Self::validate_spectrum(&eigenvalues)?;
        let n = eigenvalues.len();
        if basis.nrows() != n || basis.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "basis is {}x{}, expected {n}x{n}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        let gram = basis.transpose() * &basis;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - target).abs() > BASIS_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "basis is not orthonormal: gram[{i},{j}] = {}",
                        gram[(i, j)]
                    )));
                }
            }
        }
        Ok(Self {
            eigenvalues,
            eigenvectors: Some(basis),
        })
    }

    fn validate_spectrum(eigenvalues: &[f64]) -> Result<()> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidArgument("empty spectrum".into()));
        }
        for (i, &l) in eigenvalues.iter().enumerate() {
            if !l.is_finite() || l <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "eigenvalue {l} at index {i} is not positive and finite"
                )));
            }
            if i > 0 && eigenvalues[i - 1] > l {
                return Err(Error::InvalidArgument(format!(
                    "eigenvalues not ascending at index {i}: {} > {l}",
                    eigenvalues[i - 1]
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// Condition number λ_max / λ_min.
    pub fn kappa(&self) -> f64 {
        self.lambda_max() / self.lambda_min()
    }

    /// Same operator with every eigenvalue shifted by `delta` (spectrum must
    /// stay positive).
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        let shifted: Vec<f64> = self.eigenvalues.iter().map(|l| l + delta).collect();
        Self::validate_spectrum(&shifted)?;
        Ok(Self {
            eigenvalues: shifted,
            eigenvectors: self.eigenvectors.clone(),
        })
    }

    /// `A x`.
    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.apply_function_unchecked(|l| l, x)
    }

    /// `f(A) b = Q f(Λ) Qᵀ b`, failing if `f` is non-finite at any eigenvalue.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64, b: &DVector<f64>) -> Result<DVector<f64>> {
        for &l in &self.eigenvalues {
            let v = f(l);
            if !v.is_finite() {
                return Err(Error::NonFiniteFunctionValue { eigenvalue: l });
            }
        }
        self.apply_function_unchecked(f, b)
    }

    fn apply_function_unchecked(
        &self,
        f: impl Fn(f64) -> f64,
        b: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        let n = self.n();
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "apply: vector length {} against order {n}",
                b.len()
            )));
        }
        match &self.eigenvectors {
            None => Ok(DVector::from_fn(n, |i, _| f(self.eigenvalues[i]) * b[i])),
            Some(q) => {
                let mut coeffs = q.transpose() * b;
                for i in 0..n {
                    coeffs[i] *= f(self.eigenvalues[i]);
                }
                Ok(q * coeffs)
            }
        }
    }

    /// Eigen-coefficients `Qᵀ b` of a vector (a copy of `b` itself in the
    /// diagonal case).
    pub fn eigen_coefficients(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        if b.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "eigen_coefficients: vector length {} against order {}",
                b.len(),
                self.n()
            )));
        }
        Ok(match &self.eigenvectors {
            None => b.clone(),
            Some(q) => q.transpose() * b,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn toeplitz3() -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0, 2.0, 2.0], vec![1.0, 1.0]).unwrap()
    }

    /// Characteristic-polynomial bisection, independent of the QL code path.
    /// Uses the Sturm-sequence sign-count of the leading principal minors.
    fn eigenvalues_by_bisection(t: &SymTridiagonal) -> Vec<f64> {
        let n = t.dim();
        let count_below = |x: f64| -> usize {
            // Number of eigenvalues strictly below x via the recurrence
            // p_i = (d_i - x) - e_{i-1}^2 / p_{i-1}.
            let mut count = 0;
            let mut p = 1.0_f64;
            for i in 0..n {
                let e2 = if i == 0 {
                    0.0
                } else {
                    t.offdiag()[i - 1] * t.offdiag()[i - 1]
                };
                p = (t.diag()[i] - x) - e2 / p;
                if p == 0.0 {
                    p = 1e-300;
                }
                if p < 0.0 {
                    count += 1;
                }
                if p.abs() < 1e-300 {
                    p = p.signum() * 1e-300;
                }
            }
            count
        };
        let radius = t
            .diag()
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let mut r = d.abs();
                if i > 0 {
                    r += t.offdiag()[i - 1].abs();
                }
                if i < n - 1 {
                    r += t.offdiag()[i].abs();
                }
                r
            })
            .fold(0.0_f64, f64::max)
            + 1.0;
        (0..n)
            .map(|k| {
                let (mut lo, mut hi) = (-radius, radius);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if count_below(mid) > k {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }

    #[test]
    fn toeplitz3_eigenvalues_match_closed_form_and_bisection() {
        let t = toeplitz3();
        let eig = t.eigh().unwrap();
        let expected = [2.0 - 2.0_f64.sqrt(), 2.0, 2.0 + 2.0_f64.sqrt()];
        for (got, want) in eig.values.iter().zip(expected) {
            assert_relative_eq!(*got, want, max_relative = 1e-14);
        }
        let oracle = eigenvalues_by_bisection(&t);
        for (got, want) in eig.values.iter().zip(oracle) {
            assert!(
                (got - want).abs() <= 1e-10,
                "QL eigenvalue {got} disagrees with bisection oracle {want}"
            );
        }
    }

    #[test]
    fn eigh_reconstructs_matrix_and_keeps_basis_orthonormal() {
        // A mildly irregular Jacobi matrix.
        let diag: Vec<f64> = (0..12).map(|i| 3.0 + 0.5 * (i as f64).sin()).collect();
        let off: Vec<f64> = (0..11).map(|i| 0.8 + 0.3 * (i as f64).cos()).collect();
        let t = SymTridiagonal::new(diag, off).unwrap();
        let eig = t.eigh().unwrap();
        let n = t.dim();

        let q = &eig.vectors;
        let gram = q.transpose() * q;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (gram[(i, j)] - target).abs() < 1e-13,
                    "gram[{i},{j}] = {} off unity/zero",
                    gram[(i, j)]
                );
            }
        }

        let theta = DMatrix::from_fn(n, n, |i, j| if i == j { eig.values[i] } else { 0.0 });
        let rebuilt = q * theta * q.transpose();
        let diff = (rebuilt - t.to_dense()).norm();
        let scale = t.to_dense().norm();
        assert!(
            diff <= 1e-12 * scale,
            "reconstruction residual {diff:e} above 1e-12 of scale {scale:e}"
        );

        for w in eig.values.windows(2) {
            assert!(w[0] <= w[1], "eigenvalues not ascending: {:?}", eig.values);
        }
    }

    #[test]
    fn eigh_agrees_with_dense_symmetric_eigen() {
        let diag: Vec<f64> = (0..20).map(|i| 5.0 + (i as f64 * 0.7).cos()).collect();
        let off: Vec<f64> = (0..19).map(|i| 1.0 + 0.5 * (i as f64 * 1.3).sin()).collect();
        let t = SymTridiagonal::new(diag, off).unwrap();
        let eig = t.eigh().unwrap();

        let dense = nalgebra::SymmetricEigen::new(t.to_dense());
        let mut reference: Vec<f64> = dense.eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (got, want) in eig.values.iter().zip(reference) {
            assert_relative_eq!(*got, want, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn leading_block_eigenvalues_interlace() {
        let diag: Vec<f64> = (0..15).map(|i| 4.0 + (i as f64 * 0.9).sin()).collect();
        let off: Vec<f64> = (0..14).map(|i| 0.6 + 0.4 * (i as f64 * 0.4).cos()).collect();
        let t = SymTridiagonal::new(diag, off).unwrap();
        let full = t.eigh().unwrap().values;
        let sub = t.leading_block(14).unwrap().eigh().unwrap().values;
        for i in 0..sub.len() {
            assert!(
                full[i] <= sub[i] + 1e-12 && sub[i] <= full[i + 1] + 1e-12,
                "interlacing failed at {i}: {} vs ({}, {})",
                sub[i],
                full[i],
                full[i + 1]
            );
        }
    }

    #[test]
    fn shifted_solve_two_by_two_hand_value() {
        // [[2,1],[1,2]] x = e1  =>  x = (2/3, -1/3)
        let t = SymTridiagonal::new(vec![2.0, 2.0], vec![1.0]).unwrap();
        let x = t
            .shifted_solve(0.0, &DVector::from_vec(vec![1.0, 0.0]))
            .unwrap();
        assert_relative_eq!(x[0], 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(x[1], -1.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn shifted_solve_matches_eigendecomposition_route() {
        let diag: Vec<f64> = (0..10).map(|i| 6.0 + (i as f64).sin()).collect();
        let off: Vec<f64> = (0..9).map(|i| 1.2 + (i as f64 * 0.8).cos()).collect();
        let t = SymTridiagonal::new(diag, off).unwrap();
        let rhs = DVector::from_fn(10, |i, _| (i as f64 * 0.31).cos());
        for shift in [0.0, 0.5, 10.0, 1e4] {
            let direct = t.shifted_solve(shift, &rhs).unwrap();
            let eig = t.eigh().unwrap();
            let mut coeffs = eig.vectors.transpose() * &rhs;
            for i in 0..10 {
                coeffs[i] /= eig.values[i] + shift;
            }
            let via_eig = &eig.vectors * coeffs;
            assert!(
                (&direct - &via_eig).norm() <= 1e-10 * direct.norm(),
                "solve routes disagree at shift {shift}"
            );
        }
    }

    #[test]
    fn shifted_solve_reports_nonpositive_pivot() {
        let t = SymTridiagonal::new(vec![1.0, 2.0], vec![0.0]).unwrap();
        let err = t
            .shifted_solve(-1.0, &DVector::from_vec(vec![1.0, 1.0]))
            .unwrap_err();
        match err {
            Error::SingularPivot { row, pivot } => {
                assert_eq!(row, 0);
                assert!(pivot <= 0.0);
            }
            other => panic!("expected SingularPivot, got {other:?}"),
        }
    }

    #[test]
    fn spectral_apply_diagonal_inverse() {
        let a = SpectralMatrix::diagonal(vec![1.0, 2.0, 3.0]).unwrap();
        let b = DVector::from_vec(vec![1.0, 1.0, 1.0]);
        let x = a.apply_function(|l| 1.0 / l, &b).unwrap();
        assert_relative_eq!(x[0], 1.0);
        assert_relative_eq!(x[1], 0.5);
        assert_relative_eq!(x[2], 1.0 / 3.0);
        // and A (A^{-1} b) = b
        let back = a.apply(&x).unwrap();
        assert!((back - b).norm() < 1e-15);
    }

    #[test]
    fn spectral_apply_reports_offending_eigenvalue() {
        let a = SpectralMatrix::diagonal(vec![1.0, 2.0, 3.0]).unwrap();
        let b = DVector::from_vec(vec![1.0, 1.0, 1.0]);
        let err = a.apply_function(|l| 1.0 / (l - 2.0), &b).unwrap_err();
        match err {
            Error::NonFiniteFunctionValue { eigenvalue } => assert_eq!(eigenvalue, 2.0),
            other => panic!("expected NonFiniteFunctionValue, got {other:?}"),
        }
    }

    #[test]
    fn with_basis_validates_orthonormality() {
        let theta = std::f64::consts::FRAC_PI_6;
        let q = DMatrix::from_row_slice(
            2,
            2,
            &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()],
        );
        let a = SpectralMatrix::with_basis(vec![1.0, 4.0], q.clone()).unwrap();
        // A x against the dense product
        let x = DVector::from_vec(vec![0.3, -0.7]);
        let lambda = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]);
        let dense = &q * lambda * q.transpose();
        assert!((a.apply(&x).unwrap() - dense * x).norm() < 1e-14);

        let skewed = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(SpectralMatrix::with_basis(vec![1.0, 4.0], skewed).is_err());
    }

    #[test]
    fn spectrum_validation_rejects_bad_input() {
        assert!(SpectralMatrix::diagonal(vec![]).is_err());
        assert!(SpectralMatrix::diagonal(vec![0.0, 1.0]).is_err());
        assert!(SpectralMatrix::diagonal(vec![-1.0, 1.0]).is_err());
        assert!(SpectralMatrix::diagonal(vec![2.0, 1.0]).is_err());
        assert!(SpectralMatrix::diagonal(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn shifted_spectrum_keeps_basis_and_checks_positivity() {
        let a = SpectralMatrix::diagonal(vec![1.1, 2.0, 110.0]).unwrap();
        let b = a.shifted(-1.0).unwrap();
        assert_relative_eq!(b.lambda_min(), 0.1, max_relative = 1e-15);
        assert!(a.shifted(-1.1).is_err(), "spectrum through zero must fail");
    }
}
