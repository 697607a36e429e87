//! Stieltjes functions: closed forms, defining measures, and self-checks.
//!
//! A Stieltjes function has the integral form
//!
//! ```text
//!             ∞
//!     g(z) = ∫  dμ(t) / (z + t)          (μ nonnegative on [0, ∞)),
//!             0
//! ```
//!
//! and this module also carries the companion class `f(z) = z · g(z)`, which
//! adds `√z = z · z^{-1/2}` and `log(1+z) = z · log(1+z)/z` to the menu. Every
//! value can be produced two independent ways — a closed form and adaptive
//! quadrature against the measure — and constructors cross-check the two so a
//! mistyped density cannot survive construction.
//!
//! Built-in measures:
//!
//! * `z^{-α}` for `0 < α < 1`: density `sin(απ)/π · t^{-α}` on `(0, ∞)`,
//! * `log(1+z)/z`: density `1/t` on `[1, ∞)`,
//! * finite sums `Σ σᵢ/(z + tᵢ)` (a discrete measure; this covers `1/z`),
//! * user-supplied densities with their closed form.

use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_segments, AdaptiveOptions, MeasureSegment};

/// Whether the function is the Stieltjes integral itself or `z` times it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Plain,
    TimesZ,
}

/// Slack allowed when asserting sign conditions of derivatives; finite
/// differences on well-scaled inputs stay orders of magnitude inside it.
const MONOTONICITY_SLACK: f64 = 1e-6;
/// Relative step for central finite differences.
const FD_STEP_REL: f64 = 1e-4;
/// Agreement required between the measure-based derivative and finite
/// differences.
const FD_CROSS_TOL: f64 = 1e-4;
/// Agreement required between quadrature and closed form at construction.
const CONSISTENCY_TOL: f64 = 1e-8;
/// Cap applied to mapped quadrature abscissae so payload·weight products stay
/// representable; the discarded tail carries no representable mass.
const T_CAP: f64 = 1e250;

#[derive(Clone)]
pub(crate) enum Measure {
    /// `sin(απ)/π · t^{-α} dt` on `(0, ∞)`, giving `g(z) = z^{-α}`.
    InvPower { alpha: f64 },
    /// `dt / t` on `[1, ∞)`, giving `g(z) = log(1+z)/z`.
    ReciprocalLog,
    /// Point masses `σᵢ` at `tᵢ ≥ 0`, giving `g(z) = Σ σᵢ/(z + tᵢ)`.
    Discrete { atoms: Vec<(f64, f64)> },
    /// User density `w(t)` on `(0, ∞)` with its closed form.
    Custom {
        density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        closed: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl std::fmt::Debug for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Measure::InvPower { alpha } => write!(f, "InvPower {{ alpha: {alpha} }}"),
            Measure::ReciprocalLog => write!(f, "ReciprocalLog"),
            Measure::Discrete { atoms } => write!(f, "Discrete {{ atoms: {atoms:?} }}"),
            Measure::Custom { .. } => write!(f, "Custom {{ .. }}"),
        }
    }
}

/// A Stieltjes function `g`, or `z·g(z)` when the transform is
/// [`Transform::TimesZ`].
#[derive(Debug, Clone)]
pub struct StieltjesFunction {
    measure: Measure,
    transform: Transform,
}

impl StieltjesFunction {
    /// `z^{-α}` for `0 < α < 1`.
    pub fn inv_power(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && 0.0 < alpha && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "inverse-power exponent must lie in (0,1), got {alpha}"
            )));
        }
        let f = Self {
            measure: Measure::InvPower { alpha },
            transform: Transform::Plain,
        };
        f.verify_measure()?;
        Ok(f)
    }

    /// `z^{-1/2}`.
    pub fn inv_sqrt() -> Result<Self> {
        Self::inv_power(0.5)
    }

    /// `√z`, as `z · z^{-1/2}`.
    pub fn sqrt() -> Result<Self> {
        Ok(Self::inv_power(0.5)?.times_z())
    }

    /// `log(1+z)/z`.
    pub fn log1p_over_z() -> Result<Self> {
        let f = Self {
            measure: Measure::ReciprocalLog,
            transform: Transform::Plain,
        };
        f.verify_measure()?;
        Ok(f)
    }

    /// `log(1+z)`, as `z · log(1+z)/z`.
    pub fn log1p() -> Result<Self> {
        Ok(Self::log1p_over_z()?.times_z())
    }

    /// `Σ σᵢ/(z + tᵢ)` from pairs `(tᵢ, σᵢ)` with `tᵢ ≥ 0` pairwise distinct
    /// and `σᵢ > 0`.
    pub fn partial_fraction(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidArgument("no partial-fraction terms".into()));
        }
        for &(t, sigma) in &atoms {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "pole location must satisfy t >= 0, got {t}"
                )));
            }
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "partial-fraction weight must be positive, got {sigma}"
                )));
            }
        }
        let mut sorted: Vec<f64> = atoms.iter().map(|a| a.0).collect();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(
                "pole locations must be pairwise distinct".into(),
            ));
        }
        Ok(Self {
            measure: Measure::Discrete { atoms },
            transform: Transform::Plain,
        })
    }

    /// `1/z` (a single point mass at t = 0).
    pub fn reciprocal() -> Result<Self> {
        Self::partial_fraction(vec![(0.0, 1.0)])
    }

    /// A Stieltjes function from a user density on `(0, ∞)` and its closed
    /// form. The two are cross-checked by quadrature at construction, so an
    /// inconsistent pair is rejected.
    pub fn custom(
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        closed: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let f = Self {
            measure: Measure::Custom {
                density: Arc::new(density),
                closed: Arc::new(closed),
            },
            transform: Transform::Plain,
        };
        f.verify_measure()?;
        Ok(f)
    }

    /// Switches to `f(z) = z · g(z)`.
    pub fn times_z(mut self) -> Self {
        self.transform = Transform::TimesZ;
        self
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    pub(crate) fn measure(&self) -> &Measure {
        &self.measure
    }

    /// Exponent α when the underlying measure is the inverse-power one.
    pub fn inv_power_exponent(&self) -> Option<f64> {
        match self.measure {
            Measure::InvPower { alpha } => Some(alpha),
            _ => None,
        }
    }

    /// Point masses `(tᵢ, σᵢ)` when the measure is discrete.
    pub fn atoms(&self) -> Option<&[(f64, f64)]> {
        match &self.measure {
            Measure::Discrete { atoms } => Some(atoms),
            _ => None,
        }
    }

    /// The base Stieltjes value `g(z)` by closed form, without the transform.
    pub fn base_eval(&self, z: f64) -> f64 {
        match &self.measure {
            Measure::InvPower { alpha } => z.powf(-alpha),
            Measure::ReciprocalLog => z.ln_1p() / z,
            Measure::Discrete { atoms } => atoms.iter().map(|&(t, s)| s / (z + t)).sum(),
            Measure::Custom { closed, .. } => closed(z),
        }
    }

    /// Closed-form value of the function (with the `z·g(z)` transform applied
    /// when active). Defined for `z > 0`; misuse surfaces as non-finite values
    /// which downstream spectral transforms reject.
    pub fn eval(&self, z: f64) -> f64 {
        match self.transform {
            Transform::Plain => self.base_eval(z),
            Transform::TimesZ => z * self.base_eval(z),
        }
    }

    /// The measure expressed as smooth unit-interval segments, with
    /// substitutions anchored at `anchor > 0` (placement only; values are
    /// anchor-independent). Errors for discrete measures.
    pub(crate) fn segments(&self, anchor: f64) -> Result<Vec<MeasureSegment>> {
        if !(anchor.is_finite() && anchor > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "segment anchor must be positive, got {anchor}"
            )));
        }
        match &self.measure {
            Measure::Discrete { .. } => Err(Error::DiscreteMeasure),
            Measure::InvPower { alpha } => {
                let alpha = *alpha;
                let k = (alpha * std::f64::consts::PI).sin() / std::f64::consts::PI;
                let c = anchor;
                // Below the anchor: t = c·s^{1/(1-α)} turns t^{-α} dt into a
                // constant density in s.
                let p_lo = 1.0 / (1.0 - alpha);
                let w_lo = k * c.powf(1.0 - alpha) / (1.0 - alpha);
                let lower = MeasureSegment::new(move |s| (c * s.powf(p_lo), w_lo));
                // Above the anchor: t = c·s^{-1/α}; the weight written as a
                // function of t keeps the product with decaying payloads
                // representable even for very deep panels.
                let w_hi_coeff = k * c.powf(-alpha) / alpha;
                let upper = MeasureSegment::new(move |s| {
                    let t = (c * s.powf(-1.0 / alpha)).min(T_CAP);
                    (t, w_hi_coeff * t)
                });
                Ok(vec![lower, upper])
            }
            Measure::ReciprocalLog => {
                // ∫₁^∞ g(t)/t dt = ∫₀¹ g(1/s)·(1/s) ds
                Ok(vec![MeasureSegment::new(|s| {
                    let t = 1.0 / s;
                    (t, t)
                })])
            }
            Measure::Custom { density, .. } => {
                // Two reciprocal pieces, t = c·s and t = c/s, so that any
                // integrable endpoint singularity of the density sits at
                // s → 0 where dyadic bisection has unbounded resolution.
                let c = anchor;
                let d_lo = density.clone();
                let lower = MeasureSegment::new(move |s| {
                    let t = c * s;
                    (t, d_lo(t) * c)
                });
                let d_hi = density.clone();
                let upper = MeasureSegment::new(move |s| {
                    let t = (c / s).min(T_CAP);
                    (t, d_hi(t) * t * t / c)
                });
                Ok(vec![lower, upper])
            }
        }
    }

    /// Evaluates the function by adaptive quadrature against its measure —
    /// the independent route used to validate closed forms. Requires a
    /// continuous density.
    pub fn quad_eval(&self, z: f64, rel_tol: f64) -> Result<f64> {
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "quadrature evaluation needs z > 0, got {z}"
            )));
        }
        let segments = self.segments(z)?;
        let opts = AdaptiveOptions {
            rel_tol,
            ..Default::default()
        };
        let out = integrate_segments(
            &segments,
            |t| Ok(DVector::from_element(1, (z + t).recip())),
            &opts,
        )?;
        let g = out.value[0];
        Ok(match self.transform {
            Transform::Plain => g,
            Transform::TimesZ => z * g,
        })
    }

    /// `f'(z)` computed from the measure:
    /// `-∫ dμ/(z+t)²` for plain functions, `∫ t·dμ/(z+t)²` for `z·g(z)`.
    pub fn derivative_via_measure(&self, z: f64, rel_tol: f64) -> Result<f64> {
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "derivative evaluation needs z > 0, got {z}"
            )));
        }
        if let Measure::Discrete { atoms } = &self.measure {
            return Ok(match self.transform {
                Transform::Plain => -atoms
                    .iter()
                    .map(|&(t, s)| s / ((z + t) * (z + t)))
                    .sum::<f64>(),
                Transform::TimesZ => atoms
                    .iter()
                    .map(|&(t, s)| s * t / ((z + t) * (z + t)))
                    .sum::<f64>(),
            });
        }
        let segments = self.segments(z)?;
        let opts = AdaptiveOptions {
            rel_tol,
            ..Default::default()
        };
        match self.transform {
            Transform::Plain => {
                let out = integrate_segments(
                    &segments,
                    |t| Ok(DVector::from_element(1, ((z + t) * (z + t)).recip())),
                    &opts,
                )?;
                Ok(-out.value[0])
            }
            Transform::TimesZ => {
                let out = integrate_segments(
                    &segments,
                    |t| Ok(DVector::from_element(1, t / ((z + t) * (z + t)))),
                    &opts,
                )?;
                Ok(out.value[0])
            }
        }
    }

    /// Asserts the derivative sign pattern of a Stieltjes function on a grid
    /// of positive points, via central finite differences with relative step
    /// 1e-4:
    ///
    /// * plain: `(-1)^k f^(k)(z) ≥ -1e-6` for `k = 0..=max_order` (≤ 3);
    /// * `z·g(z)`: `f(z) ≥ -1e-6` and `f'(z) ≥ -1e-6`, where `f'` is computed
    ///   from the measure and cross-checked against finite differences to
    ///   1e-4 relative.
    pub fn check_complete_monotonicity(&self, grid: &[f64], max_order: usize) -> Result<()> {
        if max_order > 3 {
            return Err(Error::InvalidArgument(format!(
                "derivative order {max_order} not supported (max 3)"
            )));
        }
        if grid.is_empty() {
            return Err(Error::InvalidArgument("empty check grid".into()));
        }
        for &z in grid {
            if !(z.is_finite() && z > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "monotonicity grid point must be positive, got {z}"
                )));
            }
            let h = z * FD_STEP_REL;
            let f = |x: f64| self.eval(x);
            match self.transform {
                Transform::Plain => {
                    for k in 0..=max_order {
                        let d_k = match k {
                            0 => f(z),
                            1 => (f(z + h) - f(z - h)) / (2.0 * h),
                            2 => (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h),
                            _ => {
                                (f(z + 2.0 * h) - 2.0 * f(z + h) + 2.0 * f(z - h)
                                    - f(z - 2.0 * h))
                                    / (2.0 * h * h * h)
                            }
                        };
                        let signed = if k % 2 == 0 { d_k } else { -d_k };
                        if !(signed >= -MONOTONICITY_SLACK) {
                            return Err(Error::InvariantViolation {
                                check: "complete monotonicity",
                                detail: format!(
                                    "(-1)^{k} f^({k}) = {signed:e} at z = {z} (below -{MONOTONICITY_SLACK:e})"
                                ),
                            });
                        }
                    }
                }
                Transform::TimesZ => {
                    let value = f(z);
                    if !(value >= -MONOTONICITY_SLACK) {
                        return Err(Error::InvariantViolation {
                            check: "nonnegativity",
                            detail: format!("f = {value:e} at z = {z}"),
                        });
                    }
                    if max_order >= 1 {
                        let fd = (f(z + h) - f(z - h)) / (2.0 * h);
                        let qd = self.derivative_via_measure(z, 1e-11)?;
                        if !(qd >= -MONOTONICITY_SLACK) {
                            return Err(Error::InvariantViolation {
                                check: "monotone growth",
                                detail: format!("f' = {qd:e} at z = {z}"),
                            });
                        }
                        let scale = fd.abs().max(qd.abs()).max(1e-12);
                        if (fd - qd).abs() > FD_CROSS_TOL * scale {
                            return Err(Error::InvariantViolation {
                                check: "derivative cross-check",
                                detail: format!(
                                    "measure route {qd:e} vs finite differences {fd:e} at z = {z}"
                                ),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Construction-time consistency check: the quadrature route must
    /// reproduce the closed form.
    fn verify_measure(&self) -> Result<()> {
        for z in [1.0, 10.0] {
            let quad = self.quad_eval(z, 1e-11)?;
            let closed = self.eval(z);
            let denom = closed.abs().max(1e-300);
            if ((quad - closed) / denom).abs() > CONSISTENCY_TOL {
                return Err(Error::InvariantViolation {
                    check: "measure consistency",
                    detail: format!(
                        "quadrature {quad:e} vs closed form {closed:e} at z = {z}"
                    ),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inverse_sqrt_closed_form_and_quadrature_agree() {
        let f = StieltjesFunction::inv_sqrt().unwrap();
        assert_relative_eq!(f.eval(4.0), 0.5, max_relative = 1e-15);
        assert_relative_eq!(f.eval(1.0), 1.0, max_relative = 1e-15);
        let q = f.quad_eval(4.0, 1e-12).unwrap();
        assert_relative_eq!(q, 0.5, max_relative = 1e-10);
    }

    #[test]
    fn general_inverse_power_quadrature_matches() {
        for alpha in [0.1, 0.3, 0.7, 0.9] {
            let f = StieltjesFunction::inv_power(alpha).unwrap();
            for z in [0.5, 1.0, 37.0] {
                let q = f.quad_eval(z, 1e-12).unwrap();
                assert_relative_eq!(q, z.powf(-alpha), max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn square_root_is_z_times_inverse_sqrt() {
        let f = StieltjesFunction::sqrt().unwrap();
        assert_relative_eq!(f.eval(4.0), 2.0, max_relative = 1e-15);
        let q = f.quad_eval(9.0, 1e-12).unwrap();
        assert_relative_eq!(q, 3.0, max_relative = 1e-10);
        assert_eq!(f.transform(), Transform::TimesZ);
    }

    #[test]
    fn log_kind_closed_form_and_quadrature_agree() {
        let f = StieltjesFunction::log1p_over_z().unwrap();
        assert_relative_eq!(f.eval(1.0), std::f64::consts::LN_2, max_relative = 1e-15);
        let q = f.quad_eval(1.0, 1e-12).unwrap();
        assert_relative_eq!(q, std::f64::consts::LN_2, max_relative = 1e-10);

        let g = StieltjesFunction::log1p().unwrap();
        let e = std::f64::consts::E;
        assert_relative_eq!(g.eval(e - 1.0), 1.0, max_relative = 1e-14);
        let q = g.quad_eval(100.0, 1e-12).unwrap();
        assert_relative_eq!(q, 101.0_f64.ln(), max_relative = 1e-10);
    }

    #[test]
    fn partial_fraction_sums_and_rejects_quadrature() {
        let f = StieltjesFunction::partial_fraction(vec![(0.0, 1.0), (2.0, 3.0)]).unwrap();
        assert_relative_eq!(f.eval(5.0), 1.0 / 5.0 + 3.0 / 7.0, max_relative = 1e-15);
        match f.quad_eval(1.0, 1e-12) {
            Err(Error::DiscreteMeasure) => {}
            other => panic!("expected DiscreteMeasure, got {other:?}"),
        }
        let r = StieltjesFunction::reciprocal().unwrap();
        assert_relative_eq!(r.eval(5.0), 0.2, max_relative = 1e-15);
    }

    #[test]
    fn constructors_reject_invalid_parameters() {
        assert!(StieltjesFunction::inv_power(0.0).is_err());
        assert!(StieltjesFunction::inv_power(1.0).is_err());
        assert!(StieltjesFunction::inv_power(-0.5).is_err());
        assert!(StieltjesFunction::partial_fraction(vec![]).is_err());
        assert!(StieltjesFunction::partial_fraction(vec![(0.0, -1.0)]).is_err());
        assert!(StieltjesFunction::partial_fraction(vec![(-1.0, 1.0)]).is_err());
        assert!(StieltjesFunction::partial_fraction(vec![(1.0, 1.0), (1.0, 2.0)]).is_err());
    }

    #[test]
    fn custom_measure_is_cross_checked_at_construction() {
        // Same data as inv_sqrt, fed through the custom route.
        let k = 1.0 / std::f64::consts::PI;
        let good = StieltjesFunction::custom(
            move |t| k * t.powf(-0.5),
            |z| z.powf(-0.5),
        );
        assert!(good.is_ok());

        let bad = StieltjesFunction::custom(
            move |t| k * t.powf(-0.5),
            |z| 2.0 * z.powf(-0.5),
        );
        match bad {
            Err(Error::InvariantViolation { check, .. }) => {
                assert_eq!(check, "measure consistency")
            }
            other => panic!("expected consistency failure, got {other:?}"),
        }
    }

    #[test]
    fn complete_monotonicity_holds_for_builtins() {
        let grid: Vec<f64> = (0..20)
            .map(|i| 0.1 * 10.0_f64.powf(i as f64 * 4.0 / 19.0))
            .collect();
        StieltjesFunction::inv_sqrt()
            .unwrap()
            .check_complete_monotonicity(&grid, 3)
            .unwrap();
        StieltjesFunction::inv_power(0.25)
            .unwrap()
            .check_complete_monotonicity(&grid, 3)
            .unwrap();
        StieltjesFunction::log1p_over_z()
            .unwrap()
            .check_complete_monotonicity(&grid, 3)
            .unwrap();
        StieltjesFunction::reciprocal()
            .unwrap()
            .check_complete_monotonicity(&grid, 3)
            .unwrap();
        // Growing kinds: value and first derivative.
        StieltjesFunction::sqrt()
            .unwrap()
            .check_complete_monotonicity(&grid, 1)
            .unwrap();
        StieltjesFunction::log1p()
            .unwrap()
            .check_complete_monotonicity(&grid, 1)
            .unwrap();
    }

    #[test]
    fn measure_derivative_matches_calculus() {
        let f = StieltjesFunction::inv_sqrt().unwrap();
        let d = f.derivative_via_measure(4.0, 1e-11).unwrap();
        assert_relative_eq!(d, -0.5 * 4.0_f64.powf(-1.5), max_relative = 1e-9);

        let s = StieltjesFunction::sqrt().unwrap();
        let d = s.derivative_via_measure(4.0, 1e-11).unwrap();
        assert_relative_eq!(d, 0.25, max_relative = 1e-9);

        let r = StieltjesFunction::reciprocal().unwrap();
        let d = r.derivative_via_measure(2.0, 1e-11).unwrap();
        assert_relative_eq!(d, -0.25, max_relative = 1e-14);
    }

    #[test]
    fn derivative_order_cap_is_enforced() {
        let f = StieltjesFunction::inv_sqrt().unwrap();
        assert!(f.check_complete_monotonicity(&[1.0], 4).is_err());
    }
}
