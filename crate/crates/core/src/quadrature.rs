//! Gauss rules and a deterministic adaptive integrator over measure segments.
//!
//! Integrals against the defining measure of a Stieltjes function are written
//! as sums of *segments*: smooth maps `s ∈ (0,1) → (t(s), w(s))` such that
//!
//! ```text
//!     ∫ g(t) dμ(t) = Σ_seg ∫₀¹ g(t(s)) · w(s) ds .
//! ```
//!
//! The substitutions are chosen per measure so that endpoint singularities and
//! infinite tails disappear into the map; the engine then only ever sees a
//! bounded integrand on (0,1). Refinement is plain panel bisection driven by a
//! compare-with-children error estimate, with a strictly deterministic
//! refinement order, so a given input always produces the same panels, the
//! same nodes, and bit-identical sums.
//!
//! Every accepted panel contributes its evaluation nodes to a [`QuadNode`]
//! trace with combined weights, so callers can re-evaluate *other* integrands
//! against the same discretized measure (used by the scalar kernel checks,
//! which must see exactly the nodes the vector quadrature used).

use nalgebra::DVector;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::SymTridiagonal;

/// Points per Gauss-Legendre panel in the adaptive engine.
const PANEL_POINTS: usize = 15;

/// Computes nodes and weights of an n-point Gauss rule from the three-term
/// recurrence of the orthogonal polynomials (Golub-Welsch): nodes are the
/// eigenvalues of the Jacobi matrix, weights are `mu0` times the squared first
/// components of its normalized eigenvectors.
fn golub_welsch(diag: Vec<f64>, offdiag: Vec<f64>, mu0: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let jacobi = SymTridiagonal::new(diag, offdiag)?;
    let eig = jacobi.eigh()?;
    let weights = (0..n)
        .map(|i| mu0 * eig.vectors[(0, i)] * eig.vectors[(0, i)])
        .collect();
    Ok((eig.values, weights))
}

/// n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("Gauss rule needs n >= 1".into()));
    }
    let diag = vec![0.0; n];
    let offdiag = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    golub_welsch(diag, offdiag, 2.0)
}

/// n-point Gauss-Jacobi rule on [-1, 1] for the weight `(1-x)^a (1+x)^b`.
///
/// `mu0` must be the total mass `∫ (1-x)^a (1+x)^b dx`; callers use parameter
/// combinations where that mass has a closed form, which keeps a general
/// beta-function evaluation out of this crate.
pub fn gauss_jacobi(n: usize, a: f64, b: f64, mu0: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("Gauss rule needs n >= 1".into()));
    }
    if a <= -1.0 || b <= -1.0 {
        return Err(Error::InvalidArgument(format!(
            "Jacobi exponents must exceed -1, got a={a}, b={b}"
        )));
    }
    if !(mu0.is_finite() && mu0 > 0.0) {
        return Err(Error::InvalidArgument(format!("invalid measure mass {mu0}")));
    }
    let ab = a + b;
    let mut diag = Vec::with_capacity(n);
    let mut offdiag = Vec::with_capacity(n.saturating_sub(1));
    diag.push((b - a) / (ab + 2.0));
    for k in 1..n {
        let kf = k as f64;
        let denom = (2.0 * kf + ab) * (2.0 * kf + ab + 2.0);
        diag.push((b * b - a * a) / denom);
        let beta_k = if k == 1 {
            4.0 * (a + 1.0) * (b + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + ab)
                / ((2.0 * kf + ab) * (2.0 * kf + ab) * (2.0 * kf + ab + 1.0) * (2.0 * kf + ab - 1.0))
        };
        offdiag.push(beta_k.sqrt());
    }
    // The loop above fills diag for k=1..n and offdiag for the couplings
    // 0-1 .. (n-2)-(n-1); trim the extra when n == 1.
    offdiag.truncate(n - 1);
    golub_welsch(diag, offdiag, mu0)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_POINTS).expect("fixed-size Gauss rule"))
}

/// One smooth piece of a measure, parameterized over s ∈ (0,1).
///
/// The map returns `(t(s), w(s))` with the convention documented at module
/// level. Maps are never evaluated at the endpoints 0 and 1.
pub struct MeasureSegment {
    map: Box<dyn Fn(f64) -> (f64, f64) + Send + Sync>,
}

impl MeasureSegment {
    pub fn new(map: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static) -> Self {
        Self { map: Box::new(map) }
    }

    pub fn sample(&self, s: f64) -> (f64, f64) {
        (self.map)(s)
    }
}

/// Controls for the adaptive engine.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    /// Target on (error estimate) / (max-norm of the integral).
    pub rel_tol: f64,
    /// Hard cap on integrand evaluations before giving up.
    pub max_evaluations: usize,
    /// Maximum bisection depth per segment; panels at the cap are accepted
    /// with their estimated error.
    pub max_depth: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_evaluations: 1_000_000,
            max_depth: 300,
        }
    }
}

/// A single evaluation node of the adapted rule: the integral of `g` against
/// the measure is `Σ g(t_i) · weight_i` over the trace.
#[derive(Debug, Clone, Copy)]
pub struct QuadNode {
    pub t: f64,
    pub weight: f64,
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone)]
pub struct MeasureIntegral {
    pub value: DVector<f64>,
    /// Evaluation nodes with combined (Gauss × map) weights, ordered by
    /// segment and then position; see [`resample`].
    pub nodes: Vec<QuadNode>,
    pub evaluations: usize,
    /// Absolute error estimate (max-norm) of `value`.
    pub error_estimate: f64,
}

/// Re-evaluates a scalar integrand on an existing node trace.
pub fn resample(nodes: &[QuadNode], g: impl Fn(f64) -> f64) -> f64 {
    nodes.iter().map(|n| g(n.t) * n.weight).sum()
}

struct Half {
    value: DVector<f64>,
    nodes: Vec<QuadNode>,
}

struct Panel {
    seg: usize,
    lo: f64,
    hi: f64,
    depth: usize,
    left: Half,
    right: Half,
    /// Max-norm distance between the one-panel estimate and the sum of the
    /// two half-panel estimates.
    err: f64,
    splittable: bool,
}

fn eval_half(
    segment: &MeasureSegment,
    lo: f64,
    hi: f64,
    payload: &mut dyn FnMut(f64) -> Result<DVector<f64>>,
) -> Result<Half> {
    let (xs, ws) = panel_rule();
    let half_width = 0.5 * (hi - lo);
    let mid = 0.5 * (lo + hi);
    let mut value: Option<DVector<f64>> = None;
    let mut nodes = Vec::with_capacity(PANEL_POINTS);
    for (&x, &wq) in xs.iter().zip(ws.iter()) {
        let s = mid + half_width * x;
        let (t, wm) = segment.sample(s);
        let w = wq * half_width * wm;
        if !(t.is_finite() && w.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "measure map produced a non-finite sample at s={s}: t={t}, weight={wm}"
            )));
        }
        let p = payload(t)?;
        let acc = value.get_or_insert_with(|| DVector::zeros(p.len()));
        if p.len() != acc.len() {
            return Err(Error::DimensionMismatch(
                "integrand changed dimension between samples".into(),
            ));
        }
        for i in 0..acc.len() {
            let contrib = p[i] * w;
            if !contrib.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite integrand contribution at t={t}"
                )));
            }
            acc[i] += contrib;
        }
        nodes.push(QuadNode { t, weight: w });
    }
    Ok(Half {
        value: value.expect("PANEL_POINTS > 0"),
        nodes,
    })
}

fn make_panel(
    segments: &[MeasureSegment],
    seg: usize,
    lo: f64,
    hi: f64,
    depth: usize,
    parent_value: &DVector<f64>,
    opts: &AdaptiveOptions,
    payload: &mut dyn FnMut(f64) -> Result<DVector<f64>>,
) -> Result<Panel> {
    let mid = 0.5 * (lo + hi);
    let left = eval_half(&segments[seg], lo, mid, payload)?;
    let right = eval_half(&segments[seg], mid, hi, payload)?;
    let mut err = 0.0_f64;
    for i in 0..parent_value.len() {
        err = err.max((parent_value[i] - (left.value[i] + right.value[i])).abs());
    }
    if err.is_nan() {
        err = f64::INFINITY;
    }
    let splittable = depth < opts.max_depth && mid > lo && mid < hi;
    Ok(Panel {
        seg,
        lo,
        hi,
        depth,
        left,
        right,
        err,
        splittable,
    })
}

/// Adaptively integrates a vector-valued `payload` against the measure
/// described by `segments`.
///
/// Termination: the summed panel error estimates fall below
/// `rel_tol · ‖value‖_∞` (with a 1e-300 absolute floor for genuinely zero
/// integrals). Exceeding the evaluation budget, or running out of splittable
/// panels, with the tolerance unmet is an error carrying the achieved
/// estimate.
pub fn integrate_segments(
    segments: &[MeasureSegment],
    mut payload: impl FnMut(f64) -> Result<DVector<f64>>,
    opts: &AdaptiveOptions,
) -> Result<MeasureIntegral> {
    if segments.is_empty() {
        return Err(Error::InvalidArgument("no measure segments".into()));
    }
    if !(opts.rel_tol.is_finite() && opts.rel_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "invalid quadrature tolerance {}",
            opts.rel_tol
        )));
    }

    let mut evaluations = 0_usize;
    let mut panels: Vec<Panel> = Vec::new();
    for seg in 0..segments.len() {
        let whole = eval_half(&segments[seg], 0.0, 1.0, &mut payload)?;
        evaluations += PANEL_POINTS;
        let panel = make_panel(
            segments,
            seg,
            0.0,
            1.0,
            0,
            &whole.value,
            opts,
            &mut payload,
        )?;
        evaluations += 2 * PANEL_POINTS;
        panels.push(panel);
    }

    let dim = panels[0].left.value.len();
    let summed = |panels: &[Panel]| -> (DVector<f64>, f64) {
        let mut value = DVector::zeros(dim);
        let mut err = 0.0;
        for p in panels {
            value += &p.left.value;
            value += &p.right.value;
            err += p.err;
        }
        (value, err)
    };

    loop {
        let (value, err_total) = summed(&panels);
        let scale = value.amax().max(1e-300);
        if err_total <= opts.rel_tol * scale {
            break;
        }

        // Deterministic choice: the largest estimated error, first index wins.
        let mut worst: Option<usize> = None;
        for (i, p) in panels.iter().enumerate() {
            if p.splittable && worst.map_or(true, |w| p.err > panels[w].err) {
                worst = Some(i);
            }
        }
        let (worst, exhausted) = match worst {
            Some(w) if evaluations + 4 * PANEL_POINTS <= opts.max_evaluations => (w, false),
            other => (other.unwrap_or(0), true),
        };
        if exhausted {
            return Err(Error::QuadratureTolerance {
                requested: opts.rel_tol,
                achieved: err_total / scale,
                evaluations,
                estimate: scale,
            });
        }

        let Panel {
            seg,
            lo,
            hi,
            depth,
            left,
            right,
            ..
        } = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let left_panel = make_panel(segments, seg, lo, mid, depth + 1, &left.value, opts, &mut payload)?;
        let right_panel =
            make_panel(segments, seg, mid, hi, depth + 1, &right.value, opts, &mut payload)?;
        evaluations += 4 * PANEL_POINTS;
        panels.push(left_panel);
        panels.push(right_panel);
    }

    // Deterministic output order regardless of the refinement history.
    panels.sort_by(|a, b| a.seg.cmp(&b.seg).then(a.lo.total_cmp(&b.lo)));
    let mut value = DVector::zeros(dim);
    let mut nodes = Vec::with_capacity(panels.len() * 2 * PANEL_POINTS);
    let mut err_total = 0.0;
    for p in &panels {
        value += &p.left.value;
        value += &p.right.value;
        err_total += p.err;
        nodes.extend_from_slice(&p.left.nodes);
        nodes.extend_from_slice(&p.right.nodes);
    }
    Ok(MeasureIntegral {
        value,
        nodes,
        evaluations,
        error_estimate: err_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (xs, ws) = gauss_legendre(8).unwrap();
        // Exact for degrees <= 15; compare against ∫ x^k = 2/(k+1) for even k.
        for k in [0_u32, 2, 4, 8, 14] {
            let got: f64 = xs
                .iter()
                .zip(&ws)
                .map(|(x, w)| x.powi(k as i32) * w)
                .sum();
            assert_relative_eq!(got, 2.0 / (k as f64 + 1.0), max_relative = 1e-13);
        }
        let odd: f64 = xs.iter().zip(&ws).map(|(x, w)| x.powi(7) * w).sum();
        assert!(odd.abs() < 1e-14, "odd moment should vanish, got {odd}");
    }

    #[test]
    fn gauss_jacobi_chebyshev_case_matches_closed_form() {
        // a = b = -1/2 is the Chebyshev weight: nodes cos((2i-1)π/2n),
        // all weights π/n.
        let n = 7;
        let (xs, ws) = gauss_jacobi(n, -0.5, -0.5, std::f64::consts::PI).unwrap();
        let mut expected: Vec<f64> = (1..=n)
            .map(|i| ((2 * i - 1) as f64 * std::f64::consts::PI / (2.0 * n as f64)).cos())
            .collect();
        expected.sort_by(f64::total_cmp);
        for (got, want) in xs.iter().zip(expected) {
            assert_relative_eq!(*got, want, epsilon = 1e-13);
        }
        for w in ws {
            assert_relative_eq!(w, std::f64::consts::PI / n as f64, max_relative = 1e-12);
        }
    }

    #[test]
    fn gauss_jacobi_with_zero_exponents_reduces_to_legendre() {
        let (xj, wj) = gauss_jacobi(6, 0.0, 0.0, 2.0).unwrap();
        let (xl, wl) = gauss_legendre(6).unwrap();
        for i in 0..6 {
            assert_relative_eq!(xj[i], xl[i], epsilon = 1e-13);
            assert_relative_eq!(wj[i], wl[i], epsilon = 1e-13);
        }
    }

    #[test]
    fn adaptive_engine_handles_endpoint_singularity() {
        // ∫₀¹ s^{-1/2} ds = 2, integrated the hard way (no substitution) to
        // exercise deep bisection near the endpoint.
        let segments = vec![MeasureSegment::new(|s| (s, s.powf(-0.5)))];
        let opts = AdaptiveOptions::default();
        let out = integrate_segments(
            &segments,
            |_t| Ok(DVector::from_element(1, 1.0)),
            &opts,
        )
        .unwrap();
        assert_relative_eq!(out.value[0], 2.0, max_relative = 1e-11);
        assert!(out.error_estimate <= opts.rel_tol * 2.0 * 1.01);
    }

    #[test]
    fn adaptive_engine_reports_budget_exhaustion() {
        let segments = vec![MeasureSegment::new(|s| (s, s.powf(-0.9999)))];
        let opts = AdaptiveOptions {
            max_evaluations: 600,
            ..Default::default()
        };
        let err = integrate_segments(
            &segments,
            |_t| Ok(DVector::from_element(1, 1.0)),
            &opts,
        )
        .unwrap_err();
        match err {
            Error::QuadratureTolerance {
                achieved, estimate, ..
            } => {
                assert!(achieved > 1e-12);
                assert!(estimate.is_finite() && estimate > 0.0);
            }
            other => panic!("expected QuadratureTolerance, got {other:?}"),
        }
    }

    #[test]
    fn trace_reproduces_the_integral_value() {
        let segments = vec![MeasureSegment::new(|s| (2.0 * s, 2.0))]; // dt on (0,2)
        let out = integrate_segments(
            &segments,
            |t| Ok(DVector::from_element(1, (1.0 + t).recip())),
            &AdaptiveOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(out.value[0], 3.0_f64.ln(), max_relative = 1e-12);
        let resampled = resample(&out.nodes, |t| (1.0 + t).recip());
        assert_relative_eq!(resampled, out.value[0], max_relative = 1e-14);
        // The trace also integrates a different payload accurately.
        let other = resample(&out.nodes, |t| t);
        assert_relative_eq!(other, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn vector_payloads_integrate_componentwise() {
        let segments = vec![MeasureSegment::new(|s| (s, 1.0))];
        let out = integrate_segments(
            &segments,
            |t| Ok(DVector::from_vec(vec![1.0, t, t * t])),
            &AdaptiveOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(out.value[0], 1.0, max_relative = 1e-13);
        assert_relative_eq!(out.value[1], 0.5, max_relative = 1e-13);
        assert_relative_eq!(out.value[2], 1.0 / 3.0, max_relative = 1e-13);
    }
}
