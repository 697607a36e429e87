//! End-to-end experiment driver: builds the problem, runs the iteration to
//! invariance, computes exact errors, the error split, and every requested
//! bound at each step.

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::problems::{build_function, build_matrix, build_vector};
use nalgebra::DVector;
use slan_core::bounds::{
    bound_cg, bound_fov, bound_intermediate, bound_main, bound_main_effective, bound_rational,
    bound_spectrum, effective_interval, BoundId, SpectrumBoundKind,
};
use slan_core::kernels::KernelEvaluator;
use slan_core::krylov::{lanczos, LanczosDecomposition};
use slan_core::linalg::SpectralMatrix;
use slan_core::quadrature::AdaptiveOptions;
use slan_core::stieltjes::StieltjesFunction;

/// Relative level (against ‖f(A)b‖) below which optimal errors are treated
/// as double-precision noise: such rows carry a floor flag and are excluded
/// from ratio columns, kernel-route bounds, and polynomial bounds.
pub const PRECISION_FLOOR: f64 = 1e-12;

/// Per-step convergence data. `bounds` is parallel to the experiment's bound
/// identifier list; NaN marks a cell where the bound does not apply (written
/// as an empty CSV field).
#[derive(Debug, Clone)]
pub struct ConvergenceRecord {
    pub m: usize,
    pub beta_next: f64,
    pub err_lan: f64,
    pub err_opt: f64,
    pub ratio_lan_opt: f64,
    pub head_norm: f64,
    pub tail_norm: f64,
    pub component_ratio: f64,
    pub bounds: Vec<f64>,
    pub floor_flag: bool,
}

/// A completed experiment, retaining the decomposition and problem data so
/// downstream consumers (figures, verification) can run further checks
/// without recomputing.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub matrix_label: String,
    pub function_label: String,
    /// True when the run operates on B = A − I (log via log(1+·)).
    pub shifted: bool,
    /// The operator the iteration actually ran on (already shifted).
    pub matrix: SpectralMatrix,
    pub b: DVector<f64>,
    pub f: StieltjesFunction,
    pub exact: DVector<f64>,
    pub exact_norm: f64,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub kappa: f64,
    /// Effective invariance index M of the decomposition.
    pub m_eff: usize,
    pub breakdown_tol: f64,
    pub bound_ids: Vec<BoundId>,
    pub records: Vec<ConvergenceRecord>,
    /// Poles and fitted relative error of the quadrature rational, when the
    /// rational bound was requested.
    pub rational_poles: Option<Vec<f64>>,
    pub rational_rel_error: Option<f64>,
    /// Effective spectral interval of b, when requested.
    pub effective: Option<(f64, f64)>,
    pub decomposition: LanczosDecomposition,
}

impl Experiment {
    /// Stem for default output file names: `a1_inv_sqrt` etc.
    pub fn label(&self) -> String {
        format!(
            "{}_{}",
            self.matrix_label.to_lowercase(),
            self.function_label
        )
    }

    /// Column position of a bound in the record rows.
    pub fn bound_column(&self, id: BoundId) -> Option<usize> {
        self.bound_ids.iter().position(|b| *b == id)
    }

    /// Value of a bound at a record, if present and applicable.
    pub fn bound_at(&self, record: &ConvergenceRecord, id: BoundId) -> Option<f64> {
        let col = self.bound_column(id)?;
        let v = record.bounds[col];
        if v.is_nan() {
            None
        } else {
            Some(v)
        }
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Experiment> {
    cfg.validate()?;
    let (base, matrix_label) = build_matrix(&cfg.matrix)?;
    let (f, shifted, function_label) = build_function(&cfg.function)?;
    let matrix = if shifted {
        base.shifted(-1.0).map_err(|e| {
            CliError::Config(format!(
                "log_shifted needs every eigenvalue above 1 so that B = A − I stays \
                 positive definite: {e}"
            ))
        })?
    } else {
        base
    };
    let n = matrix.n();
    let b = build_vector(&cfg.b, n)?;
    let (lambda_lo, lambda_hi) = (matrix.lambda_min(), matrix.lambda_max());
    let kappa = matrix.kappa();
    let breakdown_tol = cfg.breakdown_tol.unwrap_or(1e-12 * lambda_hi);

    let l = lanczos(&matrix, &b, n, breakdown_tol)
        .map_err(|e| CliError::at_stage("lanczos", None, e))?;
    let m_eff = l.effective_invariance().unwrap_or_else(|| l.order());
    let exact = matrix
        .apply_function(|z| f.eval(z), &b)
        .map_err(|e| CliError::at_stage("exact-solution", None, e))?;
    let exact_norm = exact.norm();
    let bound_ids = cfg.bound_ids();

    // One-off prerequisites for specific bounds.
    let rational = if bound_ids.contains(&BoundId::Rational) {
        let r = slan_core::approx::rational_from_quadrature(
            &f,
            cfg.rational_terms,
            lambda_lo,
            lambda_hi,
        )
        .map_err(|e| CliError::at_stage("rational-approximation", None, e))?;
        Some(r)
    } else {
        None
    };
    let effective = if bound_ids.contains(&BoundId::MainBetaEffective) {
        let coeffs = matrix
            .eigen_coefficients(&b)
            .map_err(|e| CliError::at_stage("eigen-coefficients", None, e))?;
        let (lo, hi) =
            effective_interval(coeffs.as_slice(), matrix.eigenvalues(), cfg.drop_tol)
                .map_err(|e| CliError::Config(format!("effective interval: {e}")))?;
        Some((lo, hi))
    } else {
        None
    };

    let m_report = cfg.m_max.min(m_eff);
    let quad = AdaptiveOptions {
        rel_tol: cfg.quad_rel_tol,
        ..AdaptiveOptions::default()
    };

    // Pass 1: exact per-step quantities.
    struct CoreRow {
        m: usize,
        beta_next: f64,
        err_lan: f64,
        err_opt: f64,
        head_norm: f64,
        tail_norm: f64,
        floor: bool,
    }
    let mut core_rows = Vec::with_capacity(m_report);
    for m in 1..=m_report {
        let approx_m = l
            .approximation(&f, m)
            .map_err(|e| CliError::at_stage("lanczos-approximation", Some(m), e))?;
        let err_lan = (&exact - approx_m).norm();
        let (_, err_opt) = l
            .optimal_projection(&exact, m)
            .map_err(|e| CliError::at_stage("optimal-projection", Some(m), e))?;
        let beta_next = l
            .beta_after(m)
            .map_err(|e| CliError::at_stage("residual-norm", Some(m), e))?;
        let (head_norm, tail_norm) = if m < m_eff {
            let split = l
                .error_split(&f, m)
                .map_err(|e| CliError::at_stage("error-split", Some(m), e))?;
            (split.head_norm(), split.tail_norm())
        } else {
            (0.0, 0.0)
        };
        let floor = err_opt < PRECISION_FLOOR * exact_norm;
        core_rows.push(CoreRow {
            m,
            beta_next,
            err_lan,
            err_opt,
            head_norm,
            tail_norm,
            floor,
        });
    }

    // Optimal-error history for the back-referencing rational bound;
    // index 0 is the error of the empty approximation, ‖f(A)b‖.
    let mut err_opts = vec![exact_norm];
    err_opts.extend(core_rows.iter().map(|r| r.err_opt));
    let err_opt_at = |j: usize| err_opts.get(j).copied();

    // Pass 2: bound columns.
    let mut records = Vec::with_capacity(core_rows.len());
    for row in &core_rows {
        let m = row.m;
        // The kernel route applies off-invariance on rows above the floor.
        let mut kernel_pair: Option<(f64, f64)> = None;
        if (bound_ids.contains(&BoundId::KernelRatio)
            || bound_ids.contains(&BoundId::KernelDelta))
            && m < m_eff
            && !row.floor
            && row.beta_next > breakdown_tol
        {
            let ev = KernelEvaluator::at_step(&l, m, lambda_lo, lambda_hi)
                .map_err(|e| CliError::at_stage("kernel-evaluator", Some(m), e))?;
            let app = ev
                .apply(&f, &quad)
                .map_err(|e| CliError::at_stage("kernel-application", Some(m), e))?;
            let delta0 = ev
                .kernels_at(0.0)
                .map_err(|e| CliError::at_stage("kernel-values", Some(m), e))?
                .delta;
            let (b51, b52) = bound_intermediate(
                &app,
                row.beta_next,
                delta0,
                m,
                lambda_lo,
                lambda_hi,
                row.err_opt,
            )
            .map_err(|e| CliError::at_stage("intermediate-bounds", Some(m), e))?;
            kernel_pair = Some((b51.value, b52.value));
        }

        let mut bounds = Vec::with_capacity(bound_ids.len());
        for id in &bound_ids {
            let value = match id {
                BoundId::MainBeta | BoundId::MainKappa => {
                    let (b32, b33) =
                        bound_main(row.beta_next, lambda_lo, lambda_hi, row.err_opt)
                            .map_err(|e| CliError::at_stage("main-bounds", Some(m), e))?;
                    if *id == BoundId::MainBeta {
                        b32.value
                    } else {
                        b33.value
                    }
                }
                BoundId::KernelRatio => kernel_pair.map_or(f64::NAN, |p| p.0),
                BoundId::KernelDelta => kernel_pair.map_or(f64::NAN, |p| p.1),
                BoundId::Fov => {
                    if row.floor {
                        f64::NAN
                    } else {
                        let grid = cfg.remez_grid.max(10 * (m + 1) + 20);
                        bound_fov(|z| f.eval(z), lambda_lo, lambda_hi, m, grid)
                            .map_err(|e| CliError::at_stage("interval-minimax", Some(m), e))?
                            .value
                    }
                }
                BoundId::SpectrumInvSqrt => {
                    if row.floor || m < 2 {
                        f64::NAN
                    } else {
                        bound_spectrum(SpectrumBoundKind::InvSqrt, matrix.eigenvalues(), m, 0)
                            .map_err(|e| CliError::at_stage("spectrum-minimax", Some(m), e))?
                            .value
                    }
                }
                BoundId::SpectrumSqrt => {
                    if row.floor {
                        f64::NAN
                    } else {
                        bound_spectrum(SpectrumBoundKind::Sqrt, matrix.eigenvalues(), m, 0)
                            .map_err(|e| CliError::at_stage("spectrum-minimax", Some(m), e))?
                            .value
                    }
                }
                BoundId::Cg => {
                    bound_cg(kappa, row.err_opt)
                        .map_err(|e| CliError::at_stage("cg-bound", Some(m), e))?
                        .value
                }
                BoundId::Rational => {
                    let poles: Vec<f64> = rational
                        .as_ref()
                        .expect("rational prerequisite built")
                        .poles();
                    if m + 1 < poles.len().max(1) {
                        f64::NAN
                    } else {
                        bound_rational(&poles, lambda_lo, lambda_hi, err_opt_at, m)
                            .map_err(|e| CliError::at_stage("rational-bound", Some(m), e))?
                            .value
                    }
                }
                BoundId::MainBetaEffective => {
                    let (lo, hi) = effective.expect("effective interval built");
                    bound_main_effective(row.beta_next, lo, hi, row.err_opt)
                        .map_err(|e| CliError::at_stage("effective-bound", Some(m), e))?
                        .value
                }
            };
            bounds.push(value);
        }

        let ratio_lan_opt = if row.floor || row.err_opt == 0.0 {
            f64::NAN
        } else {
            row.err_lan / row.err_opt
        };
        let component_ratio = if m < m_eff && row.tail_norm > 0.0 {
            row.head_norm / row.tail_norm
        } else {
            f64::NAN
        };
        records.push(ConvergenceRecord {
            m,
            beta_next: row.beta_next,
            err_lan: row.err_lan,
            err_opt: row.err_opt,
            ratio_lan_opt,
            head_norm: row.head_norm,
            tail_norm: row.tail_norm,
            component_ratio,
            bounds,
            floor_flag: row.floor,
        });
    }

    Ok(Experiment {
        config: cfg.clone(),
        matrix_label,
        function_label,
        shifted,
        matrix,
        b,
        f,
        exact,
        exact_norm,
        lambda_lo,
        lambda_hi,
        kappa,
        m_eff,
        breakdown_tol,
        bound_ids,
        records,
        rational_poles: rational.as_ref().map(|r| r.poles()),
        rational_rel_error: rational.as_ref().map(|r| r.max_rel_error),
        effective,
        decomposition: l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> ExperimentConfig {
        ExperimentConfig::from_json(
            r#"{
                "matrix": {"kind": "geometric", "n": 24, "lo": 1.0, "hi": 100.0},
                "function": {"kind": "inv_sqrt"},
                "b": {"kind": "gaussian", "seed": 11},
                "m_max": 24
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn pipeline_invariants_on_a_small_run() {
        let exp = run_experiment(&small_cfg()).unwrap();
        assert_eq!(exp.m_eff, 24);
        assert_eq!(exp.records.len(), 24);
        for r in &exp.records {
            assert!(r.err_opt <= r.err_lan * (1.0 + 1e-10), "m = {}", r.m);
            // The identities compare two independently computed routes whose
            // absolute disagreement is rounding-level (~1e-16 · ‖exact‖), so
            // a 1e-10 relative check is only meaningful while the error
            // itself is well clear of that level.
            if r.m < exp.m_eff && r.err_lan >= 1e-5 * exp.exact_norm {
                let pyth = (r.head_norm.powi(2) + r.tail_norm.powi(2)).sqrt();
                assert!(
                    (pyth - r.err_lan).abs() <= 1e-10 * r.err_lan.max(1e-300),
                    "m = {}: split does not recompose the error",
                    r.m
                );
                assert!(
                    (r.tail_norm - r.err_opt).abs() <= 1e-10 * r.err_opt.max(1e-300),
                    "m = {}: tail norm is not the optimal error",
                    r.m
                );
            }
        }
        // Bound chain on non-floored interior rows.
        for r in exp.records.iter().filter(|r| !r.floor_flag && r.m < exp.m_eff) {
            let b51 = exp.bound_at(r, BoundId::KernelRatio).unwrap();
            let b52 = exp.bound_at(r, BoundId::KernelDelta).unwrap();
            let b32 = exp.bound_at(r, BoundId::MainBeta).unwrap();
            let b33 = exp.bound_at(r, BoundId::MainKappa).unwrap();
            let slack = 1.0 + 1e-10;
            assert!(r.err_lan <= b51 * slack, "m = {}", r.m);
            assert!(b51 <= b52 * slack, "m = {}", r.m);
            assert!(b52 <= b32 * slack, "m = {}", r.m);
            assert!(b32 <= b33 * slack, "m = {}", r.m);
        }
    }

    #[test]
    fn lucky_breakdown_yields_one_exact_tail_record() {
        let cfg = ExperimentConfig::from_json(
            r#"{
                "matrix": {"kind": "a1"},
                "function": {"kind": "inv_sqrt"},
                "b": {"kind": "eigenvectors", "indices": [1, 20, 40, 60, 80]},
                "bounds": ["main_beta"]
            }"#,
        )
        .unwrap();
        let exp = run_experiment(&cfg).unwrap();
        assert_eq!(exp.m_eff, 5);
        assert_eq!(exp.records.len(), 5);
        let last = &exp.records[4];
        assert!(last.err_lan <= 1e-9, "err at invariance: {}", last.err_lan);
        assert!(last.beta_next <= exp.breakdown_tol);
        // β ≈ 0 collapses the residual factor to 1: bound ≈ err_opt.
        let b32 = exp.bound_at(last, BoundId::MainBeta).unwrap();
        assert!((b32 - last.err_opt).abs() <= 1e-6 * last.err_opt.max(1e-300));
    }

    #[test]
    fn log_shifted_runs_on_the_shifted_operator() {
        let cfg = ExperimentConfig::from_json(
            r#"{
                "matrix": {"kind": "equispaced", "n": 30, "lo": 1.1, "hi": 110.0},
                "function": {"kind": "log_shifted"},
                "b": {"kind": "gaussian", "seed": 5},
                "m_max": 30,
                "bounds": ["main_beta"]
            }"#,
        )
        .unwrap();
        let exp = run_experiment(&cfg).unwrap();
        assert!(exp.shifted);
        assert!((exp.kappa - 1090.0).abs() <= 1e-9 * 1090.0);
        // Exact solution equals log of the unshifted operator applied to b.
        let (a, _) = build_matrix(&cfg.matrix).unwrap();
        let direct = a.apply_function(|z| z.ln(), &exp.b).unwrap();
        assert!((&exp.exact - direct).norm() <= 1e-12 * exp.exact_norm);
        // Validity of the main bound off the floor.
        for r in exp.records.iter().filter(|r| !r.floor_flag) {
            let b32 = exp.bound_at(r, BoundId::MainBeta).unwrap();
            assert!(r.err_lan <= b32 * (1.0 + 1e-10), "m = {}", r.m);
        }
    }

    #[test]
    fn log_shift_on_a_too_small_spectrum_is_a_config_error() {
        let cfg = ExperimentConfig::from_json(
            r#"{
                "matrix": {"kind": "a1"},
                "function": {"kind": "log_shifted"},
                "b": {"kind": "gaussian", "seed": 5}
            }"#,
        )
        .unwrap();
        let err = match run_experiment(&cfg) {
            Err(e) => e,
            Ok(_) => panic!("a shift below 1.1 must be rejected"),
        };
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn m_max_truncates_the_record_list() {
        let mut cfg = small_cfg();
        cfg.m_max = 7;
        let exp = run_experiment(&cfg).unwrap();
        assert_eq!(exp.records.len(), 7);
        assert_eq!(exp.records.last().unwrap().m, 7);
    }

    #[test]
    fn reruns_are_bit_identical() {
        let cfg = small_cfg();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.err_lan.to_bits(), rb.err_lan.to_bits());
            assert_eq!(ra.err_opt.to_bits(), rb.err_opt.to_bits());
            for (x, y) in ra.bounds.iter().zip(&rb.bounds) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn matrix_specs_unused_by_defaults_still_run() {
        let cfg = ExperimentConfig::from_json(
            r#"{
                "matrix": {"kind": "custom", "eigenvalues": [1.0, 4.0, 9.0, 16.0]},
                "function": {"kind": "reciprocal"},
                "b": {"kind": "gaussian", "seed": 2},
                "bounds": ["cg"],
                "m_max": 4
            }"#,
        )
        .unwrap();
        let exp = run_experiment(&cfg).unwrap();
        assert_eq!(exp.records.len(), 4);
        for r in exp.records.iter().filter(|r| !r.floor_flag) {
            let cg = exp.bound_at(r, BoundId::Cg).unwrap();
            assert!((cg - exp.kappa.sqrt() * r.err_opt).abs() <= 1e-12 * cg.abs());
        }
    }
}
