//! Figure recipes: canned experiment sets reproducing the reference plots —
//! sharpness of the near-optimality bounds, the two error components, the
//! comparison against interval/spectrum bounds, and the effective-interval
//! refinement for a partially supported starting vector.
//!
//! Each recipe writes one CSV per run plus one SVG chart, both
//! deterministic. Curves stop at the precision floor (or at invariance,
//! whichever comes first): floored rows carry empty bound cells, which the
//! chart renders as gaps.

use crate::config::{ExperimentConfig, FunctionSpec, MatrixSpec, VectorSpec};
use crate::csvout;
use crate::error::{CliError, Result};
use crate::experiment::{run_experiment, ConvergenceRecord, Experiment};
use crate::svg::{line_chart, Series};
use slan_core::bounds::BoundId;
use std::path::{Path, PathBuf};

/// Seed of every canned figure run. Arbitrary but frozen: figure outputs
/// are byte-reproducible.
pub const FIGURE_SEED: u64 = 20260814;

fn base_config(matrix: MatrixSpec, function: FunctionSpec, bounds: &[&str]) -> ExperimentConfig {
    ExperimentConfig {
        matrix,
        function,
        b: VectorSpec::Gaussian { seed: FIGURE_SEED },
        m_max: 100,
        bounds: bounds.iter().map(|s| s.to_string()).collect(),
        quad_rel_tol: 1e-12,
        breakdown_tol: None,
        remez_grid: 1024,
        rational_terms: 10,
        drop_tol: 1e-12,
        output: None,
    }
}

/// Record rows up to (excluding) the first floored step.
fn live_rows(exp: &Experiment) -> Vec<&ConvergenceRecord> {
    exp.records
        .iter()
        .take_while(|r| !r.floor_flag)
        .collect()
}

fn error_series(exp: &Experiment) -> Vec<Series> {
    let rows = live_rows(exp);
    vec![
        Series::new(
            "Lanczos error",
            rows.iter().map(|r| (r.m as f64, r.err_lan)).collect(),
        ),
        Series::new(
            "optimal error",
            rows.iter().map(|r| (r.m as f64, r.err_opt)).collect(),
        ),
    ]
}

fn bound_series(exp: &Experiment, id: BoundId, label: &str) -> Series {
    let rows = live_rows(exp);
    Series::dashed(
        label,
        rows.iter()
            .map(|r| (r.m as f64, exp.bound_at(r, id).unwrap_or(f64::NAN)))
            .collect(),
    )
}

fn write_pair(
    out_dir: &Path,
    stem: &str,
    exp: &Experiment,
    title: &str,
    series: Vec<Series>,
) -> Result<Vec<PathBuf>> {
    let csv_path = out_dir.join(format!("{stem}.csv"));
    std::fs::write(&csv_path, csvout::to_string(exp))?;
    let svg_path = out_dir.join(format!("{stem}.svg"));
    std::fs::write(&svg_path, line_chart(title, "iteration m", "error", &series))?;
    Ok(vec![csv_path, svg_path])
}

fn fig1(out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for matrix in [MatrixSpec::A1, MatrixSpec::A2] {
        for function in [FunctionSpec::InvSqrt, FunctionSpec::Sqrt] {
            let cfg = base_config(
                matrix.clone(),
                function.clone(),
                &["main_beta", "main_kappa", "kernel_ratio", "kernel_delta"],
            );
            let exp = run_experiment(&cfg)?;
            let mut series = error_series(&exp);
            series.push(bound_series(&exp, BoundId::KernelRatio, "ratio bound"));
            series.push(bound_series(&exp, BoundId::KernelDelta, "kernel bound"));
            series.push(bound_series(&exp, BoundId::MainBeta, "residual bound"));
            series.push(bound_series(&exp, BoundId::MainKappa, "kappa bound"));
            let stem = format!("fig1_{}", exp.label());
            let title = format!(
                "Near-optimality bounds: {} / {}",
                exp.matrix_label, exp.function_label
            );
            written.extend(write_pair(out_dir, &stem, &exp, &title, series)?);
        }
    }
    Ok(written)
}

fn fig2(out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for matrix in [MatrixSpec::A1, MatrixSpec::A2] {
        let cfg = base_config(matrix.clone(), FunctionSpec::InvSqrt, &[]);
        let exp = run_experiment(&cfg)?;
        let rows = live_rows(&exp);
        let series = vec![
            Series::new(
                "in-space component",
                rows.iter().map(|r| (r.m as f64, r.head_norm)).collect(),
            ),
            Series::new(
                "out-of-space component",
                rows.iter().map(|r| (r.m as f64, r.tail_norm)).collect(),
            ),
            Series::dashed(
                "component ratio",
                rows.iter()
                    .map(|r| (r.m as f64, r.component_ratio))
                    .collect(),
            ),
        ];
        let stem = format!("fig2_{}", exp.label());
        let title = format!("Error components: {} / inv_sqrt", exp.matrix_label);
        written.extend(write_pair(out_dir, &stem, &exp, &title, series)?);
    }
    Ok(written)
}

fn fig3(out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for matrix in [MatrixSpec::A1, MatrixSpec::A2] {
        for function in [FunctionSpec::InvSqrt, FunctionSpec::Sqrt] {
            let spectrum_bound = match function {
                FunctionSpec::InvSqrt => "spectrum_inv_sqrt",
                _ => "spectrum_sqrt",
            };
            let cfg = base_config(
                matrix.clone(),
                function.clone(),
                &["main_beta", "fov", spectrum_bound],
            );
            let exp = run_experiment(&cfg)?;
            let spectrum_id = BoundId::parse(spectrum_bound).expect("known id");
            let mut series = error_series(&exp);
            series.push(bound_series(&exp, BoundId::MainBeta, "residual bound"));
            series.push(bound_series(&exp, BoundId::Fov, "interval bound"));
            series.push(bound_series(&exp, spectrum_id, "spectrum bound"));
            let stem = format!("fig3_{}", exp.label());
            let title = format!(
                "Optimality-notion comparison: {} / {}",
                exp.matrix_label, exp.function_label
            );
            written.extend(write_pair(out_dir, &stem, &exp, &title, series)?);
        }
    }
    Ok(written)
}

fn fig4(out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for matrix in [MatrixSpec::A1, MatrixSpec::A2] {
        let mut cfg = base_config(
            matrix.clone(),
            FunctionSpec::InvSqrt,
            &["main_beta", "main_beta_eff"],
        );
        cfg.b = VectorSpec::GaussianSupported {
            seed: FIGURE_SEED,
            i_lo: 26,
            i_hi: 75,
        };
        let exp = run_experiment(&cfg)?;
        let mut series = error_series(&exp);
        series.push(bound_series(&exp, BoundId::MainBeta, "full-interval bound"));
        series.push(bound_series(
            &exp,
            BoundId::MainBetaEffective,
            "effective-interval bound",
        ));
        let stem = format!("fig4_{}", exp.label());
        let title = format!(
            "Effective-interval bound: {} / inv_sqrt, support 26..75",
            exp.matrix_label
        );
        written.extend(write_pair(out_dir, &stem, &exp, &title, series)?);
    }
    Ok(written)
}

/// Runs one recipe, writing CSV + SVG files under `out_dir`.
pub fn figure(recipe: &str, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    match recipe {
        "fig1" => fig1(out_dir),
        "fig2" => fig2(out_dir),
        "fig3" => fig3(out_dir),
        "fig4" => fig4(out_dir),
        other => Err(CliError::Config(format!(
            "unknown figure \"{other}\" (expected fig1, fig2, fig3, or fig4)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_recipe_is_a_config_error() {
        let err = figure("fig9", Path::new("/tmp")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    // Full recipes run in the integration suite; here only cheap pieces.
    #[test]
    fn fig2_ratio_band_on_a_reduced_instance() {
        let cfg = ExperimentConfig {
            m_max: 30,
            ..base_config(MatrixSpec::A1, FunctionSpec::InvSqrt, &[])
        };
        let exp = run_experiment(&cfg).unwrap();
        for r in live_rows(&exp) {
            assert!(
                (0.25..=4.0).contains(&r.component_ratio),
                "m = {}: ratio {}",
                r.m,
                r.component_ratio
            );
        }
    }
}
