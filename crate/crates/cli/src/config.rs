//! Experiment configuration: a single JSON document, optionally overridden
//! by CLI flags. Identical parsed configurations produce bitwise-identical
//! outputs, so the canonical serialized form of the config is echoed into
//! every CSV header.

use crate::error::{CliError, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Which operator to build. The four named matrices are 100×100 diagonal
/// test problems; `diag`/`custom` admit arbitrary positive spectra.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixSpec {
    /// diag(1, 2, …, 100); condition number exactly 100.
    A1,
    /// diag(η_i), η_i = 1 + 99·(1 − ρ^{(i−1)/99})/(1 − ρ) with ρ = 10⁻³:
    /// eigenvalues crowd toward the upper end; condition number exactly 100.
    A2,
    /// 100 equispaced eigenvalues from 1.1 to 110.
    A3,
    /// 100 geometrically spaced eigenvalues from 1.1 to 110.
    A4,
    /// Eigenvalues listed one per line in a text file.
    Diag { file: PathBuf },
    /// Eigenvalues given inline.
    Custom { eigenvalues: Vec<f64> },
    /// n eigenvalues equispaced on [lo, hi].
    Equispaced { n: usize, lo: f64, hi: f64 },
    /// n eigenvalues geometrically spaced on [lo, hi].
    Geometric { n: usize, lo: f64, hi: f64 },
}

/// Which function of the operator to approximate.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// z^{−α}, 0 < α < 1 (α = 1 is accepted and dispatches to `reciprocal`).
    InvPower { alpha: f64 },
    /// z^{−1/2}.
    InvSqrt,
    /// √z.
    Sqrt,
    /// log(1+z)/z.
    Log1pOverZ,
    /// log on a shifted operator: the run uses B = A − I with
    /// f(z) = log(1+z), so the target is log(A)·b and the reported interval
    /// and condition number are those of B.
    LogShifted,
    /// 1/z (the conjugate-gradient special case).
    Reciprocal,
    /// Σ wᵢ/(z+tᵢ) with one `weight pole-offset` pair per line in a file.
    PartialFraction { file: PathBuf },
}

/// How to build the unit starting vector.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorSpec {
    /// Standard normal entries from the pinned PRNG, normalized.
    Gaussian { seed: u64 },
    /// Normal entries on the 1-based inclusive index range [i_lo, i_hi],
    /// exact zeros outside, normalized.
    GaussianSupported { seed: u64, i_lo: usize, i_hi: usize },
    /// Entries listed one per line; normalized after loading.
    File { file: PathBuf },
    /// Equal mass on the given 1-based coordinate indices, normalized. For
    /// the diagonal test matrices coordinates are eigenvectors, so this
    /// builds exact low-dimensional invariant starting vectors.
    Eigenvectors { indices: Vec<usize> },
}

impl VectorSpec {
    /// The seed recorded in output headers, for the seeded vector kinds.
    pub fn seed(&self) -> Option<u64> {
        match self {
            VectorSpec::Gaussian { seed } | VectorSpec::GaussianSupported { seed, .. } => {
                Some(*seed)
            }
            _ => None,
        }
    }
}

fn default_m_max() -> usize {
    100
}
fn default_bounds() -> Vec<String> {
    vec![
        "main_beta".into(),
        "main_kappa".into(),
        "kernel_ratio".into(),
        "kernel_delta".into(),
    ]
}
fn default_quad_rel_tol() -> f64 {
    1e-12
}
fn default_remez_grid() -> usize {
    1024
}
fn default_rational_terms() -> usize {
    10
}
fn default_drop_tol() -> f64 {
    1e-12
}

/// One experiment: operator, function, starting vector, iteration range, and
/// the list of bound columns to evaluate.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub matrix: MatrixSpec,
    pub function: FunctionSpec,
    pub b: VectorSpec,
    /// Record steps m = 1 … min(m_max, invariance index).
    #[serde(default = "default_m_max")]
    pub m_max: usize,
    /// Bound column identifiers; see `BoundId::parse` for the vocabulary.
    #[serde(default = "default_bounds")]
    pub bounds: Vec<String>,
    /// Relative tolerance handed to the adaptive measure quadrature.
    #[serde(default = "default_quad_rel_tol")]
    pub quad_rel_tol: f64,
    /// Absolute Lanczos breakdown tolerance; `null` means 10⁻¹²·λ_max.
    #[serde(default)]
    pub breakdown_tol: Option<f64>,
    /// Chebyshev grid size for interval minimax problems (grown
    /// automatically when the degree demands more).
    #[serde(default = "default_remez_grid")]
    pub remez_grid: usize,
    /// Number of quadrature terms ℓ for the rational-approximation bound.
    #[serde(default = "default_rational_terms")]
    pub rational_terms: usize,
    /// Eigenvector-coefficient threshold for the effective spectral
    /// interval.
    #[serde(default = "default_drop_tol")]
    pub drop_tol: f64,
    /// Output CSV path; `null` writes `<label>.csv` under the --out
    /// directory (default current directory).
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Canonical one-line form echoed into output headers; identical configs
    /// echo identical bytes.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_max == 0 {
            return Err(CliError::Config("m_max must be positive".into()));
        }
        if !(self.quad_rel_tol.is_finite() && self.quad_rel_tol > 0.0) {
            return Err(CliError::Config(format!(
                "quad_rel_tol must be a positive number, got {}",
                self.quad_rel_tol
            )));
        }
        if let Some(tol) = self.breakdown_tol {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(CliError::Config(format!(
                    "breakdown_tol must be finite and nonnegative, got {tol}"
                )));
            }
        }
        if self.rational_terms == 0 {
            return Err(CliError::Config("rational_terms must be positive".into()));
        }
        if !(self.drop_tol.is_finite() && self.drop_tol >= 0.0) {
            return Err(CliError::Config(format!(
                "drop_tol must be finite and nonnegative, got {}",
                self.drop_tol
            )));
        }
        for name in &self.bounds {
            let id = slan_core::bounds::BoundId::parse(name).ok_or_else(|| {
                CliError::Config(format!("unknown bound identifier \"{name}\""))
            })?;
            self.check_bound_applicability(id, name)?;
        }
        Ok(())
    }

    /// Bounds tied to a specific function shape are rejected up front when
    /// the configured function cannot satisfy them.
    fn check_bound_applicability(
        &self,
        id: slan_core::bounds::BoundId,
        name: &str,
    ) -> Result<()> {
        use slan_core::bounds::BoundId;
        let ok = match id {
            BoundId::SpectrumInvSqrt => matches!(self.function, FunctionSpec::InvSqrt)
                || matches!(self.function, FunctionSpec::InvPower { alpha } if alpha == 0.5),
            BoundId::SpectrumSqrt => matches!(self.function, FunctionSpec::Sqrt),
            BoundId::Cg => matches!(self.function, FunctionSpec::Reciprocal)
                || matches!(self.function, FunctionSpec::InvPower { alpha } if alpha == 1.0),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(CliError::Config(format!(
                "bound \"{name}\" does not apply to function {:?}",
                self.function
            )))
        }
    }

    /// Parsed bound identifiers in config order.
    pub fn bound_ids(&self) -> Vec<slan_core::bounds::BoundId> {
        self.bounds
            .iter()
            .map(|s| slan_core::bounds::BoundId::parse(s).expect("validated"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> &'static str {
        r#"{
            "matrix": {"kind": "a1"},
            "function": {"kind": "inv_sqrt"},
            "b": {"kind": "gaussian", "seed": 42}
        }"#
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::from_json(minimal()).unwrap();
        assert_eq!(cfg.m_max, 100);
        assert_eq!(cfg.quad_rel_tol, 1e-12);
        assert_eq!(cfg.bounds.len(), 4);
        assert_eq!(cfg.b.seed(), Some(42));
        assert_eq!(cfg.breakdown_tol, None);
    }

    #[test]
    fn canonical_round_trips() {
        let cfg = ExperimentConfig::from_json(minimal()).unwrap();
        let echo = cfg.canonical();
        let again = ExperimentConfig::from_json(&echo).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(echo, again.canonical());
    }

    #[test]
    fn unknown_fields_and_bounds_are_rejected() {
        let bad = r#"{
            "matrix": {"kind": "a1"},
            "function": {"kind": "inv_sqrt"},
            "b": {"kind": "gaussian", "seed": 1},
            "tpyo": true
        }"#;
        assert!(ExperimentConfig::from_json(bad).is_err());

        let bad_bound = r#"{
            "matrix": {"kind": "a1"},
            "function": {"kind": "inv_sqrt"},
            "b": {"kind": "gaussian", "seed": 1},
            "bounds": ["main_beta", "no_such_bound"]
        }"#;
        let err = ExperimentConfig::from_json(bad_bound).unwrap_err();
        assert!(err.to_string().contains("no_such_bound"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn function_specific_bounds_must_match_the_function() {
        let mismatched = r#"{
            "matrix": {"kind": "a1"},
            "function": {"kind": "sqrt"},
            "b": {"kind": "gaussian", "seed": 1},
            "bounds": ["spectrum_inv_sqrt"]
        }"#;
        assert!(ExperimentConfig::from_json(mismatched).is_err());

        let matched = r#"{
            "matrix": {"kind": "a1"},
            "function": {"kind": "sqrt"},
            "b": {"kind": "gaussian", "seed": 1},
            "bounds": ["spectrum_sqrt", "fov"]
        }"#;
        assert!(ExperimentConfig::from_json(matched).is_ok());

        let cg_on_inv_power_one = r#"{
            "matrix": {"kind": "a1"},
            "function": {"kind": "inv_power", "alpha": 1.0},
            "b": {"kind": "gaussian", "seed": 1},
            "bounds": ["cg"]
        }"#;
        assert!(ExperimentConfig::from_json(cg_on_inv_power_one).is_ok());
    }

    #[test]
    fn matrix_and_vector_variants_parse() {
        let cfg = ExperimentConfig::from_json(
            r#"{
                "matrix": {"kind": "geometric", "n": 30, "lo": 1.0, "hi": 1000.0},
                "function": {"kind": "inv_power", "alpha": 0.25},
                "b": {"kind": "gaussian_supported", "seed": 7, "i_lo": 3, "i_hi": 10}
            }"#,
        )
        .unwrap();
        assert_eq!(
            cfg.matrix,
            MatrixSpec::Geometric { n: 30, lo: 1.0, hi: 1000.0 }
        );
        let cfg = ExperimentConfig::from_json(
            r#"{
                "matrix": {"kind": "custom", "eigenvalues": [1.0, 2.0, 3.0]},
                "function": {"kind": "log_shifted"},
                "b": {"kind": "eigenvectors", "indices": [1, 3]}
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.b.seed(), None);
    }
}
