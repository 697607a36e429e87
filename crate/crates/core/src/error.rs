use thiserror::Error;

/// Errors surfaced by the numerical kernels in this crate.
///
/// Every failure carries enough context to identify the offending quantity
/// (row index, eigenvalue, achieved tolerance, ...) so that callers can report
/// actionable diagnostics instead of a bare "it diverged".
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The implicit-shift QL sweep failed to isolate an eigenvalue. With
    /// well-scaled symmetric tridiagonal input this indicates NaN/Inf entries
    /// rather than a hard problem instance.
    #[error("eigensolver failed to isolate eigenvalue {index} after {sweeps} implicit-shift sweeps")]
    EigenNonConvergence { index: usize, sweeps: usize },

    /// An LDL^T pivot of the shifted tridiagonal matrix was zero or negative;
    /// the matrix is not positive definite at this shift.
    #[error("shifted tridiagonal solve hit a non-positive pivot {pivot:e} at row {row}")]
    SingularPivot { row: usize, pivot: f64 },

    /// A scalar function produced a non-finite value where the spectral
    /// transform needed it.
    #[error("function value is not finite at eigenvalue {eigenvalue}")]
    NonFiniteFunctionValue { eigenvalue: f64 },

    /// Adaptive quadrature ran out of budget before reaching the requested
    /// relative tolerance. `estimate` is the best value obtained so far.
    #[error(
        "quadrature reached relative error {achieved:e} after {evaluations} evaluations \
         (requested {requested:e}); best estimate {estimate:e}"
    )]
    QuadratureTolerance {
        requested: f64,
        achieved: f64,
        evaluations: usize,
        estimate: f64,
    },

    /// Quadrature-based evaluation was asked of a purely discrete measure.
    #[error("measure is discrete; quadrature-based evaluation needs a continuous density")]
    DiscreteMeasure,

    /// The Krylov space became invariant: the next residual norm fell at or
    /// below the breakdown threshold, so quantities that divide by it (or the
    /// trailing block they describe) are undefined.
    #[error("lucky breakdown: residual norm {beta:e} is at or below the breakdown threshold")]
    LuckyBreakdown { beta: f64 },

    /// The exchange iteration for a best polynomial approximation stalled.
    #[error("exchange failed to converge after {iterations} iterations (best level {best_level:e})")]
    ExchangeNonConvergence { iterations: usize, best_level: f64 },

    /// The levelled interpolation system was singular, typically because
    /// reference points coincided.
    #[error("levelled system is singular; reference points may coincide")]
    DegenerateReference,

    /// A mathematical invariant that the computation relies on was violated;
    /// `detail` names the quantity and the location of the violation.
    #[error("{check} violated: {detail}")]
    InvariantViolation { check: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
