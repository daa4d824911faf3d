//! Finite-sample coverage of confidence boxes centered at sparse estimators.
//!
//! The model is the Gaussian location family: y_1, .., y_n iid N(theta, 1),
//! so the sample mean `ybar` is N(theta, 1/n). The estimator of interest is
//! hard thresholding, `theta_hat = ybar * 1(|ybar| > eta_n)`, with a tuning
//! schedule eta_n = c * n^(-p). Everything downstream is exact arithmetic in
//! the normal CDF:
//!
//! * [`coverage`] — closed-form coverage of boxes `[theta_hat - a, theta_hat + b]`
//!   as a function of theta (piecewise in three threshold regimes, with two
//!   jump discontinuities), its infimum over theta, and the coverage of the
//!   naive z-interval that pretends no thresholding happened.
//! * [`honest`] — the symmetric half-length that restores a target infimal
//!   coverage, its large-n expansion, and the infeasible pointwise-oracle
//!   half-length.
//! * [`estimators`] — the thresholding estimator itself, tuning schedules,
//!   and a BIC-based post-model-selection least-squares estimator for the
//!   partially-sparse regression variant.
//! * [`simulate`] — a counter-based, worker-count-independent Monte Carlo
//!   engine plus the demo tables behind each headline claim.
//! * [`gaussian`] — the normal pdf/CDF/quantile everything above is built on.
//!
//! The `sparseci` binary (see [`cli`]) exposes each capability as a
//! subcommand emitting CSV/JSON plus a provenance sidecar; the `examples/`
//! directory holds one runnable walkthrough per capability.

pub mod cli;
pub mod coverage;
pub mod estimators;
pub mod gaussian;
pub mod honest;
pub mod report;
pub mod simulate;

pub use coverage::{coverage_at, infimal_coverage, naive_coverage_at, BoxInterval, CoverageCurve};
pub use estimators::{hard_threshold, ThresholdSchedule, TuningRegime};
pub use gaussian::{phi_cdf, phi_pdf, phi_quantile, Probability};
pub use honest::{solve_honest_halfwidth, HonestSolution};
pub use simulate::{mc_probability, LocationModel, McEstimate};

/// Crate-wide error type. Variants map onto the CLI exit-code contract:
/// domain/precondition problems exit 2, numerical failures exit 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition. The message names the
    /// precondition so CLI users see exactly what to fix.
    #[error("precondition violated: {0}")]
    Domain(String),

    /// A submodel normal-equation solve failed; `model_id` is the bitmask of
    /// the offending column subset.
    #[error("singular normal equations in submodel {model_id:#b}")]
    SingularModel { model_id: usize },

    /// An iterative routine failed to converge or produced a non-finite value.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
