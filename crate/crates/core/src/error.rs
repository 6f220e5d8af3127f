use thiserror::Error;

pub type Result<T> = std::result::Result<T, VortexError>;

#[derive(Debug, Error)]
pub enum VortexError {
    #[error("grid half-width {half_width} is too small (need at least {min})")]
    GridTooSmall { half_width: usize, min: usize },

    #[error("omega = {omega} lies outside the existence domain [{lo}, {hi}] for beta = {beta}")]
    ExistenceDomain { beta: f64, omega: f64, lo: f64, hi: f64 },

    #[error("beta = 1 requires omega = 1 (got omega = {omega})")]
    DegenerateLine { omega: f64 },

    #[error("beta = 1 requires a polarization angle delta")]
    MissingDelta,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("field is nonzero on the Dirichlet boundary ring")]
    NonzeroBoundary,

    #[error("series correction is singular: {0}")]
    SingularSeries(String),

    #[error("continuation failed at eps = {target_eps} (last good eps = {last_good_eps}, residual = {residual:e})")]
    ContinuationFailure { last_good_eps: f64, target_eps: f64, residual: f64 },

    #[error("Newton iteration did not converge at eps = {eps} after {iters} iterations (residual {residual:e})")]
    NewtonDivergence { eps: f64, iters: usize, residual: f64 },

    #[error("Newton Jacobian is singular at eps = {eps} (pivot ratio {pivot_ratio:e})")]
    Singular { eps: f64, pivot_ratio: f64 },

    #[error("state is not converged (residual {residual:e} above tolerance {tol:e})")]
    StaleState { residual: f64, tol: f64 },

    #[error("eigensolver failed: {detail} (matrix dimension {dim}, infinity norm {norm:e})")]
    Eigen { detail: String, dim: usize, norm: f64 },

    #[error("beta = 1 is the Manakov case; use predict_manakov")]
    ManakovRegime,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("conserved quantities drifted (power {power:e}, energy {energy:e}); reduce the step size")]
    ConservationDrift { power: f64, energy: f64 },
}
