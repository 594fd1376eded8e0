use thiserror::Error;

/// Errors produced by the numerical kernels, solvers and simulators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty grid: at least {needed} samples required, got {got}")]
    EmptyGrid { needed: usize, got: usize },

    #[error("divergence: non-finite state at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("bracket error: f({lo}) = {f_lo} and f({hi}) = {f_hi} have the same sign")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("frequency {omega} rad/s is out of tabulated range [{lo}, {hi}]")]
    OutOfTabulatedRange { omega: f64, lo: f64, hi: f64 },

    #[error(
        "undersampled configuration: oversampling r = {r} but 2*B*Tc = {required:.6} \
         requires r >= {min_r}"
    )]
    Undersampled { r: usize, required: f64, min_r: usize },

    #[error("corollary hypotheses violated: {0}")]
    HypothesisViolated(String),

    #[error("fixed point did not converge{context}: residual {residual:e} after {iterations} iterations")]
    NonConvergence {
        context: String,
        iterations: usize,
        residual: f64,
    },

    #[error("zero power: multiuser efficiency undefined for a user with zero received power")]
    ZeroPower,

    #[error("zero bandwidth: spectral efficiency undefined for B = 0")]
    ZeroBandwidth,

    #[error("unreachable Eb/N0 {target_db:.4} dB: {reason}")]
    UnreachableEbN0 { target_db: f64, reason: String },

    #[error("pulse too long for N = {n}: truncation discards {discarded:.3e} of the pulse energy")]
    PulseTooLong { n: usize, discarded: f64 },

    #[error("tabulated waveform: {0}")]
    Table(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that stem from a numerical method failing to settle,
    /// as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::Divergence { .. } | Error::NotPositiveDefinite { .. }
        )
    }
}
