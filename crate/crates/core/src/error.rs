use num_complex::Complex64;
use thiserror::Error;

/// Errors surfaced by the solver backends and their shared domain types.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} violates constraint {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// The delta component of a kernel has no pointwise value in the time
    /// domain; callers must handle it through its weight instead.
    #[error("kernel has no pointwise time-domain value (pure delta component)")]
    NoPointwiseValue,

    #[error("Laplace evaluation at p = {p} hits a kernel pole at {pole}")]
    PoleEvaluation { p: Complex64, pole: Complex64 },

    #[error("backend `{backend}` does not support kernel {kernel}")]
    BackendMismatch { backend: &'static str, kernel: String },

    #[error("numerical failure in {context}: {details}")]
    NumericalFailure {
        context: &'static str,
        details: String,
    },

    #[error("time integration produced a non-finite value at step {step} (t = {t})")]
    Divergence { step: usize, t: f64 },

    #[error("initial off-diagonal element is zero; decoherence function undefined")]
    ZeroInitialCoherence,

    #[error(
        "no trajectory representation: waiting density requires kappa >= 4*lambda \
         (kappa = {kappa}, lambda = {lambda})"
    )]
    SemiMarkovUnavailable { kappa: f64, lambda: f64 },

    #[error("missing noise parameters for level pair ({n}, {m})")]
    MissingPairParams { n: usize, m: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("backend error on pair ({n}, {m}): {source}")]
    PairBackend {
        n: usize,
        m: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
