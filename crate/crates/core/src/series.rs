//! Sampled decoherence functions with backend provenance.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Which backend produced a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    ClosedForm,
    Rational,
    Contour,
    Volterra,
    MonteCarlo,
}

impl Backend {
    pub fn label(&self) -> &'static str {
        match self {
            Backend::ClosedForm => "closed",
            Backend::Rational => "rational",
            Backend::Contour => "contour",
            Backend::Volterra => "volterra",
            Backend::MonteCarlo => "mc",
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Standard error of the ensemble mean at one grid point, kept separately
/// for the real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StdErr {
    pub re: f64,
    pub im: f64,
}

/// The decoherence function F(t) sampled on an ascending time grid.
///
/// `stderr` is populated only by the Monte Carlo backend.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceSeries {
    times: Vec<f64>,
    values: Vec<Complex64>,
    backend: Backend,
    stderr: Option<Vec<StdErr>>,
}

impl DecoherenceSeries {
    pub fn new(times: Vec<f64>, values: Vec<Complex64>, backend: Backend) -> Result<Self> {
        Self::with_stderr(times, values, backend, None)
    }

    pub fn with_stderr(
        times: Vec<f64>,
        values: Vec<Complex64>,
        backend: Backend,
        stderr: Option<Vec<StdErr>>,
    ) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::NumericalFailure {
                context: "decoherence series",
                details: format!(
                    "length mismatch: {} times vs {} values",
                    times.len(),
                    values.len()
                ),
            });
        }
        if let Some(errs) = &stderr {
            if errs.len() != times.len() {
                return Err(Error::NumericalFailure {
                    context: "decoherence series",
                    details: "stderr length mismatch".into(),
                });
            }
        }
        if times.is_empty() || times[0] < 0.0 {
            return Err(Error::InvalidParameter {
                name: "times",
                value: times.first().copied().unwrap_or(f64::NAN),
                constraint: "non-empty grid with times[0] >= 0",
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter {
                name: "times",
                value: f64::NAN,
                constraint: "strictly increasing grid",
            });
        }
        Ok(Self {
            times,
            values,
            backend,
            stderr,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn stderr(&self) -> Option<&[StdErr]> {
        self.stderr.as_deref()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest pointwise |self − other| over a shared grid.
    pub fn max_abs_deviation(&self, other: &DecoherenceSeries) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Uniform grid of `n_points` times covering [0, t_max], endpoints included.
pub fn uniform_grid(t_max: f64, n_points: usize) -> Vec<f64> {
    assert!(n_points >= 2, "grid needs at least two points");
    assert!(t_max > 0.0, "t_max must be positive");
    (0..n_points)
        .map(|i| i as f64 * t_max / (n_points - 1) as f64)
        .collect()
}
