//! Noise parameters of a single level pair.

use crate::error::{Error, Result};
use crate::kernel::MemoryKernel;

/// Full description of the telegraph noise felt by one level pair: the noise
/// jumps between ±ν with switching rate λ, starts from the biased two-point
/// distribution P(±ν) = (1 ± a)/2, and its conditional probability evolves
/// under the given memory kernel.
///
/// a = 0 is the stationary (equilibrium) initial distribution; a = ±1 pins
/// the initial noise value to ±ν.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtnPairParams {
    nu: f64,
    lambda: f64,
    a: f64,
    kernel: MemoryKernel,
}

impl RtnPairParams {
    pub fn new(nu: f64, lambda: f64, a: f64, kernel: MemoryKernel) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(Error::InvalidParameter {
                name: "nu",
                value: nu,
                constraint: "nu >= 0",
            });
        }
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
                constraint: "lambda > 0",
            });
        }
        if !(-1.0..=1.0).contains(&a) {
            return Err(Error::InvalidParameter {
                name: "a",
                value: a,
                constraint: "-1 <= a <= 1",
            });
        }
        Ok(Self {
            nu,
            lambda,
            a,
            kernel,
        })
    }

    /// Noise amplitude ν (rad/time).
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Switching rate λ (1/time).
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Nonequilibrium parameter a ∈ [−1, 1].
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn kernel(&self) -> &MemoryKernel {
        &self.kernel
    }

    /// Same parameters with the sign of a flipped. Flipping a conjugates
    /// the decoherence function, which is how the trajectory-average and
    /// Laplace-domain sign conventions are bridged.
    pub fn with_negated_a(&self) -> Self {
        Self {
            a: -self.a,
            ..*self
        }
    }
}
