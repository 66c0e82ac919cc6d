//! Memory kernels of the environmental noise, in time and Laplace domain.
//!
//! The kernel K(t − τ) weights how strongly the past of the noise process
//! drives its present rate of change. Every backend in this crate consumes
//! kernels exclusively through this module, so the time-domain values and
//! the Laplace transforms K̃(p) defined here are the single source of truth.
//!
//! A kernel may contain a delta component (the memoryless part). That
//! component is carried symbolically as a weight, never as a narrow
//! numerical spike: consumers branch on [`MemoryKernel::delta_weight`] and
//! treat the remainder through [`MemoryKernel::smooth_at`].

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for detecting evaluation at a kernel pole.
const POLE_TOL: f64 = 1e-12;

/// The supported kernel family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// K(dt) = δ(dt), K̃(p) = 1. The Markovian (Kubo) limit.
    Memoryless,
    /// K(dt) = κ e^{−κ dt}, K̃(p) = κ/(p + κ).
    Exponential { kappa: f64 },
    /// K(dt) = w δ(dt) + (1 − w) κ e^{−κ dt}, K̃(p) = w + (1 − w) κ/(p + κ).
    ///
    /// The weight interpolates between the memoryless (w = 1) and purely
    /// exponential (w = 0) kernels.
    Composite { w: f64, kappa: f64 },
    /// K(dt) = κ e^{−κ dt} cos(Ω dt), K̃(p) = κ (p + κ)/((p + κ)² + Ω²).
    ///
    /// Ω is the external modulation frequency of the environment; Ω = 0
    /// recovers the exponential kernel.
    ModulatedCosine { kappa: f64, omega: f64 },
}

/// A validated memory kernel. Parameters are checked at construction, so a
/// value of this type is always usable downstream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryKernel {
    kind: KernelKind,
}

impl MemoryKernel {
    pub fn memoryless() -> Self {
        Self {
            kind: KernelKind::Memoryless,
        }
    }

    pub fn exponential(kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(Self {
            kind: KernelKind::Exponential { kappa },
        })
    }

    pub fn composite(w: f64, kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter {
                name: "w",
                value: w,
                constraint: "0 <= w <= 1",
            });
        }
        Ok(Self {
            kind: KernelKind::Composite { w, kappa },
        })
    }

    pub fn modulated_cosine(kappa: f64, omega: f64) -> Result<Self> {
        check_kappa(kappa)?;
        if !omega.is_finite() || omega < 0.0 {
            return Err(Error::InvalidParameter {
                name: "omega",
                value: omega,
                constraint: "omega >= 0",
            });
        }
        Ok(Self {
            kind: KernelKind::ModulatedCosine { kappa, omega },
        })
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    /// Weight of the delta component: 1 for memoryless, w for composite,
    /// 0 otherwise.
    pub fn delta_weight(&self) -> f64 {
        match self.kind {
            KernelKind::Memoryless => 1.0,
            KernelKind::Composite { w, .. } => w,
            _ => 0.0,
        }
    }

    /// True when the kernel is a pure delta (memoryless, possibly written
    /// as a composite kernel with w = 1).
    pub fn is_memoryless(&self) -> bool {
        self.delta_weight() == 1.0
    }

    /// The absolutely continuous part of K at lag `dt`. Zero for a pure
    /// delta kernel; never an error.
    pub fn smooth_at(&self, dt: f64) -> f64 {
        match self.kind {
            KernelKind::Memoryless => 0.0,
            KernelKind::Exponential { kappa } => kappa * (-kappa * dt).exp(),
            KernelKind::Composite { w, kappa } => (1.0 - w) * kappa * (-kappa * dt).exp(),
            KernelKind::ModulatedCosine { kappa, omega } => {
                kappa * (-kappa * dt).exp() * (omega * dt).cos()
            }
        }
    }

    /// Pointwise time-domain value of the smooth part of K at lag `dt`.
    ///
    /// Errors when the kernel is a pure delta, which has no pointwise
    /// value; such kernels must be handled through [`Self::delta_weight`].
    pub fn time_value(&self, dt: f64) -> Result<f64> {
        if dt < 0.0 || !dt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: dt,
                constraint: "dt >= 0",
            });
        }
        if self.is_memoryless() {
            return Err(Error::NoPointwiseValue);
        }
        Ok(self.smooth_at(dt))
    }

    /// Poles of K̃ in the complex p plane (only genuine poles: a composite
    /// kernel with w = 1 has none).
    pub fn poles(&self) -> Vec<Complex64> {
        match self.kind {
            KernelKind::Memoryless => vec![],
            KernelKind::Exponential { kappa } => vec![Complex64::new(-kappa, 0.0)],
            KernelKind::Composite { w, kappa } => {
                if w == 1.0 {
                    vec![]
                } else {
                    vec![Complex64::new(-kappa, 0.0)]
                }
            }
            KernelKind::ModulatedCosine { kappa, omega } => vec![
                Complex64::new(-kappa, omega),
                Complex64::new(-kappa, -omega),
            ],
        }
    }

    /// Laplace transform K̃(p).
    pub fn laplace(&self, p: Complex64) -> Result<Complex64> {
        for pole in self.poles() {
            if (p - pole).norm() < POLE_TOL * (1.0 + pole.norm()) {
                return Err(Error::PoleEvaluation { p, pole });
            }
        }
        Ok(match self.kind {
            KernelKind::Memoryless => Complex64::new(1.0, 0.0),
            KernelKind::Exponential { kappa } => kappa / (p + kappa),
            KernelKind::Composite { w, kappa } => {
                if w == 1.0 {
                    // the exponential term has zero weight; evaluating it
                    // at p = -kappa would produce 0 * inf
                    Complex64::new(1.0, 0.0)
                } else {
                    w + (1.0 - w) * kappa / (p + kappa)
                }
            }
            KernelKind::ModulatedCosine { kappa, omega } => {
                let shifted = p + kappa;
                kappa * shifted / (shifted * shifted + omega * omega)
            }
        })
    }
}

impl std::fmt::Display for MemoryKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            KernelKind::Memoryless => write!(f, "memoryless"),
            KernelKind::Exponential { kappa } => write!(f, "exponential(kappa={kappa})"),
            KernelKind::Composite { w, kappa } => write!(f, "composite(w={w}, kappa={kappa})"),
            KernelKind::ModulatedCosine { kappa, omega } => {
                write!(f, "modulated(kappa={kappa}, omega={omega})")
            }
        }
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !kappa.is_finite() || kappa <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "kappa",
            value: kappa,
            constraint: "kappa > 0",
        });
    }
    Ok(())
}
