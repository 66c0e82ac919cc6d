//! Exact time-domain decoherence function in the memoryless (Kubo) limit.
//!
//! For a pure delta kernel the decoherence function has a closed form with
//! three dynamical regimes, split by the sign of λ² − ν²:
//!
//! * overdamped (ν < λ):  e^{−λt} [cosh βt + (λ/β) sinh βt + i (aν/β) sinh βt]
//! * critical  (ν = λ):  e^{−λt} [(1 + λt) + i a λ t]
//! * underdamped (ν > λ): e^{−λt} [cos βt + (λ/β) sin βt + i (aν/β) sin βt]
//!
//! with β = sqrt(|λ² − ν²|). This is the highest-precision reference the
//! other backends are tested against.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::RtnPairParams;
use crate::series::{Backend, DecoherenceSeries};

/// Relative tolerance below which ν and λ are treated as degenerate.
const CRITICAL_REL_TOL: f64 = 1e-9;

/// Below this value of β·t the sinh/sin ratios are evaluated by series to
/// avoid 0/0 near the critical point.
const SERIES_CUTOFF: f64 = 1e-6;

/// Above this value of β·t the overdamped branch switches to explicit
/// exponentials so that cosh/sinh cannot overflow before the e^{−λt}
/// factor is applied.
const EXP_FORM_CUTOFF: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// ν > λ: oscillatory decay.
    Underdamped,
    /// ν = λ within tolerance.
    Critical,
    /// ν < λ: monotone decay.
    Overdamped,
}

/// Regime classification together with β = sqrt(|λ² − ν²|).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeBeta {
    pub beta: f64,
    pub regime: Regime,
}

pub fn classify_regime(params: &RtnPairParams) -> RegimeBeta {
    let (nu, lambda) = (params.nu(), params.lambda());
    if (lambda - nu).abs() <= CRITICAL_REL_TOL * lambda.max(nu) {
        RegimeBeta {
            beta: 0.0,
            regime: Regime::Critical,
        }
    } else {
        let beta = (lambda * lambda - nu * nu).abs().sqrt();
        let regime = if nu > lambda {
            Regime::Underdamped
        } else {
            Regime::Overdamped
        };
        RegimeBeta { beta, regime }
    }
}

/// Evaluate the closed-form decoherence function at a single time.
///
/// Requires a pure delta kernel (memoryless, or composite with w = 1);
/// other kernels have no closed form in the time domain and are served by
/// the rational or contour backends.
pub fn decoherence(params: &RtnPairParams, t: f64) -> Result<Complex64> {
    if !params.kernel().is_memoryless() {
        return Err(Error::BackendMismatch {
            backend: "closed",
            kernel: params.kernel().to_string(),
        });
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            constraint: "t >= 0",
        });
    }
    Ok(eval(params, t))
}

fn eval(params: &RtnPairParams, t: f64) -> Complex64 {
    let (nu, lambda, a) = (params.nu(), params.lambda(), params.a());
    let RegimeBeta { beta, regime } = classify_regime(params);
    let decay = (-lambda * t).exp();

    match regime {
        Regime::Critical => {
            let re = decay * (1.0 + lambda * t);
            let im = a * lambda * t * decay;
            Complex64::new(re, im)
        }
        Regime::Underdamped => {
            let bt = beta * t;
            // snc = sin(βt)/β, finite at β -> 0
            let (cs, snc) = if bt < SERIES_CUTOFF {
                (1.0 - bt * bt / 2.0, t * (1.0 - bt * bt / 6.0))
            } else {
                (bt.cos(), bt.sin() / beta)
            };
            Complex64::new(decay * (cs + lambda * snc), a * nu * snc * decay)
        }
        Regime::Overdamped => {
            let bt = beta * t;
            if bt < SERIES_CUTOFF {
                let ch = 1.0 + bt * bt / 2.0;
                let shc = t * (1.0 + bt * bt / 6.0);
                Complex64::new(decay * (ch + lambda * shc), a * nu * shc * decay)
            } else if bt <= EXP_FORM_CUTOFF {
                let ch = bt.cosh();
                let shc = bt.sinh() / beta;
                Complex64::new(decay * (ch + lambda * shc), a * nu * shc * decay)
            } else {
                // e^{−λt} cosh βt and e^{−λt} sinh βt recombined so neither
                // factor overflows; λ > β here, both exponents are negative.
                let em = (-(lambda - beta) * t).exp();
                let ep = (-(lambda + beta) * t).exp();
                let ch_d = 0.5 * (em + ep);
                let shc_d = 0.5 * (em - ep) / beta;
                Complex64::new(ch_d + lambda * shc_d, a * nu * shc_d)
            }
        }
    }
}

/// Closed-form series over a time grid.
pub fn series(params: &RtnPairParams, times: &[f64]) -> Result<DecoherenceSeries> {
    let values = times
        .iter()
        .map(|&t| decoherence(params, t))
        .collect::<Result<Vec<_>>>()?;
    DecoherenceSeries::new(times.to_vec(), values, Backend::ClosedForm)
}
