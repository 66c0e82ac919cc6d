//! Direct time-domain integration of the coupled Volterra equations for
//! the partial averages ρ(±ν, t).
//!
//! The pair of integro-differential equations is integrated in a rotating
//! frame that removes both the frequency drift and the e^{−iω(t−t′)}
//! dressing of the memory kernel:
//!
//! ```text
//! dσ±/dt = ±iν σ± + λ ∫₀ᵗ K(t−t′) [σ∓(t′) − σ±(t′)] dt′
//! ```
//!
//! with σ±(0) = (1 ± a)/2 per unit initial coherence. The sign of the
//! coherent term is fixed by requiring agreement with the Laplace-domain
//! solution used by the rational and contour backends (numerator
//! p + 2λK̃ + iaν); the opposite choice solves the conjugate problem,
//! which is the trajectory-average convention of the Monte Carlo backend.
//!
//! The decoherence function is frequency-free, so the solver is too; the
//! phase e^{−iωt} is restored exactly afterwards. The delta component of
//! the kernel enters the derivative locally with its full weight — running
//! it through the quadrature endpoint would halve it.
//!
//! Discretization: trapezoidal weights on the convolution history (kernel
//! values exact on the grid) plus a one-pass trapezoidal predictor-corrector
//! for the derivative. Second order; history is stored densely, so a solve
//! is O(N²) in the step count.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::RtnPairParams;
use crate::series::{Backend, DecoherenceSeries};

/// Uniform-grid configuration of the Volterra solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolterraConfig {
    step: f64,
    t_max: f64,
}

impl VolterraConfig {
    pub fn new(step: f64, t_max: f64) -> Result<Self> {
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "step",
                value: step,
                constraint: "step > 0",
            });
        }
        if !t_max.is_finite() || t_max < step {
            return Err(Error::InvalidParameter {
                name: "t_max",
                value: t_max,
                constraint: "t_max >= step",
            });
        }
        Ok(Self { step, t_max })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// λ·h <= 0.1 is the recommended resolution; above it the caller
    /// should warn.
    pub fn resolves(&self, lambda: f64) -> bool {
        self.step * lambda <= 0.1
    }

    fn n_steps(&self) -> usize {
        let ratio = self.t_max / self.step;
        if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) {
            ratio.round() as usize
        } else {
            ratio.ceil() as usize
        }
    }
}

/// The two partial averages and their sum on the solver grid.
///
/// `total` is stored as the elementwise sum of `rho_plus` and `rho_minus`,
/// so the representation identity total = ρ(+ν,·) + ρ(−ν,·) holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialAverages {
    pub times: Vec<f64>,
    pub rho_plus: Vec<Complex64>,
    pub rho_minus: Vec<Complex64>,
    pub total: Vec<Complex64>,
}

/// Integrate the generalized stochastic Liouville equation for one level
/// pair with intrinsic frequency difference `omega` and initial element
/// `rho0`.
pub fn solve_gsle_rtn(
    params: &RtnPairParams,
    omega: f64,
    rho0: Complex64,
    cfg: &VolterraConfig,
) -> Result<PartialAverages> {
    let h = cfg.step;
    let n = cfg.n_steps();
    let nu = params.nu();
    let lambda = params.lambda();
    let w = params.kernel().delta_weight();

    // kernel smooth part on the lag grid, evaluated once
    let ks: Vec<f64> = (0..=n).map(|j| params.kernel().smooth_at(j as f64 * h)).collect();

    // rotating-frame state with unit initial coherence; scaling by rho0
    // afterwards keeps linearity in rho0 exact
    let mut sp: Vec<Complex64> = Vec::with_capacity(n + 1);
    let mut sm: Vec<Complex64> = Vec::with_capacity(n + 1);
    sp.push(Complex64::new(0.5 * (1.0 + params.a()), 0.0));
    sm.push(Complex64::new(0.5 * (1.0 - params.a()), 0.0));

    let i_nu = Complex64::new(0.0, nu);
    // coupling C = λ (w d + conv); dσ+/dt = +iν σ+ + C, dσ−/dt = −iν σ− − C
    let rhs = |p: Complex64, m: Complex64, conv: Complex64| {
        let d = m - p;
        let coupling = lambda * (w * d + conv);
        (i_nu * p + coupling, -i_nu * m - coupling)
    };

    // derivative at the initial point: empty convolution
    let mut f_prev = rhs(sp[0], sm[0], Complex64::new(0.0, 0.0));

    for i in 0..n {
        // trapezoidal history part of ∫ K(t_{i+1}−s) d(s) ds, excluding the
        // endpoint s = t_{i+1} whose state is still unknown
        let mut hist = 0.5 * ks[i + 1] * (sm[0] - sp[0]);
        for j in 1..=i {
            hist += ks[i + 1 - j] * (sm[j] - sp[j]);
        }
        let hist = hist * h;
        let endpoint_w = 0.5 * h * ks[0];

        // predict (Euler), evaluate, correct, re-evaluate
        let p_star = sp[i] + h * f_prev.0;
        let m_star = sm[i] + h * f_prev.1;
        let f_star = rhs(p_star, m_star, hist + endpoint_w * (m_star - p_star));

        let p_next = sp[i] + 0.5 * h * (f_prev.0 + f_star.0);
        let m_next = sm[i] + 0.5 * h * (f_prev.1 + f_star.1);
        if !p_next.is_finite() || !m_next.is_finite() {
            return Err(Error::Divergence {
                step: i + 1,
                t: (i + 1) as f64 * h,
            });
        }
        f_prev = rhs(p_next, m_next, hist + endpoint_w * (m_next - p_next));
        sp.push(p_next);
        sm.push(m_next);
    }

    let times: Vec<f64> = (0..=n).map(|j| j as f64 * h).collect();
    // rho0 multiplies last so that scaling rho0 scales the output exactly
    let rho_plus: Vec<Complex64> = times
        .iter()
        .zip(&sp)
        .map(|(&t, &s)| rho0 * (Complex64::new(0.0, -omega * t).exp() * s))
        .collect();
    let rho_minus: Vec<Complex64> = times
        .iter()
        .zip(&sm)
        .map(|(&t, &s)| rho0 * (Complex64::new(0.0, -omega * t).exp() * s))
        .collect();
    let total = rho_plus
        .iter()
        .zip(&rho_minus)
        .map(|(a, b)| a + b)
        .collect();

    Ok(PartialAverages {
        times,
        rho_plus,
        rho_minus,
        total,
    })
}

/// Recover the decoherence function F(t) = e^{iωt} ρ_nm(t)/ρ_nm(0) from a
/// solved pair of partial averages.
pub fn decoherence_from_volterra(
    pa: &PartialAverages,
    omega: f64,
    rho0: Complex64,
) -> Result<DecoherenceSeries> {
    if rho0.norm() == 0.0 {
        return Err(Error::ZeroInitialCoherence);
    }
    let values: Vec<Complex64> = pa
        .times
        .iter()
        .zip(&pa.total)
        .map(|(&t, &v)| Complex64::new(0.0, omega * t).exp() * v / rho0)
        .collect();
    DecoherenceSeries::new(pa.times.clone(), values, Backend::Volterra)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form;
    use crate::kernel::MemoryKernel;
    use crate::laplace;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pair(nu: f64, lambda: f64, a: f64, kernel: MemoryKernel) -> RtnPairParams {
        RtnPairParams::new(nu, lambda, a, kernel).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(VolterraConfig::new(0.0, 1.0).is_err());
        assert!(VolterraConfig::new(0.1, 0.05).is_err());
        let cfg = VolterraConfig::new(1e-3, 1.0).unwrap();
        assert!(cfg.resolves(1.0));
        assert!(!cfg.resolves(200.0));
        assert_eq!(cfg.n_steps(), 1000);
    }

    #[test]
    fn initial_conditions() {
        let p = pair(1.0, 1.0, 0.5, MemoryKernel::memoryless());
        let cfg = VolterraConfig::new(0.01, 0.1).unwrap();
        let rho0 = c(0.3, -0.2);
        let pa = solve_gsle_rtn(&p, 2.0, rho0, &cfg).unwrap();
        assert_eq!(pa.total[0], rho0);
        assert_eq!(pa.rho_plus[0], rho0 * 0.75);
        assert_eq!(pa.rho_minus[0], rho0 * 0.25);
    }

    #[test]
    fn memoryless_matches_closed_form() {
        let p = pair(1.0, 1.0, 0.0, MemoryKernel::memoryless());
        let cfg = VolterraConfig::new(1e-3, 1.0).unwrap();
        let pa = solve_gsle_rtn(&p, 0.0, c(1.0, 0.0), &cfg).unwrap();
        let expected = 2.0 * (-1.0f64).exp();
        let got = pa.total.last().unwrap();
        assert!((got.re - expected).abs() < 1e-4, "{got} vs {expected}");
        assert!(got.im.abs() < 1e-12);
    }

    #[test]
    fn composite_kernel_matches_rational_inversion() {
        let p = pair(2.0, 1.0, 0.5, MemoryKernel::composite(0.5, 1.0).unwrap());
        let cfg = VolterraConfig::new(2e-3, 5.0).unwrap();
        let pa = solve_gsle_rtn(&p, 0.0, c(1.0, 0.0), &cfg).unwrap();
        let f = decoherence_from_volterra(&pa, 0.0, c(1.0, 0.0)).unwrap();
        let reference = laplace::rational_decoherence(&p, f.times()).unwrap();
        let dev = f.max_abs_deviation(&reference);
        assert!(dev < 1e-3, "max dev {dev}");
    }

    #[test]
    fn second_order_convergence_on_memoryless_case() {
        let p = pair(1.0, 1.0, 0.0, MemoryKernel::memoryless());
        let max_err = |h: f64| {
            let cfg = VolterraConfig::new(h, 2.0).unwrap();
            let pa = solve_gsle_rtn(&p, 0.0, c(1.0, 0.0), &cfg).unwrap();
            pa.times
                .iter()
                .zip(&pa.total)
                .map(|(&t, &v)| (v - closed_form::decoherence(&p, t).unwrap()).norm())
                .fold(0.0, f64::max)
        };
        let ratio = max_err(4e-3) / max_err(2e-3);
        assert!((3.0..=5.0).contains(&ratio), "halving ratio {ratio}");
    }

    #[test]
    fn decoherence_is_frequency_free() {
        let p = pair(1.0, 1.0, 0.0, MemoryKernel::memoryless());
        let cfg = VolterraConfig::new(1e-2, 2.0).unwrap();
        let rho0 = c(0.5, 0.0);
        let f0 = decoherence_from_volterra(&solve_gsle_rtn(&p, 0.0, rho0, &cfg).unwrap(), 0.0, rho0)
            .unwrap();
        let f5 = decoherence_from_volterra(&solve_gsle_rtn(&p, 5.0, rho0, &cfg).unwrap(), 5.0, rho0)
            .unwrap();
        assert!(f0.max_abs_deviation(&f5) <= 1e-12);
    }

    #[test]
    fn linearity_in_rho0_is_exact() {
        let p = pair(1.5, 0.8, 0.3, MemoryKernel::exponential(1.0).unwrap());
        let cfg = VolterraConfig::new(5e-3, 1.0).unwrap();
        let scale = c(2.0, -3.0);
        let unit = solve_gsle_rtn(&p, 0.0, c(1.0, 0.0), &cfg).unwrap();
        let scaled = solve_gsle_rtn(&p, 0.0, scale, &cfg).unwrap();
        // the integration never sees rho0, so each partial average scales
        // bit-exactly; their sum picks up at most an ulp of re-rounding
        for i in 0..unit.times.len() {
            assert_eq!(unit.rho_plus[i] * scale, scaled.rho_plus[i]);
            assert_eq!(unit.rho_minus[i] * scale, scaled.rho_minus[i]);
            let dev = (unit.total[i] * scale - scaled.total[i]).norm();
            assert!(dev <= 1e-15 * scaled.total[i].norm().max(1.0), "dev {dev}");
        }
    }

    #[test]
    fn total_is_sum_by_construction() {
        let p = pair(1.0, 1.0, 0.4, MemoryKernel::composite(0.3, 2.0).unwrap());
        let cfg = VolterraConfig::new(1e-2, 1.0).unwrap();
        let pa = solve_gsle_rtn(&p, 1.0, c(1.0, 1.0), &cfg).unwrap();
        for i in 0..pa.times.len() {
            assert_eq!(pa.total[i], pa.rho_plus[i] + pa.rho_minus[i]);
        }
    }

    #[test]
    fn zero_rho0_has_no_decoherence_function() {
        let p = pair(1.0, 1.0, 0.0, MemoryKernel::memoryless());
        let cfg = VolterraConfig::new(1e-2, 0.5).unwrap();
        let pa = solve_gsle_rtn(&p, 0.0, c(0.0, 0.0), &cfg).unwrap();
        assert!(matches!(
            decoherence_from_volterra(&pa, 0.0, c(0.0, 0.0)),
            Err(Error::ZeroInitialCoherence)
        ));
    }

    #[test]
    fn wild_step_reports_divergence() {
        let p = pair(10.0, 1.0, 0.0, MemoryKernel::memoryless());
        let cfg = VolterraConfig::new(10.0, 2000.0).unwrap();
        assert!(matches!(
            solve_gsle_rtn(&p, 0.0, c(1.0, 0.0), &cfg),
            Err(Error::Divergence { .. })
        ));
    }
}
