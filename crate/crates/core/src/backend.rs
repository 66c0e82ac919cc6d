//! Uniform dispatch over the solver backends: time grid in, complex
//! decoherence series out.

use crate::closed_form;
use crate::contour;
use crate::error::{Error, Result};
use crate::laplace;
use crate::mc::{self, McConfig};
use crate::params::RtnPairParams;
use crate::series::DecoherenceSeries;
use crate::volterra::{self, VolterraConfig};

/// Default quadrature size of the contour backend.
pub const DEFAULT_CONTOUR_NODES: usize = 64;

/// Backend selection plus the knobs each backend needs.
#[derive(Debug, Clone, PartialEq)]
pub enum BackendSpec {
    /// Exact closed form; memoryless kernels only.
    ClosedForm,
    /// Root/residue inversion of the rational Laplace transform.
    Rational,
    /// Deformed-contour numerical inversion.
    Contour { nodes: usize },
    /// Volterra time stepping with the given uniform step.
    Volterra { step: f64 },
    /// Trajectory sampling; see [`crate::mc`] for kernel support.
    MonteCarlo { n_traj: usize, seed: u64 },
}

impl BackendSpec {
    pub fn label(&self) -> &'static str {
        match self {
            BackendSpec::ClosedForm => "closed",
            BackendSpec::Rational => "rational",
            BackendSpec::Contour { .. } => "contour",
            BackendSpec::Volterra { .. } => "volterra",
            BackendSpec::MonteCarlo { .. } => "mc",
        }
    }

    /// Whether this backend can serve the given parameters, mirroring the
    /// checks the run itself would make.
    pub fn supports(&self, params: &RtnPairParams) -> bool {
        match self {
            BackendSpec::ClosedForm => params.kernel().is_memoryless(),
            BackendSpec::Rational | BackendSpec::Contour { .. } | BackendSpec::Volterra { .. } => {
                true
            }
            BackendSpec::MonteCarlo { .. } => {
                mc_supported(params)
            }
        }
    }
}

fn mc_supported(params: &RtnPairParams) -> bool {
    use crate::kernel::KernelKind;
    if params.kernel().is_memoryless() {
        return true;
    }
    let kappa = match *params.kernel().kind() {
        KernelKind::Exponential { kappa } => kappa,
        KernelKind::Composite { w: 0.0, kappa } => kappa,
        _ => return false,
    };
    kappa >= 4.0 * params.lambda()
}

/// Compute F(t) on `times` with the selected backend.
pub fn decoherence_series(
    params: &RtnPairParams,
    times: &[f64],
    spec: &BackendSpec,
) -> Result<DecoherenceSeries> {
    match spec {
        BackendSpec::ClosedForm => closed_form::series(params, times),
        BackendSpec::Rational => laplace::rational_decoherence(params, times),
        BackendSpec::Contour { nodes } => contour::decoherence(params, times, *nodes),
        BackendSpec::Volterra { step } => {
            let t_end = *times.last().ok_or(Error::InvalidParameter {
                name: "times",
                value: f64::NAN,
                constraint: "non-empty grid",
            })?;
            let one = num_complex::Complex64::new(1.0, 0.0);
            let cfg = VolterraConfig::new(*step, t_end)?;
            let pa = volterra::solve_gsle_rtn(params, 0.0, one, &cfg)?;
            let solved = volterra::decoherence_from_volterra(&pa, 0.0, one)?;
            resample(&solved, times)
        }
        BackendSpec::MonteCarlo { n_traj, seed } => {
            let cfg = McConfig::new(*n_traj, *seed, times.to_vec())?;
            mc::mc_decoherence(params, &cfg)
        }
    }
}

/// Linear interpolation of a solver-grid series onto a requested grid.
/// Grid-aligned points are taken exactly; the interpolation error between
/// solver steps is far below the solver's own discretization error.
fn resample(series: &DecoherenceSeries, times: &[f64]) -> Result<DecoherenceSeries> {
    let src_t = series.times();
    let src_v = series.values();
    let h = src_t[1] - src_t[0];
    let values = times
        .iter()
        .map(|&t| {
            let x = t / h;
            let j = (x.floor() as usize).min(src_t.len() - 1);
            let frac = x - j as f64;
            if frac.abs() < 1e-9 || j + 1 >= src_t.len() {
                src_v[j]
            } else {
                src_v[j] * (1.0 - frac) + src_v[j + 1] * frac
            }
        })
        .collect();
    DecoherenceSeries::new(times.to_vec(), values, series.backend())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::MemoryKernel;
    use crate::series::{uniform_grid, Backend};

    fn pair(nu: f64, lambda: f64, a: f64, kernel: MemoryKernel) -> RtnPairParams {
        RtnPairParams::new(nu, lambda, a, kernel).unwrap()
    }

    #[test]
    fn all_backends_agree_on_the_memoryless_case() {
        let p = pair(1.0, 1.0, 0.5, MemoryKernel::memoryless());
        let times = uniform_grid(5.0, 26);
        let closed = decoherence_series(&p, &times, &BackendSpec::ClosedForm).unwrap();
        let rational = decoherence_series(&p, &times, &BackendSpec::Rational).unwrap();
        let contour =
            decoherence_series(&p, &times, &BackendSpec::Contour { nodes: 64 }).unwrap();
        let volterra =
            decoherence_series(&p, &times, &BackendSpec::Volterra { step: 1e-3 }).unwrap();
        assert!(closed.max_abs_deviation(&rational) < 1e-10);
        assert!(closed.max_abs_deviation(&contour) < 1e-7);
        assert!(closed.max_abs_deviation(&volterra) < 1e-3);
    }

    #[test]
    fn provenance_tags() {
        let p = pair(1.0, 1.0, 0.0, MemoryKernel::memoryless());
        let times = uniform_grid(1.0, 3);
        let specs: Vec<(BackendSpec, Backend)> = vec![
            (BackendSpec::ClosedForm, Backend::ClosedForm),
            (BackendSpec::Rational, Backend::Rational),
            (BackendSpec::Contour { nodes: 64 }, Backend::Contour),
            (BackendSpec::Volterra { step: 1e-2 }, Backend::Volterra),
            (BackendSpec::MonteCarlo { n_traj: 16, seed: 1 }, Backend::MonteCarlo),
        ];
        for (spec, tag) in specs {
            let s = decoherence_series(&p, &times, &spec).unwrap();
            assert_eq!(s.backend(), tag, "{spec:?}");
        }
    }

    #[test]
    fn support_matrix() {
        let memoryless = pair(1.0, 1.0, 0.0, MemoryKernel::memoryless());
        let wide_exp = pair(1.0, 1.0, 0.0, MemoryKernel::exponential(8.0).unwrap());
        let narrow_exp = pair(1.0, 1.0, 0.0, MemoryKernel::exponential(2.0).unwrap());
        let composite = pair(1.0, 1.0, 0.0, MemoryKernel::composite(0.5, 8.0).unwrap());

        assert!(BackendSpec::ClosedForm.supports(&memoryless));
        assert!(!BackendSpec::ClosedForm.supports(&wide_exp));
        assert!(BackendSpec::Rational.supports(&composite));
        let mc = BackendSpec::MonteCarlo { n_traj: 1, seed: 0 };
        assert!(mc.supports(&memoryless));
        assert!(mc.supports(&wide_exp));
        assert!(!mc.supports(&narrow_exp));
        assert!(!mc.supports(&composite));
    }

    #[test]
    fn closed_form_rejects_unsupported_kernel_at_run_time() {
        let p = pair(1.0, 1.0, 0.0, MemoryKernel::exponential(1.0).unwrap());
        let times = uniform_grid(1.0, 3);
        assert!(decoherence_series(&p, &times, &BackendSpec::ClosedForm).is_err());
    }

    #[test]
    fn volterra_resampling_hits_grid_points_exactly() {
        let p = pair(2.0, 1.0, 0.5, MemoryKernel::composite(0.5, 1.0).unwrap());
        // 0.05 grid is exactly every 25th step of h = 2e-3
        let times = uniform_grid(5.0, 101);
        let series =
            decoherence_series(&p, &times, &BackendSpec::Volterra { step: 2e-3 }).unwrap();
        let reference = laplace::rational_decoherence(&p, &times).unwrap();
        assert!(series.max_abs_deviation(&reference) < 1e-3);
    }
}
