//! Executes parsed run configurations: backend dispatch, CSV output, and
//! the cross-backend comparison report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_complex::Complex64;
use rtn_dephase::{
    backend::decoherence_series,
    molecule::{self, CoherenceSeries},
    series::uniform_grid,
    DecoherenceSeries,
};

use crate::config::{BackendChoice, RunConfig};
use crate::output;

fn times(cfg: &RunConfig) -> Vec<f64> {
    uniform_grid(cfg.grid.t_max, cfg.grid.n_points)
}

fn out_dir(cfg: &RunConfig, overridden: Option<&Path>) -> PathBuf {
    overridden
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output.dir.clone())
}

fn warn_volterra_resolution(cfg: &RunConfig) {
    if !cfg.backends.contains(&BackendChoice::Volterra) {
        return;
    }
    for (&(n, m), pc) in &cfg.pairs {
        if pc.lambda * cfg.volterra.step > 0.1 {
            eprintln!(
                "warning: [volterra] step = {} under-resolves pair ({n}, {m}) \
                 (lambda * step = {} > 0.1)",
                cfg.volterra.step,
                pc.lambda * cfg.volterra.step
            );
        }
    }
}

type PairSeries = BTreeMap<(usize, usize), Vec<(BackendChoice, DecoherenceSeries)>>;

/// Per-pair, per-backend decoherence series for the configured grid.
fn compute_all(cfg: &RunConfig) -> Result<PairSeries> {
    let grid = times(cfg);
    let mut all = BTreeMap::new();
    for (&(n, m), pc) in &cfg.pairs {
        let params = pc.to_params()?;
        let mut per_backend = Vec::with_capacity(cfg.backends.len());
        for &choice in &cfg.backends {
            let spec = cfg.backend_spec(choice);
            let series = decoherence_series(&params, &grid, &spec).with_context(|| {
                format!("backend `{}` failed on pair ({n}, {m})", choice.label())
            })?;
            per_backend.push((choice, series));
        }
        all.insert((n, m), per_backend);
    }
    Ok(all)
}

/// Run every configured backend and write one decoherence CSV per pair and
/// backend, plus a coherence CSV per backend for molecule configs. Returns
/// the paths written.
pub fn run(cfg: &RunConfig, output_dir: Option<&Path>) -> Result<Vec<PathBuf>> {
    warn_volterra_resolution(cfg);
    let dir = out_dir(cfg, output_dir);
    let all = compute_all(cfg)?;
    let mut written = Vec::new();

    for (&(n, m), per_backend) in &all {
        for (choice, series) in per_backend {
            let path = dir.join(format!(
                "{}F_{n}_{m}_{}.csv",
                cfg.output.prefix,
                choice.label()
            ));
            output::write_file(&path, &output::decoherence_csv(series))?;
            written.push(path);
        }
    }

    if let Some(molecule_spec) = cfg.molecule()? {
        let grid = times(cfg);
        for (bi, &choice) in cfg.backends.iter().enumerate() {
            let mut values = Vec::with_capacity(grid.len());
            let mut min_eig = f64::INFINITY;
            for (k, &t) in grid.iter().enumerate() {
                let f_at: BTreeMap<(usize, usize), Complex64> = all
                    .iter()
                    .map(|(&key, per_backend)| (key, per_backend[bi].1.values()[k]))
                    .collect();
                let rho = molecule::reduced_density_matrix(&molecule_spec, t, &f_at)?;
                min_eig = min_eig.min(molecule::min_eigenvalue(&rho));
                values.push(molecule::l1_coherence(&rho));
            }
            let series = CoherenceSeries {
                times: grid.clone(),
                values,
            };
            let path = dir.join(format!(
                "{}coherence_{}.csv",
                cfg.output.prefix,
                choice.label()
            ));
            output::write_file(&path, &output::coherence_csv(&series))?;
            written.push(path);
            // positivity is diagnosed, never enforced
            println!(
                "positivity diagnostic ({}): smallest eigenvalue over grid = {:.6e}",
                choice.label(),
                min_eig
            );
        }
    }
    Ok(written)
}

/// Outcome of a comparison: the rendered report and whether every gated
/// backend pair stayed within tolerance.
pub struct Comparison {
    pub report: String,
    pub ok: bool,
}

/// Compare every pair of configured backends pointwise on the grid.
///
/// Monte Carlo series are conjugated before differencing (the trajectory
/// average has the opposite phase-sign convention) and are reported in
/// units of their standard error instead of gating the exit status.
pub fn compare(cfg: &RunConfig, tolerance: f64, volterra_tolerance: f64) -> Result<Comparison> {
    let all = compute_all(cfg)?;
    let mut report = String::new();
    let mut ok = true;

    for (&(n, m), per_backend) in &all {
        for i in 0..per_backend.len() {
            for j in (i + 1)..per_backend.len() {
                let (ca, sa) = &per_backend[i];
                let (cb, sb) = &per_backend[j];
                let mc_involved =
                    *ca == BackendChoice::Mc || *cb == BackendChoice::Mc;

                // orient so that the possibly-MC series is `b`
                let (ca, sa, cb, sb) = if *ca == BackendChoice::Mc {
                    (cb, sb, ca, sa)
                } else {
                    (ca, sa, cb, sb)
                };

                let mut max_dev = 0.0f64;
                let mut sum_dev = 0.0f64;
                let mut max_sigmas = 0.0f64;
                for k in 0..sa.len() {
                    let va = sa.values()[k];
                    let vb = if mc_involved {
                        sb.values()[k].conj()
                    } else {
                        sb.values()[k]
                    };
                    let dev = (va - vb).norm();
                    max_dev = max_dev.max(dev);
                    sum_dev += dev;
                    if let Some(errs) = sb.stderr() {
                        let s_re = (va.re - vb.re).abs() / errs[k].re.max(1e-300);
                        // conjugation flips the sign of both Im F and its
                        // sampled deviations; the error bar is unchanged
                        let s_im = (va.im + sb.values()[k].im).abs() / errs[k].im.max(1e-300);
                        if errs[k].re > 0.0 {
                            max_sigmas = max_sigmas.max(s_re);
                        }
                        if errs[k].im > 0.0 {
                            max_sigmas = max_sigmas.max(s_im);
                        }
                    }
                }
                let mean_dev = sum_dev / sa.len() as f64;

                if mc_involved {
                    writeln!(
                        report,
                        "pair ({n},{m}) {} vs {} (conjugation bridge applied): \
                         max |dF| = {max_dev:.3e}, mean |dF| = {mean_dev:.3e}, \
                         max |dF|/stderr = {max_sigmas:.2}",
                        ca.label(),
                        cb.label()
                    )
                    .unwrap();
                } else {
                    let gate = if *ca == BackendChoice::Volterra || *cb == BackendChoice::Volterra
                    {
                        volterra_tolerance
                    } else {
                        tolerance
                    };
                    let verdict = if max_dev <= gate { "ok" } else { "EXCEEDED" };
                    if max_dev > gate {
                        ok = false;
                    }
                    writeln!(
                        report,
                        "pair ({n},{m}) {} vs {}: max |dF| = {max_dev:.3e}, \
                         mean |dF| = {mean_dev:.3e}, tolerance {gate:.1e} [{verdict}]",
                        ca.label(),
                        cb.label()
                    )
                    .unwrap();
                }
            }
        }
    }
    Ok(Comparison { report, ok })
}

/// Write the comparison report next to the run outputs.
pub fn write_report(cfg: &RunConfig, output_dir: Option<&Path>, report: &str) -> Result<PathBuf> {
    let path = out_dir(cfg, output_dir).join(format!("{}compare.txt", cfg.output.prefix));
    output::write_file(&path, report)?;
    Ok(path)
}
