//! N-level reduced density matrix and the l1-norm coherence.
//!
//! Under pure dephasing the populations never move and each off-diagonal
//! element evolves independently: ρ_nm(t) = ρ_nm(0) e^{−iω_mn t} F_nm(t)
//! with ω_mn = ω_n − ω_m. Noise parameters are given once per unordered
//! pair on the ordered key n < m; the mirrored element is defined as the
//! complex conjugate, which keeps hermiticity exact by construction (the
//! composite noise of the swapped pair is the sign-flipped process, and
//! flipping the noise sign conjugates F).

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::backend::{decoherence_series, BackendSpec};
use crate::error::{Error, Result};
use crate::params::RtnPairParams;

/// N-level system: intrinsic frequencies, initial density matrix, and the
/// telegraph-noise parameters of each coherent pair.
#[derive(Debug, Clone)]
pub struct MoleculeSpec {
    omegas: Vec<f64>,
    rho0: DMatrix<Complex64>,
    pair_params: BTreeMap<(usize, usize), RtnPairParams>,
}

/// Smallest eigenvalue tolerated when validating positivity of ρ(0).
const PSD_TOL: f64 = -1e-10;

impl MoleculeSpec {
    pub fn new(
        omegas: Vec<f64>,
        rho0: DMatrix<Complex64>,
        pair_params: BTreeMap<(usize, usize), RtnPairParams>,
    ) -> Result<Self> {
        let n = omegas.len();
        if n < 2 {
            return Err(Error::InvalidDensityMatrix(format!(
                "need at least 2 levels, got {n}"
            )));
        }
        if rho0.nrows() != n || rho0.ncols() != n {
            return Err(Error::InvalidDensityMatrix(format!(
                "rho0 is {}x{} but there are {n} levels",
                rho0.nrows(),
                rho0.ncols()
            )));
        }
        let scale = rho0.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
        for i in 0..n {
            for j in 0..n {
                let defect = (rho0[(i, j)] - rho0[(j, i)].conj()).norm();
                if defect > 1e-12 * scale {
                    return Err(Error::InvalidDensityMatrix(format!(
                        "not Hermitian at ({i}, {j}): defect {defect:.3e}"
                    )));
                }
            }
        }
        let trace: Complex64 = (0..n).map(|i| rho0[(i, i)]).sum();
        if (trace - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace = {trace}, expected 1"
            )));
        }
        let min_eig = min_eigenvalue(&rho0);
        if min_eig < PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not positive semidefinite: smallest eigenvalue {min_eig:.3e}"
            )));
        }
        for &(a, b) in pair_params.keys() {
            if a >= b || b >= n {
                return Err(Error::InvalidDensityMatrix(format!(
                    "pair key ({a}, {b}) is not an ordered pair below {n}"
                )));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rho0[(i, j)].norm() > 0.0 && !pair_params.contains_key(&(i, j)) {
                    return Err(Error::MissingPairParams { n: i, m: j });
                }
            }
        }
        Ok(Self {
            omegas,
            rho0,
            pair_params,
        })
    }

    pub fn n_levels(&self) -> usize {
        self.omegas.len()
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn rho0(&self) -> &DMatrix<Complex64> {
        &self.rho0
    }

    pub fn pairs(&self) -> &BTreeMap<(usize, usize), RtnPairParams> {
        &self.pair_params
    }

    /// Intrinsic frequency difference ω_mn = ω_n − ω_m of the pair (n, m).
    pub fn omega_diff(&self, n: usize, m: usize) -> f64 {
        self.omegas[n] - self.omegas[m]
    }
}

/// Assemble ρ(t) from per-pair decoherence values. Populations are copied
/// from ρ(0) verbatim; the lower triangle is the conjugate of the upper.
pub fn reduced_density_matrix(
    spec: &MoleculeSpec,
    t: f64,
    f_values: &BTreeMap<(usize, usize), Complex64>,
) -> Result<DMatrix<Complex64>> {
    let n = spec.n_levels();
    let mut rho = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        rho[(i, i)] = spec.rho0[(i, i)];
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let r0 = spec.rho0[(i, j)];
            if r0.norm() == 0.0 {
                continue;
            }
            let f = f_values
                .get(&(i, j))
                .ok_or(Error::MissingPairParams { n: i, m: j })?;
            let phase = Complex64::new(0.0, -spec.omega_diff(i, j) * t).exp();
            let value = r0 * phase * f;
            rho[(i, j)] = value;
            rho[(j, i)] = value.conj();
        }
    }
    Ok(rho)
}

/// Sum of the absolute values of all off-diagonal entries.
pub fn l1_coherence(rho: &DMatrix<Complex64>) -> f64 {
    let n = rho.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += rho[(i, j)].norm();
            }
        }
    }
    acc
}

/// Smallest eigenvalue of a Hermitian matrix; positivity diagnostic only,
/// never enforced along the evolution (the framework does not guarantee
/// complete positivity for every kernel).
pub fn min_eigenvalue(rho: &DMatrix<Complex64>) -> f64 {
    nalgebra::SymmetricEigen::new(rho.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// l1-norm coherence sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// Run the selected backend for every pair and reduce to C_l1(t).
///
/// C_l1 depends only on |F|, so it is insensitive to the phase-sign
/// convention split between the Monte Carlo and analytic backends.
pub fn coherence_series(
    spec: &MoleculeSpec,
    times: &[f64],
    backend: &BackendSpec,
) -> Result<CoherenceSeries> {
    let mut per_pair = BTreeMap::new();
    for (&(i, j), params) in spec.pairs() {
        let series =
            decoherence_series(params, times, backend).map_err(|e| Error::PairBackend {
                n: i,
                m: j,
                source: Box::new(e),
            })?;
        per_pair.insert((i, j), series);
    }
    let mut values = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let f_at: BTreeMap<(usize, usize), Complex64> = per_pair
            .iter()
            .map(|(&key, series)| (key, series.values()[k]))
            .collect();
        let rho = reduced_density_matrix(spec, t, &f_at)?;
        values.push(l1_coherence(&rho));
    }
    Ok(CoherenceSeries {
        times: times.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::MemoryKernel;
    use crate::series::uniform_grid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn half_coherent_qubit() -> DMatrix<Complex64> {
        DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)])
    }

    fn memoryless_pair(nu: f64, lambda: f64, a: f64) -> RtnPairParams {
        RtnPairParams::new(nu, lambda, a, MemoryKernel::memoryless()).unwrap()
    }

    fn qubit_spec() -> MoleculeSpec {
        let mut pairs = BTreeMap::new();
        pairs.insert((0, 1), memoryless_pair(1.0, 1.0, 0.0));
        MoleculeSpec::new(vec![0.0, 0.0], half_coherent_qubit(), pairs).unwrap()
    }

    #[test]
    fn validation_rejects_bad_density_matrices() {
        let pairs = BTreeMap::new();
        // non-Hermitian
        let m = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.5, 0.1), c(0.5, 0.1), c(0.5, 0.0)]);
        assert!(MoleculeSpec::new(vec![0.0, 0.0], m, pairs.clone()).is_err());
        // wrong trace
        let m = DMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(MoleculeSpec::new(vec![0.0, 0.0], m, pairs.clone()).is_err());
        // not positive semidefinite
        let m = DMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        assert!(MoleculeSpec::new(vec![0.0, 0.0], m, pairs.clone()).is_err());
        // coherent pair without parameters
        assert!(matches!(
            MoleculeSpec::new(vec![0.0, 0.0], half_coherent_qubit(), pairs),
            Err(Error::MissingPairParams { n: 0, m: 1 })
        ));
    }

    #[test]
    fn zero_time_reproduces_rho0_exactly() {
        let spec = qubit_spec();
        let mut f = BTreeMap::new();
        f.insert((0, 1), c(1.0, 0.0));
        let rho = reduced_density_matrix(&spec, 0.0, &f).unwrap();
        assert_eq!(rho, *spec.rho0());
    }

    #[test]
    fn qubit_point_value_and_coherence() {
        let spec = qubit_spec();
        let times = vec![0.0, 1.0];
        let series = coherence_series(&spec, &times, &BackendSpec::ClosedForm).unwrap();
        // C(0) = 1; C(1) = 2 * 0.5 * 2e^{-1}
        assert!((series.values[0] - 1.0).abs() < 1e-15);
        let expected = 2.0 * (-1.0f64).exp();
        assert!((series.values[1] - expected).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_state_has_zero_coherence() {
        let rho = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
        );
        assert_eq!(l1_coherence(&rho), 0.0);
        assert!((min_eigenvalue(&rho) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn intrinsic_frequency_rotates_phase_but_not_modulus() {
        let mut pairs = BTreeMap::new();
        pairs.insert((0, 1), memoryless_pair(0.0, 1.0, 0.0));
        let spec = MoleculeSpec::new(vec![1.0, 0.0], half_coherent_qubit(), pairs).unwrap();
        let mut f = BTreeMap::new();
        f.insert((0, 1), c(1.0, 0.0));
        let rho = reduced_density_matrix(&spec, std::f64::consts::PI, &f).unwrap();
        // e^{-i pi} = -1
        assert!((rho[(0, 1)] - c(-0.5, 0.0)).norm() < 1e-12);
        assert!((rho[(0, 1)].norm() - 0.5).abs() < 1e-15);
    }

    fn three_level_spec() -> MoleculeSpec {
        let rho0 = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.4, 0.0),
                c(0.15, 0.05),
                c(0.1, -0.1),
                c(0.15, -0.05),
                c(0.35, 0.0),
                c(0.05, 0.02),
                c(0.1, 0.1),
                c(0.05, -0.02),
                c(0.25, 0.0),
            ],
        );
        let mut pairs = BTreeMap::new();
        pairs.insert((0, 1), memoryless_pair(1.0, 1.0, 0.0));
        pairs.insert((0, 2), memoryless_pair(2.0, 1.0, 0.5));
        pairs.insert((1, 2), memoryless_pair(0.5, 2.0, -0.3));
        MoleculeSpec::new(vec![1.0, 0.3, -0.4], rho0, pairs).unwrap()
    }

    #[test]
    fn hermiticity_and_trace_are_exact() {
        let spec = three_level_spec();
        let times = uniform_grid(5.0, 11);
        for &t in &times {
            let f: BTreeMap<(usize, usize), Complex64> = spec
                .pairs()
                .iter()
                .map(|(&key, p)| {
                    (key, crate::closed_form::decoherence(p, t).unwrap())
                })
                .collect();
            let rho = reduced_density_matrix(&spec, t, &f).unwrap();
            assert_eq!(rho, rho.adjoint(), "hermiticity at t={t}");
            let trace: Complex64 = (0..3).map(|i| rho[(i, i)]).sum();
            let trace0: Complex64 = (0..3).map(|i| spec.rho0()[(i, i)]).sum();
            assert_eq!(trace, trace0, "trace at t={t}");
            for i in 0..3 {
                assert_eq!(rho[(i, i)], spec.rho0()[(i, i)], "population {i} at t={t}");
            }
        }
    }

    #[test]
    fn coherence_is_pairwise_separable() {
        let spec = three_level_spec();
        let times = uniform_grid(4.0, 9);
        let combined = coherence_series(&spec, &times, &BackendSpec::ClosedForm).unwrap();
        // brute force: each pair contributes 2 |rho0_nm| |F_nm| on its own
        for (k, &t) in times.iter().enumerate() {
            let mut total = 0.0;
            for (&(i, j), params) in spec.pairs() {
                let f = crate::closed_form::decoherence(params, t).unwrap();
                total += 2.0 * spec.rho0()[(i, j)].norm() * f.norm();
            }
            assert!(
                (combined.values[k] - total).abs() < 1e-12,
                "t={t}: {} vs {total}",
                combined.values[k]
            );
        }
    }

    #[test]
    fn perturbing_one_pair_leaves_others_bitwise_unchanged() {
        let spec = three_level_spec();
        let t = 1.7;
        let f_base: BTreeMap<(usize, usize), Complex64> = spec
            .pairs()
            .iter()
            .map(|(&key, p)| (key, crate::closed_form::decoherence(p, t).unwrap()))
            .collect();
        let mut f_perturbed = f_base.clone();
        let perturbed = memoryless_pair(3.0, 0.5, 0.9);
        f_perturbed.insert((0, 1), crate::closed_form::decoherence(&perturbed, t).unwrap());

        let rho_a = reduced_density_matrix(&spec, t, &f_base).unwrap();
        let rho_b = reduced_density_matrix(&spec, t, &f_perturbed).unwrap();
        assert_ne!(rho_a[(0, 1)], rho_b[(0, 1)]);
        assert_eq!(rho_a[(0, 2)], rho_b[(0, 2)]);
        assert_eq!(rho_a[(1, 2)], rho_b[(1, 2)]);
        assert_eq!(rho_a[(2, 1)], rho_b[(2, 1)]);
    }

    #[test]
    fn backend_errors_name_the_offending_pair() {
        let mut pairs = BTreeMap::new();
        pairs.insert((0, 1), memoryless_pair(1.0, 1.0, 0.0));
        pairs.insert(
            (1, 2),
            RtnPairParams::new(1.0, 1.0, 0.0, MemoryKernel::exponential(1.0).unwrap()).unwrap(),
        );
        let rho0 = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.4, 0.0),
                c(0.1, 0.0),
                c(0.0, 0.0),
                c(0.1, 0.0),
                c(0.3, 0.0),
                c(0.1, 0.0),
                c(0.0, 0.0),
                c(0.1, 0.0),
                c(0.3, 0.0),
            ],
        );
        let spec = MoleculeSpec::new(vec![0.0, 0.0, 0.0], rho0, pairs).unwrap();
        // the closed backend cannot serve the exponential kernel of (1, 2)
        let err = coherence_series(&spec, &[0.0, 1.0], &BackendSpec::ClosedForm).unwrap_err();
        match err {
            Error::PairBackend { n: 1, m: 2, source } => {
                assert!(matches!(*source, Error::BackendMismatch { .. }));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn zero_amplitude_noise_keeps_coherence_constant() {
        let mut pairs = BTreeMap::new();
        pairs.insert((0, 1), memoryless_pair(0.0, 1.0, 0.0));
        let spec = MoleculeSpec::new(vec![0.5, -0.5], half_coherent_qubit(), pairs).unwrap();
        let times = uniform_grid(10.0, 21);
        let series = coherence_series(&spec, &times, &BackendSpec::ClosedForm).unwrap();
        for v in &series.values {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }
}
