//! Laplace-domain decoherence function and its exact inversion.
//!
//! For every kernel in [`crate::kernel`] the Laplace transform of the
//! decoherence function is
//!
//! ```text
//!          p + 2λ K̃(p) + i a ν
//! F̃(p) = ─────────────────────────
//!         p [p + 2λ K̃(p)] + ν²
//! ```
//!
//! Since K̃ is rational for the whole kernel family, F̃ is a strictly proper
//! rational function of degree at most 4 in the denominator. Clearing the
//! kernel denominator gives [`ComplexRational`]; factoring that into poles
//! and (possibly confluent) residues gives F(t) as an exponential-polynomial
//! sum, exact up to root-finding precision.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::KernelKind;
use crate::params::RtnPairParams;
use crate::poly;
use crate::series::{Backend, DecoherenceSeries};

/// Roots closer than this (relative) are merged and handled confluently.
/// The memoryless transform has an exact double pole at ν = λ; nearby
/// parameters must not produce catastrophic cancellation between huge,
/// nearly opposite residues.
const ROOT_CLUSTER_REL_TOL: f64 = 1e-7;

/// Shared num/den roots within this (relative) distance are cancelled when
/// reducing a cleared-denominator construction.
const COMMON_ROOT_REL_TOL: f64 = 1e-9;

/// Ratio of two complex-coefficient polynomials in p, ascending degree,
/// denominator monic, strictly proper, and in reduced form (no common
/// roots within tolerance).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexRational {
    num: Vec<Complex64>,
    den: Vec<Complex64>,
}

impl ComplexRational {
    /// Normalize (monic denominator), cancel shared roots, and validate
    /// strict properness.
    pub fn new(num: Vec<Complex64>, den: Vec<Complex64>) -> Result<Self> {
        let num = poly::trim(num);
        let den = poly::trim(den);
        if den.len() < 2 {
            return Err(Error::NumericalFailure {
                context: "rational construction",
                details: "denominator must have positive degree".into(),
            });
        }
        if num.len() >= den.len() {
            return Err(Error::NumericalFailure {
                context: "rational construction",
                details: format!(
                    "not strictly proper: deg(num) = {} >= deg(den) = {}",
                    num.len() - 1,
                    den.len() - 1
                ),
            });
        }
        let lead = *den.last().unwrap();
        let mut num = poly::scale(&num, lead.inv());
        let mut den = poly::scale(&den, lead.inv());

        // reduce: cleared-denominator constructions introduce removable
        // factors (e.g. composite w = 1), detected as shared roots.
        let mut num_roots = poly::roots(&num)?;
        let mut den_roots = poly::roots(&den)?;
        let mut cancelled = false;
        let mut i = 0;
        while i < num_roots.len() {
            let r = num_roots[i];
            let hit = den_roots
                .iter()
                .position(|&d| (r - d).norm() <= COMMON_ROOT_REL_TOL * (1.0 + d.norm()));
            if let Some(j) = hit {
                num_roots.remove(i);
                den_roots.remove(j);
                cancelled = true;
            } else {
                i += 1;
            }
        }
        if cancelled {
            let num_lead = *num.last().unwrap();
            num = poly::scale(&poly::from_roots(&num_roots), num_lead);
            den = poly::from_roots(&den_roots);
        }
        Ok(Self { num, den })
    }

    /// Numerator coefficients, ascending degree.
    pub fn num(&self) -> &[Complex64] {
        &self.num
    }

    /// Denominator coefficients, ascending degree (monic).
    pub fn den(&self) -> &[Complex64] {
        &self.den
    }

    pub fn eval(&self, p: Complex64) -> Complex64 {
        poly::eval(&self.num, p) / poly::eval(&self.den, p)
    }
}

/// Evaluate F̃(p) directly from the kernel transform, without clearing
/// denominators. This is the construction path the rational form is
/// cross-checked against.
pub fn f_laplace(params: &RtnPairParams, p: Complex64) -> Result<Complex64> {
    let ktilde = params.kernel().laplace(p)?;
    let lambda = params.lambda();
    let nu = params.nu();
    let core = p + 2.0 * lambda * ktilde;
    let num = core + Complex64::new(0.0, params.a() * nu);
    let den = p * core + nu * nu;
    Ok(num / den)
}

/// Kernel transform written as a ratio of real polynomials kn/kd.
fn kernel_rational(kind: &KernelKind) -> (Vec<Complex64>, Vec<Complex64>) {
    let re = |x: f64| Complex64::new(x, 0.0);
    match *kind {
        KernelKind::Memoryless => (vec![re(1.0)], vec![re(1.0)]),
        KernelKind::Exponential { kappa } => (vec![re(kappa)], vec![re(kappa), re(1.0)]),
        // w + (1-w) κ/(p+κ) = (w p + κ)/(p + κ)
        KernelKind::Composite { w, kappa } => {
            (vec![re(kappa), re(w)], vec![re(kappa), re(1.0)])
        }
        // κ(p+κ) / ((p+κ)² + Ω²)
        KernelKind::ModulatedCosine { kappa, omega } => (
            vec![re(kappa * kappa), re(kappa)],
            vec![re(kappa * kappa + omega * omega), re(2.0 * kappa), re(1.0)],
        ),
    }
}

/// F̃(p) as a reduced rational function.
///
/// With K̃ = kn/kd the cleared form is
/// num = (p + iaν)·kd + 2λ·kn and den = p·(p·kd + 2λ·kn) + ν²·kd.
pub fn rational_f(params: &RtnPairParams) -> Result<ComplexRational> {
    let (kn, kd) = kernel_rational(params.kernel().kind());
    let lambda2 = poly::scale(&kn, Complex64::new(2.0 * params.lambda(), 0.0));
    let ia_nu = Complex64::new(0.0, params.a() * params.nu());
    let p_plus_ianu = vec![ia_nu, poly::ONE];

    let num = poly::add(&poly::mul(&p_plus_ianu, &kd), &lambda2);
    let inner = poly::add(&poly::mul(&[poly::ZERO, poly::ONE], &kd), &lambda2);
    let den = poly::add(
        &poly::mul(&[poly::ZERO, poly::ONE], &inner),
        &poly::scale(&kd, Complex64::new(params.nu() * params.nu(), 0.0)),
    );
    ComplexRational::new(num, den)
}

/// One pole cluster of the partial-fraction expansion.
///
/// Contributes e^{pole·t} · Σ_k `coeffs[k]` · t^k / k! to F(t); `coeffs[0]`
/// is the plain residue.
#[derive(Debug, Clone)]
pub struct PoleTerm {
    pub pole: Complex64,
    pub coeffs: Vec<Complex64>,
}

/// Partial-fraction decomposition with confluent handling of clustered
/// roots.
pub fn exponential_sum(f: &ComplexRational) -> Result<Vec<PoleTerm>> {
    let den_roots = poly::roots(&f.den)?;
    let clusters = poly::cluster(&den_roots, ROOT_CLUSTER_REL_TOL);

    let mut terms = Vec::with_capacity(clusters.len());
    for (center, multiplicity) in clusters {
        let num_taylor = poly::taylor_shift(&f.num, center);
        let den_taylor = poly::taylor_shift(&f.den, center);
        // den(center + x) = x^m · q(x) up to the (validated tiny) first m
        // coefficients, which vanish identically for an exact m-fold root.
        let q: Vec<Complex64> = den_taylor[multiplicity..].to_vec();
        if q.is_empty() || q[0].norm() == 0.0 {
            return Err(Error::NumericalFailure {
                context: "partial fractions",
                details: format!("degenerate cluster at {center}"),
            });
        }
        let g = poly::series_div(&num_taylor, &q, multiplicity);
        // principal part Σ_i g[i] / (p - center)^{m-i}; inverse transform
        // of 1/(p-c)^j is t^{j-1} e^{ct}/(j-1)!
        let mut coeffs = vec![poly::ZERO; multiplicity];
        for (i, &gi) in g.iter().enumerate() {
            coeffs[multiplicity - 1 - i] = gi;
        }
        terms.push(PoleTerm {
            pole: center,
            coeffs,
        });
    }
    Ok(terms)
}

/// Exact inversion of a strictly proper rational transform on a time grid.
pub fn invert_rational(f: &ComplexRational, times: &[f64]) -> Result<DecoherenceSeries> {
    let terms = exponential_sum(f)?;
    let values: Vec<Complex64> = times
        .iter()
        .map(|&t| eval_exponential_sum(&terms, t))
        .collect();
    DecoherenceSeries::new(times.to_vec(), values, Backend::Rational)
}

fn eval_exponential_sum(terms: &[PoleTerm], t: f64) -> Complex64 {
    let mut acc = poly::ZERO;
    for term in terms {
        let mut lead = poly::ZERO;
        let mut factorial = 1.0;
        for (k, &c) in term.coeffs.iter().enumerate() {
            if k > 0 {
                factorial *= k as f64;
            }
            lead += c * t.powi(k as i32) / factorial;
        }
        acc += lead * (term.pole * t).exp();
    }
    acc
}

/// Rational-inversion series for the given pair parameters.
pub fn rational_decoherence(params: &RtnPairParams, times: &[f64]) -> Result<DecoherenceSeries> {
    invert_rational(&rational_f(params)?, times)
}
