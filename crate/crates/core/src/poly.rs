//! Small complex-polynomial toolkit backing the rational Laplace inversion.
//!
//! Coefficients are stored in ascending degree order. Everything here is
//! sized for the degree <= 4 denominators that arise in this crate, so the
//! algorithms favor robustness over asymptotics.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Horner evaluation.
pub(crate) fn eval(coeffs: &[Complex64], p: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, &c| acc * p + c)
}

pub(crate) fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

pub(crate) fn add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| {
            a.get(k).copied().unwrap_or(ZERO) + b.get(k).copied().unwrap_or(ZERO)
        })
        .collect()
}

pub(crate) fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub(crate) fn scale(a: &[Complex64], s: Complex64) -> Vec<Complex64> {
    a.iter().map(|&c| c * s).collect()
}

/// Drop trailing coefficients that are negligible against the largest one.
pub(crate) fn trim(mut coeffs: Vec<Complex64>) -> Vec<Complex64> {
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tol = 1e-13 * max;
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() <= tol) {
        coeffs.pop();
    }
    coeffs
}

/// Taylor coefficients of p(center + x): out[k] = p^(k)(center)/k!.
///
/// Computed by repeated synthetic division, which is exact polynomial
/// arithmetic (no cancellation beyond the coefficients themselves).
pub(crate) fn taylor_shift(asc: &[Complex64], center: Complex64) -> Vec<Complex64> {
    let mut desc: Vec<Complex64> = asc.iter().rev().copied().collect();
    let n = desc.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let m = n - k;
        for i in 1..m {
            let prev = desc[i - 1];
            desc[i] += prev * center;
        }
        out.push(desc[m - 1]);
    }
    out
}

/// First `terms` coefficients of the power series num/den (den[0] != 0).
pub(crate) fn series_div(num: &[Complex64], den: &[Complex64], terms: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; terms];
    for k in 0..terms {
        let mut acc = num.get(k).copied().unwrap_or(ZERO);
        for j in 1..=k {
            acc -= den.get(j).copied().unwrap_or(ZERO) * out[k - j];
        }
        out[k] = acc / den[0];
    }
    out
}

/// All roots of the polynomial, unordered, with multiplicity by repetition.
///
/// The leading coefficient must be the last entry and significantly
/// nonzero. Uses direct formulas for degree <= 2 and companion-matrix
/// eigenvalues above, then polishes every root with guarded Newton steps.
pub(crate) fn roots(asc: &[Complex64]) -> Result<Vec<Complex64>> {
    let coeffs = trim(asc.to_vec());
    let degree = coeffs.len() - 1;
    match degree {
        0 => Ok(vec![]),
        1 => Ok(vec![-coeffs[0] / coeffs[1]]),
        2 => Ok(quadratic_roots(coeffs[0], coeffs[1], coeffs[2])),
        _ => {
            let lead = coeffs[degree];
            let mut companion = DMatrix::<Complex64>::zeros(degree, degree);
            for i in 1..degree {
                companion[(i, i - 1)] = ONE;
            }
            for i in 0..degree {
                companion[(i, degree - 1)] = -coeffs[i] / lead;
            }
            let eigs = companion.eigenvalues().ok_or(Error::NumericalFailure {
                context: "polynomial roots",
                details: format!("companion eigenvalue iteration failed for degree {degree}"),
            })?;
            let mut out: Vec<Complex64> = eigs.iter().copied().collect();
            for r in &mut out {
                *r = polish(&coeffs, *r);
            }
            Ok(out)
        }
    }
}

/// Numerically stable quadratic formula (c0 + c1 p + c2 p^2).
fn quadratic_roots(c0: Complex64, c1: Complex64, c2: Complex64) -> Vec<Complex64> {
    let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    // pick the sign that avoids cancellation in c1 ± disc
    let s = if (c1 + disc).norm() >= (c1 - disc).norm() {
        c1 + disc
    } else {
        c1 - disc
    };
    if s.norm() == 0.0 {
        // c1 = disc = 0: symmetric pair ±sqrt(-c0/c2)
        let r = (-c0 / c2).sqrt();
        return vec![r, -r];
    }
    let q = s * -0.5;
    vec![q / c2, c0 / q]
}

/// A few guarded Newton iterations with the residual evaluated in
/// double-double arithmetic. Plain f64 Horner bottoms out at an evaluation
/// noise of ~eps·Σ|c_k r^k|, which leaves roots of clustered pairs a few
/// hundred ulps off and ruins their (large, cancelling) residues; the
/// compensated residual removes that floor. A step is kept only if it
/// reduces the residual, so near-multiple roots cannot be thrown off.
fn polish(coeffs: &[Complex64], mut r: Complex64) -> Complex64 {
    let deriv = derivative(coeffs);
    let mut residual = dd::eval(coeffs, r).norm();
    for _ in 0..4 {
        let d = eval(&deriv, r);
        if d.norm() < 1e-300 {
            break;
        }
        let candidate = r - dd::eval(coeffs, r) / d;
        let cand_res = dd::eval(coeffs, candidate).norm();
        if cand_res < residual {
            r = candidate;
            residual = cand_res;
        } else {
            break;
        }
    }
    r
}

/// Minimal double-double arithmetic for compensated complex Horner.
mod dd {
    use num_complex::Complex64;

    #[derive(Clone, Copy)]
    pub struct Dd {
        hi: f64,
        lo: f64,
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let hi = a + b;
        let lo = b - (hi - a);
        Dd { hi, lo }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let hi = a + b;
        let v = hi - a;
        let lo = (a - (hi - v)) + (b - v);
        Dd { hi, lo }
    }

    fn two_prod(a: f64, b: f64) -> Dd {
        let hi = a * b;
        let lo = f64::mul_add(a, b, -hi);
        Dd { hi, lo }
    }

    impl Dd {
        pub fn from_f64(x: f64) -> Self {
            Dd { hi: x, lo: 0.0 }
        }

        pub fn to_f64(self) -> f64 {
            self.hi + self.lo
        }

        pub fn add(self, o: Dd) -> Dd {
            let s = two_sum(self.hi, o.hi);
            quick_two_sum(s.hi, s.lo + self.lo + o.lo)
        }

        pub fn sub(self, o: Dd) -> Dd {
            self.add(Dd {
                hi: -o.hi,
                lo: -o.lo,
            })
        }

        pub fn mul(self, o: Dd) -> Dd {
            let p = two_prod(self.hi, o.hi);
            quick_two_sum(p.hi, p.lo + self.hi * o.lo + self.lo * o.hi)
        }
    }

    #[derive(Clone, Copy)]
    struct DdComplex {
        re: Dd,
        im: Dd,
    }

    impl DdComplex {
        fn from(c: Complex64) -> Self {
            DdComplex {
                re: Dd::from_f64(c.re),
                im: Dd::from_f64(c.im),
            }
        }

        fn add(self, o: DdComplex) -> DdComplex {
            DdComplex {
                re: self.re.add(o.re),
                im: self.im.add(o.im),
            }
        }

        fn mul(self, o: DdComplex) -> DdComplex {
            DdComplex {
                re: self.re.mul(o.re).sub(self.im.mul(o.im)),
                im: self.re.mul(o.im).add(self.im.mul(o.re)),
            }
        }
    }

    /// Horner evaluation carried in double-double, rounded at the end.
    pub fn eval(coeffs: &[Complex64], p: Complex64) -> Complex64 {
        let pp = DdComplex::from(p);
        let mut acc = DdComplex::from(Complex64::new(0.0, 0.0));
        for &c in coeffs.iter().rev() {
            acc = acc.mul(pp).add(DdComplex::from(c));
        }
        Complex64::new(acc.re.to_f64(), acc.im.to_f64())
    }
}

/// Group roots whose separation is below `rel_tol * (1 + |r|)` into
/// clusters, returning (center, multiplicity).
pub(crate) fn cluster(roots: &[Complex64], rel_tol: f64) -> Vec<(Complex64, usize)> {
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for &r in roots {
        let mut placed = false;
        for (center, count) in clusters.iter_mut() {
            if (r - *center).norm() <= rel_tol * (1.0 + center.norm()) {
                // running mean keeps the center at the cluster barycenter
                let n = *count as f64;
                *center = (*center * n + r) / (n + 1.0);
                *count += 1;
                placed = true;
                break;
            }
        }
        if !placed {
            clusters.push((r, 1));
        }
    }
    clusters
}

/// Monic polynomial with the given roots.
pub(crate) fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ONE];
    for &r in roots {
        out = mul(&out, &[-r, ONE]);
    }
    out
}
