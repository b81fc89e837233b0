//! Complex polynomials in monomial form and an Aberth–Ehrlich root finder.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{error::param, Error, Result};

/// Polynomial with complex coefficients, ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPolynomial {
    coefficients: Vec<Complex64>,
}

impl ComplexPolynomial {
    /// Trailing zero coefficients are dropped; the zero polynomial is rejected.
    pub fn new(mut coefficients: Vec<Complex64>) -> Result<Self> {
        while coefficients.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            return param("the zero polynomial has no degree");
        }
        if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::CoefficientOverflow {
                degree: coefficients.len() - 1,
            });
        }
        Ok(Self { coefficients })
    }

    pub fn from_real(coefficients: &[f64]) -> Result<Self> {
        Self::new(coefficients.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        *self.coefficients.last().unwrap()
    }

    pub fn is_real(&self) -> bool {
        self.coefficients.iter().all(|c| c.im == 0.0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `(p(z), p'(z), p''(z))` by a single Horner pass.
    pub fn eval_derivatives(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let (mut p, mut dp, mut d2p) = (zero, zero, zero);
        for &c in self.coefficients.iter().rev() {
            d2p = d2p * z + dp;
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp, 2.0 * d2p)
    }

    /// `Σ |c_i| |z|^i`, the natural magnitude against which `|p(z)|` is judged.
    pub fn magnitude_at(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Relative residual `|p(z)| / Σ |c_i| |z|^i` (a backward error).
    pub fn relative_residual(&self, z: Complex64) -> f64 {
        let m = self.magnitude_at(z);
        if m == 0.0 {
            // only possible at an exact zero root
            return 0.0;
        }
        self.eval(z).norm() / m
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coefficients: out }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self {
            coefficients: vec![Complex64::new(1.0, 0.0)],
        };
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self + other`, re-validated (cancellation may lower the degree).
    pub fn add(&self, other: &Self) -> Result<Self> {
        let len = self.coefficients.len().max(other.coefficients.len());
        let zero = Complex64::new(0.0, 0.0);
        let sum = (0..len)
            .map(|i| {
                self.coefficients.get(i).copied().unwrap_or(zero)
                    + other.coefficients.get(i).copied().unwrap_or(zero)
            })
            .collect();
        Self::new(sum)
    }

    /// `p(s t)` as a polynomial in `t`.
    fn rescaled(&self, s: f64) -> Vec<Complex64> {
        let mut f = 1.0;
        self.coefficients
            .iter()
            .map(|c| {
                let v = c * f;
                f *= s;
                v
            })
            .collect()
    }
}

impl fmt::Display for ComplexPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate().rev() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({})", c)?;
            }
            match i {
                0 => {}
                1 => write!(f, "·λ")?,
                _ => write!(f, "·λ^{i}")?,
            }
        }
        Ok(())
    }
}

/// All roots of a polynomial with their relative residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    /// Index pairs of roots closer than [`CLUSTER_RADIUS`]; polished as double roots.
    pub clusters: Vec<(usize, usize)>,
}

pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
pub const CLUSTER_RESIDUAL_TOLERANCE: f64 = 1e-7;
pub const CLUSTER_RADIUS: f64 = 1e-6;
const ABERTH_BUDGET: usize = 500;
const INIT_ROTATION: f64 = 0.3;

/// Every root of `poly`, counted with multiplicity.
///
/// Exact zero roots are split off first. The remaining polynomial is rescaled
/// so its roots have modulus of order one, then solved by Aberth–Ehrlich
/// iteration started on a circle of the Cauchy radius (roots of unity rotated
/// by 0.3 rad). Each root receives one Newton polish on the original
/// coefficients; for real coefficients the set is symmetrised under conjugation.
pub fn roots_all(poly: &ComplexPolynomial) -> Result<RootSet> {
    if poly.degree() == 0 {
        return param("a constant polynomial has no roots");
    }
    let zeros = poly
        .coefficients
        .iter()
        .take_while(|c| **c == Complex64::new(0.0, 0.0))
        .count();
    let reduced = ComplexPolynomial {
        coefficients: poly.coefficients[zeros..].to_vec(),
    };

    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if reduced.degree() > 0 {
        let mut found = aberth(&reduced).map_err(|iterations| Error::RootsNoConvergence {
            poly: poly.to_string(),
            iterations,
        })?;
        for z in &mut found {
            let (p, dp, _) = reduced.eval_derivatives(*z);
            if dp.norm() > 0.0 {
                let step = p / dp;
                if step.re.is_finite() && step.im.is_finite() {
                    *z -= step;
                }
            }
        }
        roots.extend(found);
    }

    if poly.is_real() {
        symmetrise_conjugates(&mut roots);
    }

    let mut clusters = Vec::new();
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < CLUSTER_RADIUS {
                clusters.push((i, j));
            }
        }
    }
    for &(i, j) in &clusters {
        for idx in [i, j] {
            let z = roots[idx];
            let (p, dp, _) = poly.eval_derivatives(z);
            if dp.norm() > 0.0 {
                let step = 2.0 * p / dp;
                if step.norm() < CLUSTER_RADIUS {
                    roots[idx] = z - step;
                }
            }
        }
    }

    let residuals: Vec<f64> = roots.iter().map(|&z| poly.relative_residual(z)).collect();
    for (i, &r) in residuals.iter().enumerate() {
        let in_cluster = clusters.iter().any(|&(a, b)| a == i || b == i);
        let limit = if in_cluster {
            CLUSTER_RESIDUAL_TOLERANCE
        } else {
            RESIDUAL_TOLERANCE
        };
        if !(r < limit) {
            return Err(Error::RootsNoConvergence {
                poly: poly.to_string(),
                iterations: ABERTH_BUDGET,
            });
        }
    }
    Ok(RootSet {
        roots,
        residuals,
        clusters,
    })
}

/// Aberth–Ehrlich iteration on a polynomial without zero roots.
/// Returns the iteration count on failure.
fn aberth(poly: &ComplexPolynomial) -> std::result::Result<Vec<Complex64>, usize> {
    let d = poly.degree();
    let lead = poly.leading().norm();
    // Modulus scale: max_i (|c_i|/|c_d|)^{1/(d-i)}.
    let scale = poly.coefficients[..d]
        .iter()
        .enumerate()
        .map(|(i, c)| (c.norm() / lead).powf(1.0 / (d - i) as f64))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let scaled = poly.rescaled(scale);
    let lead_s = scaled[d];
    let monic: Vec<Complex64> = scaled.iter().map(|c| c / lead_s).collect();
    let q = ComplexPolynomial {
        coefficients: monic,
    };
    let cauchy = 1.0 + q.coefficients[..d].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let radius = 0.5 * cauchy;

    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            Complex64::from_polar(
                radius,
                2.0 * std::f64::consts::PI * k as f64 / d as f64 + INIT_ROTATION,
            )
        })
        .collect();

    let mut done = vec![false; d];
    for iteration in 0..ABERTH_BUDGET {
        let mut all_done = true;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (p, dp, _) = q.eval_derivatives(z[i]);
            // |p| at the level of its own rounding error: nothing left to gain
            if p.norm() <= 8.0 * f64::EPSILON * q.magnitude_at(z[i]) {
                done[i] = true;
                continue;
            }
            let newton = p / dp;
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let w = newton / (1.0 - newton * repulsion);
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(iteration);
            }
            z[i] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(1.0) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return Ok(z.into_iter().map(|t| t * scale).collect());
        }
    }
    // Accept if the residuals are already at rounding level.
    let ok = z.iter().all(|&t| q.relative_residual(t) < 1e-13);
    if ok {
        Ok(z.into_iter().map(|t| t * scale).collect())
    } else {
        Err(ABERTH_BUDGET)
    }
}

/// Enforce exact conjugate pairing for real polynomials.
fn symmetrise_conjugates(roots: &mut [Complex64]) {
    let n = roots.len();
    let mut paired = vec![false; n];
    for i in 0..n {
        if paired[i] {
            continue;
        }
        let z = roots[i];
        if z.im.abs() <= 1e-12 * z.norm().max(1.0) {
            roots[i] = Complex64::new(z.re, 0.0);
            paired[i] = true;
            continue;
        }
        let partner = (0..n)
            .filter(|&j| j != i && !paired[j])
            .min_by(|&a, &b| {
                (roots[a] - z.conj())
                    .norm()
                    .total_cmp(&(roots[b] - z.conj()).norm())
            });
        if let Some(j) = partner {
            if (roots[j] - z.conj()).norm() <= 1e-6 * z.norm().max(1.0) {
                let avg = 0.5 * (z + roots[j].conj());
                let upper = if avg.im > 0.0 { avg } else { avg.conj() };
                let (hi, lo) = if z.im > 0.0 { (i, j) } else { (j, i) };
                roots[hi] = upper;
                roots[lo] = upper.conj();
                paired[i] = true;
                paired[j] = true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn contains(set: &[Complex64], z: Complex64, tol: f64) -> bool {
        set.iter().any(|r| (r - z).norm() < tol)
    }

    #[test]
    fn cubic_with_zero_root() {
        let p = ComplexPolynomial::from_real(&[0.0, -2.0, 0.0, 0.0, 1.0]).unwrap();
        let rs = roots_all(&p).unwrap();
        assert_eq!(rs.roots.len(), 4);
        let r = 2f64.cbrt();
        assert!(contains(&rs.roots, c(0.0, 0.0), 1e-14));
        assert!(contains(&rs.roots, c(r, 0.0), 1e-13));
        let w = Complex64::from_polar(r, 2.0 * std::f64::consts::PI / 3.0);
        assert!(contains(&rs.roots, w, 1e-13));
        assert!(contains(&rs.roots, w.conj(), 1e-13));
        assert!(rs.residuals.iter().all(|&r| r < RESIDUAL_TOLERANCE));
    }

    #[test]
    fn imaginary_pair() {
        let p = ComplexPolynomial::from_real(&[1.0, 0.0, 1.0]).unwrap();
        let rs = roots_all(&p).unwrap();
        assert!(contains(&rs.roots, c(0.0, 1.0), 1e-14));
        assert!(contains(&rs.roots, c(0.0, -1.0), 1e-14));
    }

    #[test]
    fn double_root_is_flagged() {
        // (λ - 2)²(λ + 1)
        let p = ComplexPolynomial::from_real(&[4.0, 0.0, -3.0, 1.0]).unwrap();
        let rs = roots_all(&p).unwrap();
        assert_eq!(rs.clusters.len(), 1);
        let (i, j) = rs.clusters[0];
        assert!((rs.roots[i] - 2.0).norm() < 1e-7);
        assert!((rs.roots[j] - 2.0).norm() < 1e-7);
    }

    #[test]
    fn rejects_constants() {
        assert!(roots_all(&ComplexPolynomial::from_real(&[3.0]).unwrap()).is_err());
        assert!(ComplexPolynomial::from_real(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn display_is_readable() {
        let p = ComplexPolynomial::from_real(&[0.0, -2.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(p.to_string(), "1·λ^4 + -2·λ");
    }

    proptest! {
        #[test]
        fn roots_reproduce_monic_product(
            re in proptest::collection::vec(-5.0f64..5.0, 1..7),
            im in proptest::collection::vec(-5.0f64..5.0, 7),
        ) {
            let targets: Vec<Complex64> = re.iter().zip(&im).map(|(&a, &b)| c(a, b)).collect();
            let mut p = ComplexPolynomial::new(vec![c(1.0, 0.0)]).unwrap();
            for t in &targets {
                p = p.mul(&ComplexPolynomial::new(vec![-t, c(1.0, 0.0)]).unwrap());
            }
            // well-separated targets only
            let min_gap = targets.iter().enumerate().flat_map(|(i, a)| {
                targets[i + 1..].iter().map(move |b| (a - b).norm())
            }).fold(f64::INFINITY, f64::min);
            prop_assume!(min_gap > 0.1);
            let rs = roots_all(&p).unwrap();
            prop_assert_eq!(rs.roots.len(), targets.len());
            for t in &targets {
                prop_assert!(contains(&rs.roots, *t, 1e-7));
            }
        }

        #[test]
        fn real_polynomials_have_conjugate_closed_roots(
            coeffs in proptest::collection::vec(-10.0f64..10.0, 2..8),
        ) {
            prop_assume!(coeffs.last().unwrap().abs() > 0.1);
            let p = ComplexPolynomial::from_real(&coeffs).unwrap();
            if let Ok(rs) = roots_all(&p) {
                for z in &rs.roots {
                    prop_assert!(rs.roots.iter().any(|w| *w == z.conj()));
                }
            }
        }
    }
}
