//! Characteristic equations for the non-real eigenvalues.
//!
//! On the line, with damping `x^{2n} + a₀` and potential `q₀`, `λ` is a
//! non-real eigenvalue exactly when `μ = -s(λ)(2λ)^{-1/(n+1)}` is an eigenvalue
//! of the oscillator `S_n`, where `s(λ) = λ² + 2a₀λ + q₀` and the root is the
//! principal branch. Raising to the power `n + 1` gives the polynomial
//! relation `s(λ)^{n+1} = 2λ(-μ)^{n+1}`, which is what gets solved here.
//! The strip `ℝ × (-ℓ, ℓ)` with damping `x² + a₀` separates into the same
//! relation for `n = 1` with `q₀` shifted by the transverse Dirichlet
//! eigenvalue `(jπ/(2ℓ))²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{
    error::param,
    oscillator::dirichlet_mu,
    poly::{roots_all, ComplexPolynomial, RootSet},
    Result,
};

/// Line problem: damping `x^{2n} + a0`, constant potential `q0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PencilParams {
    pub n: u32,
    pub a0: f64,
    pub q0: f64,
}

impl PencilParams {
    pub fn new(n: u32, a0: f64, q0: f64) -> Result<Self> {
        if n == 0 {
            return param("damping exponent n must be at least 1");
        }
        if !(a0 >= 0.0) || !a0.is_finite() {
            return param(format!("a0 must be a finite non-negative number, got {a0}"));
        }
        if !(q0 >= 0.0) || !q0.is_finite() {
            return param(format!("q0 must be a finite non-negative number, got {q0}"));
        }
        Ok(Self { n, a0, q0 })
    }
}

/// Strip problem `ℝ × (-ell, ell)` with damping `x² + a0` and potential `q0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripParams {
    pub ell: f64,
    pub a0: f64,
    pub q0: f64,
}

impl StripParams {
    pub fn new(ell: f64, a0: f64, q0: f64) -> Result<Self> {
        if !(ell > 0.0) || !ell.is_finite() {
            return param(format!("strip half-width must be positive, got {ell}"));
        }
        PencilParams::new(1, a0, q0)?;
        Ok(Self { ell, a0, q0 })
    }

    /// Transverse Dirichlet eigenvalue `(jπ/(2ℓ))²`.
    pub fn transverse(&self, j: u32) -> f64 {
        dirichlet_mu(self.ell, j as usize)
    }

    /// The separated one-dimensional line problem for transverse mode `j`.
    pub fn line_params(&self, j: u32) -> PencilParams {
        PencilParams {
            n: 1,
            a0: self.a0,
            q0: self.q0 + self.transverse(j),
        }
    }
}

/// Which problem a branch belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BranchParams {
    Line(PencilParams),
    Strip { params: StripParams, j: u32 },
}

impl BranchParams {
    fn line(&self) -> PencilParams {
        match *self {
            BranchParams::Line(p) => p,
            BranchParams::Strip { params, j } => params.line_params(j),
        }
    }

    fn a0(&self) -> f64 {
        self.line().a0
    }

    /// Lower bound of the potential used in the enclosure `|λ|² ≥ inf q`.
    fn q0(&self) -> f64 {
        match *self {
            BranchParams::Line(p) => p.q0,
            BranchParams::Strip { params, .. } => params.q0,
        }
    }
}

/// A non-real eigenvalue in the upper half-plane (its conjugate is implied).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueBranch {
    pub k: usize,
    pub lambda: Complex64,
    pub params: BranchParams,
    /// Oscillator eigenvalue the branch was computed from.
    pub mu: f64,
    /// `|p(λ)| / Σ|c_i||λ|^i` for the characteristic polynomial.
    pub residual: f64,
    /// The principal-branch relation `μ = -s(λ)(2λ)^{-1/(n+1)}` holds, not
    /// just its `(n+1)`-th power.
    pub principal_sheet: bool,
    /// Set once the grid pencil confirms the root.
    pub verified: bool,
}

fn quadratic_factor(a0: f64, q0: f64) -> Result<ComplexPolynomial> {
    ComplexPolynomial::from_real(&[q0, 2.0 * a0, 1.0])
}

/// `(λ² + 2a₀λ + q₀)^{n+1} - 2λ(-μ)^{n+1}` in monomial form.
pub fn line_char_poly(params: &PencilParams, mu: f64) -> Result<ComplexPolynomial> {
    let params = PencilParams::new(params.n, params.a0, params.q0)?;
    if !(mu > 0.0) || !mu.is_finite() {
        return param(format!("oscillator eigenvalue must be positive, got {mu}"));
    }
    let e = params.n + 1;
    let lhs = quadratic_factor(params.a0, params.q0)?.pow(e);
    let forcing = 2.0 * (-mu).powi(e as i32);
    let rhs = ComplexPolynomial::from_real(&[0.0, -forcing])?;
    lhs.add(&rhs)
}

/// `[λ² + (jπ/(2ℓ))² + 2a₀λ + q₀]² - 2λ(2k+1)²`.
pub fn strip_char_poly(params: &StripParams, j: u32, k: usize) -> Result<ComplexPolynomial> {
    let params = StripParams::new(params.ell, params.a0, params.q0)?;
    if j == 0 {
        return param("transverse index j starts at 1");
    }
    line_char_poly(&params.line_params(j), (2 * k + 1) as f64)
}

/// `-s(λ)·(2λ)^{-1/(n+1)}` on the principal branch.
pub fn implied_mu(params: &PencilParams, lambda: Complex64) -> Complex64 {
    let s = lambda * lambda + 2.0 * params.a0 * lambda + params.q0;
    -s * (2.0 * lambda).powf(-1.0 / (params.n as f64 + 1.0))
}

fn is_real_root(z: Complex64) -> bool {
    z.im.abs() <= 1e-12 * z.norm().max(1.0)
}

/// Filter roots to the physically admissible upper-left quadrant.
///
/// Keeps `Im λ > 0`, `Re λ ≤ 0`, then drops anything violating the necessary
/// enclosures `Re λ ≤ -a₀` and `|λ|² ≥ q₀`. Survivors are ordered by `Im λ`
/// ascending; when more than one remains for a single `μ`, all are reported
/// and [`EigenvalueBranch::principal_sheet`] tells them apart.
pub fn physical_roots(
    roots: &RootSet,
    params: BranchParams,
    k: usize,
    mu: f64,
    poly: &ComplexPolynomial,
) -> Vec<EigenvalueBranch> {
    let a0 = params.a0();
    let q0 = params.q0();
    let line = params.line();
    let mut out: Vec<EigenvalueBranch> = roots
        .roots
        .iter()
        .copied()
        .filter(|z| !is_real_root(*z) && z.im > 0.0 && z.re <= 0.0)
        .filter(|z| z.re <= -a0 && z.norm_sqr() >= q0)
        .map(|lambda| {
            let implied = implied_mu(&line, lambda);
            EigenvalueBranch {
                k,
                lambda,
                params,
                mu,
                residual: poly.eval(lambda).norm() / poly.magnitude_at(lambda),
                principal_sheet: (implied - mu).norm() <= 1e-6 * mu.max(1.0),
                verified: false,
            }
        })
        .collect();
    out.sort_by(|a, b| a.lambda.im.total_cmp(&b.lambda.im));
    out
}

/// Roots of the line relation for one oscillator eigenvalue, filtered.
pub fn line_branches(params: &PencilParams, k: usize, mu: f64) -> Result<Vec<EigenvalueBranch>> {
    let poly = line_char_poly(params, mu)?;
    let rs = roots_all(&poly)?;
    Ok(physical_roots(&rs, BranchParams::Line(*params), k, mu, &poly))
}

/// Roots of the strip relation for `(j, k)`, filtered.
pub fn strip_branches(params: &StripParams, j: u32, k: usize) -> Result<Vec<EigenvalueBranch>> {
    let poly = strip_char_poly(params, j, k)?;
    let rs = roots_all(&poly)?;
    Ok(physical_roots(
        &rs,
        BranchParams::Strip { params: *params, j },
        k,
        (2 * k + 1) as f64,
        &poly,
    ))
}

/// Leading-order seed `2^{1/(2n+1)} e^{iπ(n+1)/(2n+1)} μ^{(n+1)/(2n+1)} - 2(n+1)a₀/(2n+1)`.
pub fn asymptotic_lambda(n: u32, a0: f64, mu: f64) -> Result<Complex64> {
    PencilParams::new(n, a0, 0.0)?;
    if !(mu > 0.0) {
        return param(format!("oscillator eigenvalue must be positive, got {mu}"));
    }
    let nf = n as f64;
    let d = 2.0 * nf + 1.0;
    let modulus = 2f64.powf(1.0 / d) * mu.powf((nf + 1.0) / d);
    let ray = Complex64::from_polar(modulus, PI * (nf + 1.0) / d);
    Ok(ray - 2.0 * (nf + 1.0) / d * a0)
}

/// Eigenvalue of the damped Dirichlet problem on `(-ℓ, ℓ)` with constant damping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitEigenvalue {
    /// `-a₀ + i√(μ_k + q₀ - a₀²)`; the conjugate is implied.
    Complex { lambda: Complex64 },
    /// Both real solutions `-a₀ ± √(a₀² - μ_k - q₀)`, `minus ≤ plus`.
    RealPair { minus: f64, plus: f64 },
}

impl LimitEigenvalue {
    /// The representative values (one for complex, two for a real pair).
    pub fn values(&self) -> Vec<Complex64> {
        match *self {
            LimitEigenvalue::Complex { lambda } => vec![lambda],
            LimitEigenvalue::RealPair { minus, plus } => {
                vec![Complex64::new(minus, 0.0), Complex64::new(plus, 0.0)]
            }
        }
    }

    pub fn is_real_pair(&self) -> bool {
        matches!(self, LimitEigenvalue::RealPair { .. })
    }
}

/// `λ_k(∞, a₀, q₀)` from `λ² + 2a₀λ + μ_k + q₀ = 0` with `μ_k = (kπ/(2ℓ))²`.
pub fn limit_lambda(k: usize, a0: f64, q0: f64, ell: f64) -> Result<LimitEigenvalue> {
    if k == 0 {
        return param("limit modes are indexed from k = 1");
    }
    StripParams::new(ell, a0, q0)?;
    let m = dirichlet_mu(ell, k) + q0;
    let disc = m - a0 * a0;
    if disc > 0.0 {
        Ok(LimitEigenvalue::Complex {
            lambda: Complex64::new(-a0, disc.sqrt()),
        })
    } else {
        let r = (-disc).sqrt();
        Ok(LimitEigenvalue::RealPair {
            minus: -a0 - r,
            plus: -a0 + r,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn real_coeffs(p: &ComplexPolynomial) -> Vec<f64> {
        p.coefficients().iter().map(|c| c.re).collect()
    }

    fn assert_coeffs(p: &ComplexPolynomial, expected: &[f64]) {
        let got = real_coeffs(p);
        assert_eq!(got.len(), expected.len(), "{p}");
        for (g, e) in got.iter().zip(expected) {
            assert_abs_diff_eq!(g, e, epsilon = 1e-12 * e.abs().max(1.0));
        }
    }

    #[test]
    fn line_polynomials() {
        let p = line_char_poly(&PencilParams::new(1, 0.0, 0.0).unwrap(), 1.0).unwrap();
        assert_coeffs(&p, &[0.0, -2.0, 0.0, 0.0, 1.0]);
        // (λ² + 6λ)² - 2λ
        let p = line_char_poly(&PencilParams::new(1, 3.0, 0.0).unwrap(), 1.0).unwrap();
        assert_coeffs(&p, &[0.0, -2.0, 36.0, 12.0, 1.0]);
        // (λ² + 1)³ + 16λ
        let p = line_char_poly(&PencilParams::new(2, 0.0, 1.0).unwrap(), 2.0).unwrap();
        assert_coeffs(&p, &[1.0, 16.0, 3.0, 0.0, 3.0, 0.0, 1.0]);
        assert_eq!(p.degree(), 6);
    }

    #[test]
    fn strip_polynomials() {
        // (λ² + 1)² - 2λ
        let p = strip_char_poly(&StripParams::new(PI / 2.0, 0.0, 0.0).unwrap(), 1, 0).unwrap();
        assert_coeffs(&p, &[1.0, -2.0, 2.0, 0.0, 1.0]);
        // (λ² + 2λ + π²)² - 2λ
        let pi2 = PI * PI;
        let p = strip_char_poly(&StripParams::new(1.0, 1.0, 0.0).unwrap(), 2, 0).unwrap();
        assert_coeffs(&p, &[pi2 * pi2, 4.0 * pi2 - 2.0, 4.0 + 2.0 * pi2, 4.0, 1.0]);
        // (λ² + π²/4)² - 18λ
        let s = pi2 / 4.0;
        let p = strip_char_poly(&StripParams::new(1.0, 0.0, 0.0).unwrap(), 1, 1).unwrap();
        assert_coeffs(&p, &[s * s, -18.0, 2.0 * s, 0.0, 1.0]);
        assert!(strip_char_poly(&StripParams::new(1.0, 0.0, 0.0).unwrap(), 0, 1).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(PencilParams::new(0, 0.0, 0.0).is_err());
        assert!(PencilParams::new(1, -1.0, 0.0).is_err());
        assert!(PencilParams::new(1, 0.0, f64::NAN).is_err());
        assert!(StripParams::new(0.0, 0.0, 0.0).is_err());
        assert!(line_char_poly(&PencilParams::new(1, 0.0, 0.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn ground_branch_harmonic() {
        let b = line_branches(&PencilParams::new(1, 0.0, 0.0).unwrap(), 0, 1.0).unwrap();
        assert_eq!(b.len(), 1);
        assert_abs_diff_eq!(b[0].lambda.re, -0.629_960_524_947_436_6, epsilon = 1e-12);
        assert_abs_diff_eq!(b[0].lambda.im, 1.091_123_635_971_721_4, epsilon = 1e-12);
        assert!(b[0].principal_sheet);
    }

    #[test]
    fn filter_semantics() {
        let rs = RootSet {
            roots: vec![
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(1.0, 1.0),
            ],
            residuals: vec![0.0; 3],
            clusters: vec![],
        };
        let p = ComplexPolynomial::from_real(&[1.0, 0.0, 1.0]).unwrap();
        let params = BranchParams::Line(PencilParams::new(1, 0.0, 0.0).unwrap());
        let b = physical_roots(&rs, params, 0, 1.0, &p);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].lambda, Complex64::new(0.0, 1.0));
    }

    #[test]
    fn strip_enclosure_j5() {
        let params = StripParams::new(1.0, 1.0, 0.0).unwrap();
        let b = strip_branches(&params, 5, 0).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b[0].lambda.re <= -1.0);
        // the quartic has a second upper-half root with -1 < Re λ ≤ 0 that the enclosure removes
        let rs = roots_all(&strip_char_poly(&params, 5, 0).unwrap()).unwrap();
        assert!(rs
            .roots
            .iter()
            .any(|z| z.im > 0.0 && z.re > -1.0 && z.re <= 0.0));
    }

    #[test]
    fn seeds() {
        let s = asymptotic_lambda(1, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(s.re, -0.629_960_524_947_436_6, epsilon = 1e-12);
        assert_abs_diff_eq!(s.im, 1.091_123_635_971_721_4, epsilon = 1e-12);
        let shifted = asymptotic_lambda(1, 3.0, 1.0).unwrap();
        assert_abs_diff_eq!((shifted - (s - 4.0)).norm(), 0.0, epsilon = 1e-14);
        let k4 = asymptotic_lambda(1, 0.0, 9.0).unwrap();
        let expect = Complex64::from_polar(2f64.cbrt() * 9f64.powf(2.0 / 3.0), 2.0 * PI / 3.0);
        assert_abs_diff_eq!((k4 - expect).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn limits() {
        let LimitEigenvalue::Complex { lambda } = limit_lambda(1, 0.0, 0.0, 1.0).unwrap() else {
            panic!()
        };
        assert_abs_diff_eq!((lambda - Complex64::new(0.0, PI / 2.0)).norm(), 0.0, epsilon = 1e-15);
        let LimitEigenvalue::Complex { lambda } = limit_lambda(2, 0.0, 0.0, 1.0).unwrap() else {
            panic!()
        };
        assert_abs_diff_eq!((lambda - Complex64::new(0.0, PI)).norm(), 0.0, epsilon = 1e-15);
        let l = limit_lambda(1, 3.0, 0.0, 1.0).unwrap();
        let LimitEigenvalue::RealPair { minus, plus } = l else {
            panic!()
        };
        let r = (9.0 - PI * PI / 4.0).sqrt();
        assert_abs_diff_eq!(minus, -3.0 - r, epsilon = 1e-14);
        assert_abs_diff_eq!(plus, -3.0 + r, epsilon = 1e-14);
        for x in [minus, plus] {
            assert_abs_diff_eq!(x * x + 6.0 * x + PI * PI / 4.0, 0.0, epsilon = 1e-12);
        }
        assert!(limit_lambda(0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn degenerate_limit_is_double_real() {
        // μ_1 + q0 = a0² with ℓ = 1: a0 = π/2
        let l = limit_lambda(1, PI / 2.0, 0.0, 1.0).unwrap();
        match l {
            LimitEigenvalue::RealPair { minus, plus } => {
                assert_abs_diff_eq!(minus, -PI / 2.0, epsilon = 1e-7);
                assert_abs_diff_eq!(plus, -PI / 2.0, epsilon = 1e-7);
            }
            LimitEigenvalue::Complex { lambda } => {
                // rounding may leave a vanishing positive discriminant
                assert!(lambda.im < 1e-7);
            }
        }
    }
}
