//! Real spectra feeding the dispersion relations.
//!
//! `μ_k(n)` are the eigenvalues of the anharmonic oscillator
//! `S_n = -d²/dx² + x^{2n}` on the real line. They are computed on a truncated
//! interval `[-L, L]` with the standard three-point stencil, bisected with Sturm
//! sequences and extrapolated once in `h²` along a ladder of halved grid steps.

mod sturm;

pub use sturm::{eig_tridiagonal_lowest, SturmEigenvalues, TridiagonalMatrix};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{error::param, quadrature, Result};

/// Truncated finite-difference realisation of `S_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorSpec {
    /// Potential exponent is `2n`.
    pub n: u32,
    /// Half-width `L` of the truncation interval.
    pub half_width: f64,
    /// Interior grid points `N`.
    pub points: usize,
    /// Highest eigenvalue index requested.
    pub k_max: usize,
}

impl OscillatorSpec {
    pub fn new(n: u32, half_width: f64, points: usize, k_max: usize) -> Result<Self> {
        if n == 0 {
            return param("oscillator exponent n must be positive");
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return param(format!("half-width L must be positive, got {half_width}"));
        }
        if points < 3 {
            return param(format!("need at least 3 interior points, got {points}"));
        }
        if k_max >= points {
            return param(format!("k_max = {k_max} must be below N = {points}"));
        }
        Ok(Self {
            n,
            half_width,
            points,
            k_max,
        })
    }

    /// Spec on `[-L, L]` with `L` from [`truncation_half_width`] and the default grid.
    pub fn from_truncation_rule(n: u32, k_max: usize) -> Result<Self> {
        let half_width = truncation_half_width(n, k_max)?;
        let h = (0.01f64).min(half_width / 500.0);
        let points = (2.0 * half_width / h).ceil() as usize - 1;
        Self::new(n, half_width, points, k_max)
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.points as f64 + 1.0)
    }

    /// Grid node `x_i = -L + i h`, `i = 1..=N`.
    pub fn node(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.step()
    }

    /// Same interval with the grid step halved exactly.
    pub fn refined(&self) -> Self {
        Self {
            points: 2 * (self.points + 1) - 1,
            ..*self
        }
    }

    /// `L ≥ 2 μ̂^{1/(2n)}` for the Weyl estimate `μ̂` of the highest requested mode.
    pub fn satisfies_truncation_rule(&self) -> bool {
        turning_point(self.n, self.k_max)
            .map(|x| self.half_width >= 2.0 * x)
            .unwrap_or(false)
    }
}

fn turning_point(n: u32, k: usize) -> Result<f64> {
    // The plain Weyl law vanishes at k = 0; the next index bounds it from above.
    let mu = weyl_mu(n, k as u64 + 1)?;
    Ok(mu.powf(1.0 / (2.0 * n as f64)))
}

/// `L = max(2 μ̂^{1/(2n)}, 6)`.
pub fn truncation_half_width(n: u32, k_max: usize) -> Result<f64> {
    Ok((2.0 * turning_point(n, k_max)?).max(6.0))
}

/// Where a spectrum came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumSource {
    Oscillator(OscillatorSpec),
    DirichletInterval { half_width: f64 },
}

/// Sorted real eigenvalues with per-value error estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReal {
    pub values: Vec<f64>,
    pub error_bounds: Vec<f64>,
    pub source: SpectrumSource,
    /// `false` when the refinement budget ran out before every bound fell below tolerance.
    pub converged: bool,
}

/// Three-point finite-difference matrix of `-d²/dx² + x^{2n}` with Dirichlet ends.
pub fn build_oscillator_matrix(spec: &OscillatorSpec) -> Result<TridiagonalMatrix> {
    let spec = OscillatorSpec::new(spec.n, spec.half_width, spec.points, spec.k_max)?;
    let h = spec.step();
    let inv_h2 = 1.0 / (h * h);
    let exponent = 2 * spec.n as i32;
    let diagonal = (1..=spec.points)
        .map(|i| 2.0 * inv_h2 + spec.node(i).powi(exponent))
        .collect();
    TridiagonalMatrix::new(diagonal, vec![-inv_h2; spec.points - 1])
}

const MAX_LEVELS: usize = 6;

/// Bisection on the stencil resolves eigenvalues to about `ε·4/h²`; the
/// extrapolation amplifies that noise, so no bound is reported below it.
fn rounding_floor(h: f64) -> f64 {
    32.0 * f64::EPSILON / (h * h)
}

/// Lowest `k_max + 1` eigenvalues `μ_0(n) < … < μ_{k_max}(n)` to absolute tolerance `tol`.
///
/// Runs the grid ladder `h, h/2, h/4, …`, Richardson-extrapolates consecutive
/// levels and reports the change between successive extrapolants as the error
/// bound. If the ladder is exhausted the last extrapolants are returned with
/// `converged = false`.
pub fn anharmonic_eigenvalues(n: u32, k_max: usize, tol: f64) -> Result<SpectrumReal> {
    if !(tol > 0.0) {
        return param(format!("tolerance must be positive, got {tol}"));
    }
    let spec = OscillatorSpec::from_truncation_rule(n, k_max)?;
    anharmonic_eigenvalues_on(spec, tol)
}

/// As [`anharmonic_eigenvalues`] but starting from an explicit coarsest grid.
pub fn anharmonic_eigenvalues_on(coarse: OscillatorSpec, tol: f64) -> Result<SpectrumReal> {
    let count = coarse.k_max + 1;
    let raw_at = |spec: &OscillatorSpec| -> Result<Vec<f64>> {
        let m = build_oscillator_matrix(spec)?;
        eig_tridiagonal_lowest(&m, count)?.into_simple()
    };

    let mut spec = coarse;
    let mut previous_raw = raw_at(&spec)?;
    let mut previous_extrapolated: Option<Vec<f64>> = None;
    let mut best: Option<(Vec<f64>, Vec<f64>, OscillatorSpec)> = None;

    for _ in 1..MAX_LEVELS {
        spec = spec.refined();
        let raw = raw_at(&spec)?;
        let extrapolated: Vec<f64> = raw
            .iter()
            .zip(&previous_raw)
            .map(|(fine, coarse)| (4.0 * fine - coarse) / 3.0)
            .collect();
        if let Some(prev) = &previous_extrapolated {
            let floor = rounding_floor(spec.step());
            let bounds: Vec<f64> = extrapolated
                .iter()
                .zip(prev)
                .map(|(a, b)| (a - b).abs().max(floor))
                .collect();
            let done = bounds.iter().all(|&b| b < tol);
            best = Some((extrapolated.clone(), bounds, spec));
            if done {
                break;
            }
        }
        previous_extrapolated = Some(extrapolated);
        previous_raw = raw;
    }

    let (values, error_bounds, spec) = best.expect("ladder has at least three levels");
    let converged = error_bounds.iter().all(|&b| b < tol);
    Ok(SpectrumReal {
        values,
        error_bounds,
        source: SpectrumSource::Oscillator(spec),
        converged,
    })
}

/// Dirichlet eigenvalues of `-d²/dx²` on `(-ℓ, ℓ)`: `μ_k = (kπ/(2ℓ))²`, `k = 1..=k_max`.
pub fn dirichlet_interval_eigenvalues(ell: f64, k_max: usize) -> Result<SpectrumReal> {
    if !(ell > 0.0) || !ell.is_finite() {
        return param(format!("interval half-width must be positive, got {ell}"));
    }
    if k_max == 0 {
        return param("k_max must be at least 1");
    }
    let values = (1..=k_max).map(|k| dirichlet_mu(ell, k)).collect();
    Ok(SpectrumReal {
        values,
        error_bounds: vec![0.0; k_max],
        source: SpectrumSource::DirichletInterval { half_width: ell },
        converged: true,
    })
}

#[inline]
pub(crate) fn dirichlet_mu(ell: f64, k: usize) -> f64 {
    let w = k as f64 * PI / (2.0 * ell);
    w * w
}

/// `Σ_{2n} = ∫_{-1}^{1} (1 - x^{2n})^{1/2} dx` by tanh-sinh quadrature.
pub fn sigma_2n(n: u32) -> Result<f64> {
    if n == 0 {
        return param("n must be positive");
    }
    let two_n = 2.0 * n as f64;
    // 1 - x^{2n} evaluated as -expm1(2n ln x), with ln x = ln(1 - (1 - x)) near 1
    let r = quadrature::tanh_sinh(
        |x, _, right| {
            let ln_x = if x > 0.5 { (-right).ln_1p() } else { x.ln() };
            (-(two_n * ln_x).exp_m1()).max(0.0).sqrt()
        },
        0.0,
        1.0,
        1e-14,
    );
    Ok(2.0 * r.value)
}

/// Leading-order Weyl estimate of `μ_k(n)`; exact `2k + 1` for `n = 1`.
///
/// For `n ≥ 2` this is `(π/Σ_{2n})^{2n/(n+1)} k^{2n/(n+1)}`, an estimate without
/// an error bound, and `k` must be positive.
pub fn weyl_mu(n: u32, k: u64) -> Result<f64> {
    match n {
        0 => param("n must be positive"),
        1 => Ok(2.0 * k as f64 + 1.0),
        _ => {
            if k == 0 {
                return param("the Weyl estimate needs k ≥ 1 for n ≥ 2");
            }
            let p = 2.0 * n as f64 / (n as f64 + 1.0);
            Ok((PI / sigma_2n(n)?).powf(p) * (k as f64).powf(p))
        }
    }
}
