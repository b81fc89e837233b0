//! Direct grid discretisation of the pencil `T(λ) = -d²/dx² + q₀ + 2λ(x^{2n} + a₀) + λ²`.
//!
//! Used to confirm the roots of the characteristic equations independently:
//! smallest singular values, nonlinear inverse iteration and the
//! argument-principle count `(1/2πi)∮ tr(T(λ)⁻¹T'(λ)) dλ`.

use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{
    banded::{BandLu, BandMatrix},
    dispersion::{EigenvalueBranch, PencilParams},
    error::param,
    oscillator::truncation_half_width,
    Error, Result,
};

type C64 = Complex64;

/// Uniform grid on `[left, right]` with `N` interior nodes and Dirichlet ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridDescriptor {
    pub left: f64,
    pub right: f64,
    pub points: usize,
    pub step: f64,
}

impl GridDescriptor {
    /// Interior node `i = 0..N`.
    pub fn node(&self, i: usize) -> f64 {
        self.left + (i + 1) as f64 * self.step
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.right - self.left)
    }
}

/// `T(λ) = A0 + λ A1 + λ² I` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPencil {
    pub params: PencilParams,
    pub grid: GridDescriptor,
    /// Diagonal of `A0`: `2/h² + q₀`.
    pub a0_diagonal: f64,
    /// Off-diagonal of `A0`: `-1/h²`.
    pub a0_off_diagonal: f64,
    /// Diagonal of `A1`: `2(x_i^{2n} + a₀)`.
    pub a1: Vec<f64>,
}

/// Build the grid pencil on `[-L, L]` with `N` interior points.
pub fn assemble(params: &PencilParams, half_width: f64, points: usize) -> Result<GridPencil> {
    if !(half_width > 0.0) || !half_width.is_finite() {
        return param(format!("half-width L must be positive, got {half_width}"));
    }
    assemble_window(params, -half_width, half_width, points)
}

/// Build the grid pencil on an arbitrary window `[left, right]`.
pub fn assemble_window(
    params: &PencilParams,
    left: f64,
    right: f64,
    points: usize,
) -> Result<GridPencil> {
    let params = PencilParams::new(params.n, params.a0, params.q0)?;
    if !left.is_finite() || !right.is_finite() || !(left < right) {
        return param(format!("invalid window [{left}, {right}]"));
    }
    if points < 3 {
        return param(format!("need at least 3 interior points, got {points}"));
    }
    let step = (right - left) / (points as f64 + 1.0);
    let grid = GridDescriptor {
        left,
        right,
        points,
        step,
    };
    let e = 2 * params.n as i32;
    let a1 = (0..points)
        .map(|i| 2.0 * (grid.node(i).powi(e) + params.a0))
        .collect();
    Ok(GridPencil {
        params,
        grid,
        a0_diagonal: 2.0 / (step * step) + params.q0,
        a0_off_diagonal: -1.0 / (step * step),
        a1,
    })
}

/// Grid sized for eigenvalue indices `0..=k_max`: the oscillator truncation
/// rule for `L` and `h = min(0.01, L/500)`.
pub fn assemble_for_modes(params: &PencilParams, k_max: usize) -> Result<GridPencil> {
    let half_width = truncation_half_width(params.n, k_max)?;
    let h = 0.01f64.min(half_width / 500.0);
    let points = (2.0 * half_width / h).round() as usize - 1;
    assemble(params, half_width, points)
}

impl GridPencil {
    pub fn dim(&self) -> usize {
        self.grid.points
    }

    fn diagonal(&self, i: usize, lambda: C64) -> C64 {
        lambda * lambda + lambda * self.a1[i] + self.a0_diagonal
    }

    fn derivative_diagonal(&self, i: usize, lambda: C64) -> C64 {
        2.0 * lambda + self.a1[i]
    }

    /// `T(λ)` as a band matrix.
    pub fn matrix(&self, lambda: C64) -> BandMatrix {
        let n = self.dim();
        let diag: Vec<C64> = (0..n).map(|i| self.diagonal(i, lambda)).collect();
        let off = vec![C64::new(self.a0_off_diagonal, 0.0); n - 1];
        BandMatrix::tridiagonal(&off, &diag, &off).expect("dimensions are consistent")
    }

    /// `T(λ) v` without forming the matrix.
    pub fn apply(&self, lambda: C64, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        let b = self.a0_off_diagonal;
        (0..n)
            .map(|i| {
                let mut s = self.diagonal(i, lambda) * v[i];
                if i > 0 {
                    s += b * v[i - 1];
                }
                if i + 1 < n {
                    s += b * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// `‖T(λ)‖_∞`.
    pub fn norm_inf(&self, lambda: C64) -> f64 {
        (0..self.dim())
            .map(|i| self.diagonal(i, lambda).norm() + 2.0 * self.a0_off_diagonal.abs())
            .fold(0.0, f64::max)
    }

    fn factor(&self, lambda: C64) -> Result<BandLu> {
        self.matrix(lambda).factor()
    }
}

/// Magnitude used to judge whether `σ_min(T(λ))` is small: `1 + |λ|²`.
pub fn sigma_scale(lambda: C64) -> f64 {
    1.0 + lambda.norm_sqr()
}

fn check_off_axis(lambda: C64) -> Result<()> {
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return param(format!("λ must be finite, got {lambda}"));
    }
    if lambda.im == 0.0 && lambda.re <= 0.0 {
        return param(format!("λ = {lambda} lies on (-∞, 0]"));
    }
    Ok(())
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalise(v: &mut [C64]) {
    let s = norm(v);
    v.iter_mut().for_each(|z| *z /= s);
}

/// Real deterministic start vector with even and odd parts of similar size
/// (the grid is symmetric, so both parities have to be present).
fn start_vector(n: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..n)
        .map(|i| {
            let t = i as f64;
            let ramp = 2.0 * t / n as f64 - 1.0;
            C64::new(1.0 + ramp + 0.5 * (0.7 * t + 0.3).sin() + 0.25 * (2.3 * t).cos(), 0.0)
        })
        .collect();
    normalise(&mut v);
    v
}

/// Smallest singular value estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaMin {
    pub value: f64,
    /// The factorisation hit an exactly zero pivot; `value` is then 0.
    pub exact_singular: bool,
    pub iterations: usize,
}

const SIGMA_BUDGET: usize = 500;
const SIGMA_TOL: f64 = 1e-10;

/// `σ_min(T(λ))` by inverse iteration on `T*T`, reported as `‖Tx‖/‖x‖`.
pub fn smallest_singular_value(p: &GridPencil, lambda: C64) -> Result<SigmaMin> {
    check_off_axis(lambda)?;
    let lu = match p.factor(lambda) {
        Ok(lu) => lu,
        Err(Error::ExactlySingular { .. }) => {
            return Ok(SigmaMin {
                value: 0.0,
                exact_singular: true,
                iterations: 0,
            })
        }
        Err(e) => return Err(e),
    };
    let mut x = start_vector(p.dim());
    let mut estimate = f64::INFINITY;
    // ‖Tx‖ is only known to about ε‖T‖ near a singular point
    let floor = 8.0 * f64::EPSILON * p.norm_inf(lambda);
    for it in 1..=SIGMA_BUDGET {
        lu.solve_adjoint_in_place(&mut x);
        lu.solve_in_place(&mut x);
        normalise(&mut x);
        let next = norm(&p.apply(lambda, &x));
        if (estimate - next).abs() <= SIGMA_TOL * next + floor {
            return Ok(SigmaMin {
                value: next,
                exact_singular: false,
                iterations: it,
            });
        }
        estimate = next;
    }
    Err(Error::InverseIteration {
        iterations: SIGMA_BUDGET,
        estimate,
    })
}

/// Rectangle in the complex plane for argument-principle counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    /// Trapezoid nodes per side.
    pub quad_points: usize,
}

pub const DEFAULT_QUAD_POINTS: usize = 64;
const MAX_QUAD_POINTS: usize = 4096;

impl ContourSpec {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        Self::with_points(re_min, re_max, im_min, im_max, DEFAULT_QUAD_POINTS)
    }

    pub fn with_points(
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
        quad_points: usize,
    ) -> Result<Self> {
        let bounds = [re_min, re_max, im_min, im_max];
        if bounds.iter().any(|b| !b.is_finite()) || !(re_min < re_max) || !(im_min < im_max) {
            return param(format!("degenerate rectangle {bounds:?}"));
        }
        if !(im_min > 0.0 || im_max < 0.0 || re_min > 0.0) {
            return param("contour rectangle must not meet the half-line (-∞, 0]");
        }
        if quad_points < 4 {
            return param("need at least 4 quadrature points per side");
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
            quad_points,
        })
    }

    pub fn contains(&self, z: C64) -> bool {
        (self.re_min..=self.re_max).contains(&z.re) && (self.im_min..=self.im_max).contains(&z.im)
    }

    fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re_min, self.im_min),
            C64::new(self.re_max, self.im_min),
            C64::new(self.re_max, self.im_max),
            C64::new(self.re_min, self.im_max),
        ]
    }

    /// Counter-clockwise nodes and trapezoid weights `dz`.
    fn nodes(&self) -> Vec<(C64, C64)> {
        let m = self.quad_points;
        let c = self.corners();
        let mut out = Vec::with_capacity(4 * m);
        for s in 0..4 {
            let (a, b) = (c[s], c[(s + 1) % 4]);
            let dz = (b - a) / m as f64;
            // corners are shared by two sides and carry half a weight from each
            for i in 0..m {
                out.push((a + dz * i as f64, dz));
            }
        }
        out
    }
}

/// `tr(T(λ)⁻¹T'(λ))` from the unpivoted continuant ratios `r_i = θ_i/θ_{i-1}`:
/// `d/dλ log det T = Σ r_i'/r_i`. `None` if a ratio is too small to trust.
fn trace_continuant(p: &GridPencil, lambda: C64) -> Option<C64> {
    let b2 = p.a0_off_diagonal * p.a0_off_diagonal;
    let guard = 1e-8 * p.a0_off_diagonal.abs();
    let mut r = C64::new(0.0, 0.0);
    let mut dr = C64::new(0.0, 0.0);
    let mut sum = C64::new(0.0, 0.0);
    for i in 0..p.dim() {
        let d = p.diagonal(i, lambda);
        let dd = p.derivative_diagonal(i, lambda);
        let (nr, ndr) = if i == 0 {
            (d, dd)
        } else {
            (d - b2 / r, dd + b2 * dr / (r * r))
        };
        if !(nr.norm() > guard) {
            return None;
        }
        r = nr;
        dr = ndr;
        sum += dr / r;
    }
    Some(sum)
}

/// `tr(T(λ)⁻¹T'(λ))` column by column through a pivoted banded LU.
pub fn trace_columnwise(p: &GridPencil, lambda: C64) -> Result<C64> {
    let lu = p.factor(lambda)?;
    let n = p.dim();
    let mut e = vec![C64::new(0.0, 0.0); n];
    let mut sum = C64::new(0.0, 0.0);
    for i in 0..n {
        e.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        e[i] = C64::new(1.0, 0.0);
        lu.solve_in_place(&mut e);
        sum += e[i] * p.derivative_diagonal(i, lambda);
    }
    Ok(sum)
}

/// `tr(T(λ)⁻¹T'(λ))`, exact up to rounding.
pub fn trace_log_derivative(p: &GridPencil, lambda: C64) -> Result<C64> {
    match trace_continuant(p, lambda) {
        Some(t) => Ok(t),
        None => trace_columnwise(p, lambda),
    }
}

/// Contour value before rounding.
pub fn contour_integral(p: &GridPencil, c: &ContourSpec) -> Result<C64> {
    let nodes = c.nodes();
    let eval = |&(z, dz): &(C64, C64)| -> Result<C64> {
        match trace_log_derivative(p, z) {
            Ok(t) => Ok(t * dz),
            Err(Error::ExactlySingular { .. }) => Err(Error::ContourHitsSpectrum { node: z }),
            Err(e) => Err(e),
        }
    };
    #[cfg(feature = "parallel")]
    let terms: Vec<Result<C64>> = nodes.par_iter().map(eval).collect();
    #[cfg(not(feature = "parallel"))]
    let terms: Vec<Result<C64>> = nodes.iter().map(eval).collect();
    let mut sum = C64::new(0.0, 0.0);
    for t in terms {
        sum += t?;
    }
    Ok(sum / C64::new(0.0, 2.0 * std::f64::consts::PI))
}

/// Number of eigenvalues of the grid pencil inside the rectangle.
///
/// Starts at `c.quad_points` nodes per side and doubles while the value is
/// further than 0.2 from an integer.
pub fn count_eigs_contour(p: &GridPencil, c: &ContourSpec) -> Result<i64> {
    let mut spec = *c;
    loop {
        let value = contour_integral(p, &spec)?;
        let nearest = value.re.round();
        if (value - nearest).norm() <= 0.2 {
            return Ok(nearest as i64);
        }
        if spec.quad_points * 2 > MAX_QUAD_POINTS {
            return Err(Error::ContourInaccurate { value: value.re });
        }
        spec.quad_points *= 2;
    }
}

/// Result of [`refine_eig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinedEig {
    pub lambda: C64,
    /// `‖T(λ)v‖ / (‖T(λ)‖_∞ ‖v‖)`.
    pub residual: f64,
    pub iterations: usize,
}

const REFINE_BUDGET: usize = 60;

/// Root of `vᵀT(λ)v = 0` nearest `current`, ties toward `Im λ > 0`.
fn rayleigh_functional(p: &GridPencil, v: &[C64], current: C64) -> Option<C64> {
    let n = v.len();
    let mut a = C64::new(0.0, 0.0);
    let mut b = C64::new(0.0, 0.0);
    let mut c = C64::new(0.0, 0.0);
    for i in 0..n {
        let vi2 = v[i] * v[i];
        a += vi2;
        b += vi2 * p.a1[i];
        let mut w = p.a0_diagonal * v[i];
        if i > 0 {
            w += p.a0_off_diagonal * v[i - 1];
        }
        if i + 1 < n {
            w += p.a0_off_diagonal * v[i + 1];
        }
        c += v[i] * w;
    }
    if a.norm() == 0.0 {
        return None;
    }
    let disc = (b * b - 4.0 * a * c).sqrt();
    // cancellation-free pair
    let q = if (b.conj() * disc).re >= 0.0 {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    if q.norm() == 0.0 {
        return Some(C64::new(0.0, 0.0));
    }
    let r1 = q / a;
    let r2 = c / q;
    let (d1, d2) = ((r1 - current).norm(), (r2 - current).norm());
    Some(if d1 < d2 || (d1 == d2 && r1.im >= r2.im) {
        r1
    } else {
        r2
    })
}

/// Nonlinear inverse iteration with the Rayleigh functional.
///
/// `T` is complex symmetric, so the bilinear form `vᵀT(λ)v` (no conjugation)
/// is the stationary functional. Leaving the basin (moving further than
/// `0.5 max(1, |λ₀|)` from the seed or into `Re λ > 0`) is reported as
/// [`Error::OutOfBasin`].
pub fn refine_eig(p: &GridPencil, lambda0: C64, tol: f64) -> Result<RefinedEig> {
    check_off_axis(lambda0)?;
    if !(tol > 0.0) {
        return param(format!("tolerance must be positive, got {tol}"));
    }
    let radius = 0.5 * lambda0.norm().max(1.0);
    let mut lambda = lambda0;
    let mut v = start_vector(p.dim());
    let mut residual = f64::INFINITY;
    for it in 1..=REFINE_BUDGET {
        let out_of_basin = |lambda: C64, residual| {
            if lambda.re > 0.0 || (lambda - lambda0).norm() > radius {
                Err(Error::OutOfBasin {
                    last: lambda,
                    residual,
                })
            } else {
                Ok(())
            }
        };
        match p.factor(lambda) {
            Ok(lu) => lu.solve_in_place(&mut v),
            Err(Error::ExactlySingular { .. }) => {
                return Ok(RefinedEig {
                    lambda,
                    residual: 0.0,
                    iterations: it,
                })
            }
            Err(e) => return Err(e),
        }
        normalise(&mut v);
        lambda = rayleigh_functional(p, &v, lambda).ok_or(Error::RefineNoConvergence {
            last: lambda,
            residual,
        })?;
        residual = norm(&p.apply(lambda, &v)) / p.norm_inf(lambda);
        out_of_basin(lambda, residual)?;
        if residual < tol {
            return Ok(RefinedEig {
                lambda,
                residual,
                iterations: it,
            });
        }
    }
    Err(Error::RefineNoConvergence {
        last: lambda,
        residual,
    })
}

/// Relative distance within which a refined grid eigenvalue confirms a root.
pub const AGREEMENT_TOLERANCE: f64 = 1e-3;
/// Residual target used when confirming roots.
pub const REFINE_TOLERANCE: f64 = 1e-12;

/// Refine every branch on a grid sized for the largest index present and set
/// `verified` when the grid eigenvalue lies within
/// `AGREEMENT_TOLERANCE · max(1, |λ|)` of the root.
///
/// All branches must share one line pencil. Iteration failures leave the
/// branch unverified rather than failing the batch.
pub fn verify_branches(params: &PencilParams, branches: &mut [EigenvalueBranch]) -> Result<()> {
    let Some(k_max) = branches.iter().map(|b| b.k).max() else {
        return Ok(());
    };
    let p = assemble_for_modes(params, k_max)?;
    let check = |b: &EigenvalueBranch| match refine_eig(&p, b.lambda, REFINE_TOLERANCE) {
        Ok(r) => (r.lambda - b.lambda).norm() <= AGREEMENT_TOLERANCE * b.lambda.norm().max(1.0),
        Err(_) => false,
    };
    #[cfg(feature = "parallel")]
    let flags: Vec<bool> = branches.par_iter().map(check).collect();
    #[cfg(not(feature = "parallel"))]
    let flags: Vec<bool> = branches.iter().map(check).collect();
    for (b, ok) in branches.iter_mut().zip(flags) {
        b.verified = ok;
    }
    Ok(())
}
