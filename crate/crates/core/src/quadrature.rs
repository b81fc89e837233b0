//! Quadrature rules shared by the oscillator and quasimode modules.

use std::f64::consts::FRAC_PI_2;

/// Nodes and weights of the 8-point Gauss–Legendre rule on `[-1, 1]`.
pub const GAUSS_LEGENDRE_8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

/// Two-point Gauss–Legendre rule on `[a, b]`.
#[inline]
pub fn gauss_legendre_2(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    let off = d / 3f64.sqrt();
    d * (f(c - off) + f(c + off))
}

/// Composite 8-point Gauss–Legendre rule with `panels` equal panels on `[a, b]`.
pub fn gauss_legendre_composite(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * width;
        let d = 0.5 * width;
        total += GAUSS_LEGENDRE_8
            .iter()
            .map(|&(x, w)| w * f(c + d * x))
            .sum::<f64>()
            * d;
    }
    total
}

/// Result of an adaptive double-exponential integration.
#[derive(Debug, Clone, Copy)]
pub struct TanhSinh {
    pub value: f64,
    /// Difference between the last two refinement levels.
    pub error_estimate: f64,
    pub levels: usize,
}

/// Double-exponential (tanh-sinh) quadrature on `[a, b]`.
///
/// The integrand receives `(x, left, right)` where `left = x - a` and
/// `right = b - x` are computed without cancellation, so integrands with
/// endpoint singularities in their derivatives can be evaluated accurately
/// right up to the boundary.
pub fn tanh_sinh(f: impl Fn(f64, f64, f64) -> f64, a: f64, b: f64, rel_tol: f64) -> TanhSinh {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    // Beyond this t the weights are below 1e-60.
    let t_max = 4.5;

    let node = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (cu * cu);
        // distance of tanh(u) from ±1, i.e. 1 - |tanh u|
        let comp = 1.0 / (u.abs().exp() * cu);
        let (x, left, right) = if u >= 0.0 {
            (mid + half * u.tanh(), half * (2.0 - comp), half * comp)
        } else {
            (mid + half * u.tanh(), half * comp, half * (2.0 - comp))
        };
        if left <= 0.0 || right <= 0.0 || !w.is_finite() {
            return 0.0;
        }
        w * f(x, left, right)
    };

    let mut h = 1.0;
    let mut sum = node(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        sum += node(t) + node(-t);
        k += 1;
    }
    let mut estimate = half * h * sum;
    let mut error_estimate = f64::INFINITY;
    let mut levels = 1;
    while levels < 12 {
        h *= 0.5;
        // odd multiples of the new step are the new nodes
        let mut k = 1;
        while k as f64 * h <= t_max {
            let t = k as f64 * h;
            sum += node(t) + node(-t);
            k += 2;
        }
        let next = half * h * sum;
        error_estimate = (next - estimate).abs();
        estimate = next;
        levels += 1;
        if error_estimate <= rel_tol * estimate.abs() && levels >= 4 {
            break;
        }
    }
    TanhSinh {
        value: estimate,
        error_estimate,
        levels,
    }
}
