//! WKB singular sequences for the essential spectrum `(-∞, 0]`.
//!
//! For `λ < 0` write `q + 2λa + λ² = -A` (so `B ≡ 0`). With
//! `ρ_m = sup_{t>m} |A'(t)|/A(t)` the sequence
//! `φ_m(x) = ρ_m^{1/4} 𝜑(ρ_m^{1/2}x - m) exp(i∫ A^{1/2})` is supported on
//! `[m ρ_m^{-1/2}, (m+1) ρ_m^{-1/2}]` and `‖(-Δ - A)φ_m‖/‖∇φ_m‖ → 0`.
//! For `λ = 0` the cone sequence drops the phase and uses `ρ_m = sup_{|x|>m} q`.
//!
//! Ratios are measured two ways: on a grid with the three-point Laplacian
//! ([`build_quasimode`], [`residual_ratio`]) and from the exact continuum
//! integrals of the envelope ([`envelope_residual_ratio`]), which needs no
//! grid and stays cheap when the local wavelength becomes tiny.

use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{error::param, quadrature::gauss_legendre_composite, Error, Result};

type C64 = Complex64;

/// A real coefficient `a(x)` or `q(x)` on the half-line `x > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coefficient {
    /// `Σ c_i x^i`.
    Polynomial { coefficients: Vec<f64> },
    /// `scale / (1 + x²)`.
    Lorentzian { scale: f64 },
    /// Samples at `start + i·step`, linearly interpolated and held constant
    /// outside the sampled range.
    Sampled {
        start: f64,
        step: f64,
        values: Vec<f64>,
    },
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::Polynomial {
            coefficients: vec![0.0],
        }
    }

    pub fn constant(c: f64) -> Self {
        Coefficient::Polynomial {
            coefficients: vec![c],
        }
    }

    /// `x^{2n} + a0`.
    pub fn damping(n: u32, a0: f64) -> Self {
        let mut coefficients = vec![0.0; 2 * n as usize + 1];
        coefficients[0] = a0;
        coefficients[2 * n as usize] = 1.0;
        Coefficient::Polynomial { coefficients }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Coefficient::Polynomial { coefficients } => {
                !coefficients.is_empty() && coefficients.iter().all(|c| c.is_finite())
            }
            Coefficient::Lorentzian { scale } => scale.is_finite(),
            Coefficient::Sampled {
                start,
                step,
                values,
            } => {
                start.is_finite()
                    && *step > 0.0
                    && values.len() >= 2
                    && values.iter().all(|v| v.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            param(format!("malformed coefficient {self:?}"))
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Coefficient::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
            Coefficient::Lorentzian { scale } => scale / (1.0 + x * x),
            Coefficient::Sampled {
                start,
                step,
                values,
            } => {
                let t = (x - start) / step;
                if t <= 0.0 {
                    return values[0];
                }
                let i = t.floor() as usize;
                if i + 1 >= values.len() {
                    return values[values.len() - 1];
                }
                let f = t - i as f64;
                values[i] * (1.0 - f) + values[i + 1] * f
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Coefficient::Polynomial { coefficients } => coefficients
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, c)| acc * x + i as f64 * c),
            Coefficient::Lorentzian { scale } => -2.0 * scale * x / (1.0 + x * x).powi(2),
            Coefficient::Sampled {
                start,
                step,
                values,
            } => {
                let t = (x - start) / step;
                if t <= 0.0 || t >= (values.len() - 1) as f64 {
                    return 0.0;
                }
                let i = t.floor() as usize;
                (values[i + 1] - values[i]) / step
            }
        }
    }

    fn degree(&self) -> Option<usize> {
        match self {
            Coefficient::Polynomial { coefficients } => {
                Some(coefficients.iter().rposition(|c| *c != 0.0).unwrap_or(0))
            }
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Coefficient::Polynomial { coefficients } => coefficients.iter().all(|c| *c == 0.0),
            Coefficient::Lorentzian { scale } => *scale == 0.0,
            Coefficient::Sampled { values, .. } => values.iter().all(|v| *v == 0.0),
        }
    }

    /// `q(x) → 0` as `x → ∞`. Sampled data must end at zero.
    fn decays(&self) -> bool {
        match self {
            Coefficient::Polynomial { .. } => self.is_zero(),
            Coefficient::Lorentzian { .. } => true,
            Coefficient::Sampled { values, .. } => values[values.len() - 1] == 0.0,
        }
    }
}

/// `A(x) = -q(x) - 2λa(x) - λ²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub lambda: f64,
    pub a: Coefficient,
    pub q: Coefficient,
}

impl Amplitude {
    pub fn value(&self, x: f64) -> f64 {
        -self.q.value(x) - 2.0 * self.lambda * self.a.value(x) - self.lambda * self.lambda
    }

    pub fn derivative(&self, x: f64) -> f64 {
        -self.q.derivative(x) - 2.0 * self.lambda * self.a.derivative(x)
    }

    /// `|A'|/A`, infinite where `A ≤ 0`.
    pub fn log_slope(&self, x: f64) -> f64 {
        let v = self.value(x);
        if v > 0.0 {
            self.derivative(x).abs() / v
        } else {
            f64::INFINITY
        }
    }
}

/// Amplitude for `λ < 0` with `B ≡ 0`.
///
/// Requires `a` to grow without bound and `q = o(a)`; this is checked exactly
/// for polynomial coefficients and assumed for the others.
pub fn amplitude(lambda: f64, a: &Coefficient, q: &Coefficient) -> Result<Amplitude> {
    if !(lambda < 0.0) || !lambda.is_finite() {
        return param(format!(
            "amplitude needs λ < 0, got {lambda}; use cone_sequence for λ = 0"
        ));
    }
    a.validate()?;
    q.validate()?;
    if let Some(da) = a.degree() {
        let leading = match a {
            Coefficient::Polynomial { coefficients } => coefficients[da],
            _ => unreachable!(),
        };
        if da == 0 || leading <= 0.0 {
            return Err(Error::HypothesisViolated(
                "damping must grow to +∞".to_string(),
            ));
        }
        if let Some(dq) = q.degree() {
            if dq >= da && !q.is_zero() {
                return Err(Error::HypothesisViolated(
                    "potential must be o(a) at infinity".to_string(),
                ));
            }
        }
    }
    Ok(Amplitude {
        lambda,
        a: a.clone(),
        q: q.clone(),
    })
}

/// One member of a singular sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssentialProbe {
    pub amplitude: Amplitude,
    pub m: u32,
    pub rho: f64,
}

const RHO_SAMPLES: usize = 4096;

/// `sup_{t > m} f(t)` sampled on `[m, 10m]` (log-spaced, endpoint included).
fn sup_beyond(m: f64, f: impl Fn(f64) -> f64) -> f64 {
    let start = m.max(1e-12);
    let ratio = 10f64.ln() / (RHO_SAMPLES - 1) as f64;
    (0..RHO_SAMPLES)
        .map(|i| f(start * (ratio * i as f64).exp()))
        .fold(0.0, f64::max)
}

impl EssentialProbe {
    /// `ρ_m = sup_{t>m} |A'(t)|/A(t)`.
    pub fn new(amplitude: Amplitude, m: u32) -> Result<Self> {
        if m == 0 {
            return param("sequence index m starts at 1");
        }
        let rho = sup_beyond(m as f64, |t| amplitude.log_slope(t));
        if !rho.is_finite() {
            return Err(Error::WindowTooSmall { left: m as f64 });
        }
        if rho == 0.0 {
            return Err(Error::HypothesisViolated(
                "A is constant beyond m; supply ρ explicitly".to_string(),
            ));
        }
        Self::with_rho(amplitude, m, rho)
    }

    /// Probe with an explicitly chosen cutoff scale.
    pub fn with_rho(amplitude: Amplitude, m: u32, rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return param(format!("ρ must be positive, got {rho}"));
        }
        let probe = Self { amplitude, m, rho };
        let (l, r) = probe.support();
        let samples = 256;
        for i in 0..=samples {
            let x = l + (r - l) * i as f64 / samples as f64;
            if !(probe.amplitude.value(x) > 0.0) {
                return Err(Error::WindowTooSmall { left: l });
            }
        }
        Ok(probe)
    }

    /// `[m ρ^{-1/2}, (m+1) ρ^{-1/2}]`.
    pub fn support(&self) -> (f64, f64) {
        let w = self.rho.powf(-0.5);
        (self.m as f64 * w, (self.m as f64 + 1.0) * w)
    }

    /// `ρ^{1/4} 𝜑(ρ^{1/2}x - m)` and its first two derivatives.
    fn envelope(&self, x: f64) -> (f64, f64, f64) {
        let s = self.rho.sqrt();
        let (b, db, ddb) = bump(s * x - self.m as f64);
        let c = self.rho.powf(0.25);
        (c * b, c * s * db, c * s * s * ddb)
    }
}

/// `exp(-1/(t(1-t)))` on `(0, 1)` with two derivatives.
pub fn bump(t: f64) -> (f64, f64, f64) {
    if !(t > 0.0 && t < 1.0) {
        return (0.0, 0.0, 0.0);
    }
    let u = t * (1.0 - t);
    let g1 = (1.0 - 2.0 * t) / (u * u);
    let g2 = -2.0 / (u * u) - 2.0 * (1.0 - 2.0 * t).powi(2) / (u * u * u);
    let b = (-1.0 / u).exp();
    (b, g1 * b, (g2 + g1 * g1) * b)
}

/// Sampled quasimode; `values[i]` sits at `left + i·step` and vanishes at both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quasimode {
    /// Cutoff scale the sequence member was built with.
    pub rho: f64,
    pub left: f64,
    pub step: f64,
    pub values: Vec<C64>,
    pub residual_ratio: f64,
}

impl Quasimode {
    pub fn right(&self) -> f64 {
        self.left + self.step * (self.values.len() - 1) as f64
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.left + self.right())
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| self.left + self.step * i as f64)
    }

    /// `sqrt(h Σ |(φ_{i+1} - φ_i)/h|²)`.
    pub fn gradient_norm(&self) -> f64 {
        gradient_norm(&self.values, self.step, false)
    }
}

/// Largest sample count a quasimode grid may use.
pub const MAX_POINTS: usize = 1 << 23;

fn gradient_norm(v: &[C64], h: f64, periodic: bool) -> f64 {
    let n = v.len();
    let pairs = if periodic { n } else { n - 1 };
    let s: f64 = (0..pairs)
        .map(|i| (v[(i + 1) % n] - v[i]).norm_sqr())
        .sum();
    (s / h).sqrt()
}

/// `‖(-Δ_h - A)φ‖ / ‖∇_h φ‖` on a uniform grid. Without `periodic` the end
/// samples are boundary values and only interior rows enter the residual.
pub fn discrete_ratio(v: &[C64], amplitude: &[f64], h: f64, periodic: bool) -> f64 {
    let n = v.len();
    let inv_h2 = 1.0 / (h * h);
    let rows: Box<dyn Iterator<Item = usize>> = if periodic {
        Box::new(0..n)
    } else {
        Box::new(1..n - 1)
    };
    let mut s = 0.0;
    for i in rows {
        let prev = v[(i + n - 1) % n];
        let next = v[(i + 1) % n];
        let lap = (prev - 2.0 * v[i] + next) * inv_h2;
        s += (-lap - amplitude[i] * v[i]).norm_sqr();
    }
    (s * h).sqrt() / gradient_norm(v, h, periodic)
}

/// Grid step for a probe: 20 points per shortest wavelength, 400 across the
/// support, and small enough that the stencil's `k³h²/12` dispersion error
/// stays below 1% of the expected `ρ^{1/2}` ratio.
fn probe_step(probe: &EssentialProbe) -> f64 {
    let (l, r) = probe.support();
    let samples = 256;
    let a_max = (0..=samples)
        .map(|i| probe.amplitude.value(l + (r - l) * i as f64 / samples as f64))
        .fold(0.0, f64::max);
    let k = a_max.sqrt();
    let wavelength = 2.0 * std::f64::consts::PI / k;
    let eps = 0.01 * probe.rho.sqrt();
    let h_acc = (12.0 * eps / (k * k * k)).sqrt();
    (wavelength / 20.0).min((r - l) / 400.0).min(h_acc)
}

/// Sample `φ_m` on a grid fine enough for [`residual_ratio`] and normalise to
/// `‖∇_h φ‖ = 1`.
pub fn build_quasimode(probe: &EssentialProbe) -> Result<Quasimode> {
    let (l, r) = probe.support();
    let h_target = probe_step(probe);
    let intervals = ((r - l) / h_target).ceil();
    if !(intervals < MAX_POINTS as f64) {
        return Err(Error::UnderResolved {
            needed: intervals.min(usize::MAX as f64) as usize,
            limit: MAX_POINTS,
        });
    }
    let intervals = intervals as usize;
    let h = (r - l) / intervals as f64;
    let sqrt_a = |x: f64| probe.amplitude.value(x).max(0.0).sqrt();
    // phase by two-point Gauss-Legendre per interval, accumulated left to right
    let g = 0.5 / 3f64.sqrt();
    let mut phase = 0.0;
    let mut values = Vec::with_capacity(intervals + 1);
    for i in 0..=intervals {
        let x = l + h * i as f64;
        if i > 0 {
            let mid = x - 0.5 * h;
            phase += 0.5 * h * (sqrt_a(mid - g * h) + sqrt_a(mid + g * h));
        }
        let (f, _, _) = probe.envelope(x);
        values.push(C64::from_polar(f, phase));
    }
    let n = values.len();
    values[0] = C64::new(0.0, 0.0);
    values[n - 1] = C64::new(0.0, 0.0);
    let scale = gradient_norm(&values, h, false);
    values.iter_mut().for_each(|v| *v /= scale);
    let mut qm = Quasimode {
        rho: probe.rho,
        left: l,
        step: h,
        values,
        residual_ratio: 0.0,
    };
    qm.residual_ratio = residual_ratio(&qm, &probe.amplitude);
    Ok(qm)
}

/// `‖(-Δ_h - A)φ‖/‖∇_h φ‖` with `B ≡ 0`.
pub fn residual_ratio(qm: &Quasimode, amplitude: &Amplitude) -> f64 {
    let a: Vec<f64> = qm.nodes().map(|x| amplitude.value(x)).collect();
    discrete_ratio(&qm.values, &a, qm.step, false)
}

const ENVELOPE_PANELS: usize = 400;

/// Continuum ratio from the envelope `f`:
/// `(-Δ - A)(f e^{iS}) = -(f'' + i(2f'√A + fA'/(2√A))) e^{iS}` and
/// `|∇(f e^{iS})|² = f'² + f²A`.
pub fn envelope_residual_ratio(probe: &EssentialProbe) -> f64 {
    let (l, r) = probe.support();
    let amp = &probe.amplitude;
    let num = gauss_legendre_composite(
        |x| {
            let (f, df, ddf) = probe.envelope(x);
            let a = amp.value(x);
            let im = 2.0 * df * a.sqrt() + f * amp.derivative(x) / (2.0 * a.sqrt());
            ddf * ddf + im * im
        },
        l,
        r,
        ENVELOPE_PANELS,
    );
    let den = gauss_legendre_composite(
        |x| {
            let (f, df, _) = probe.envelope(x);
            df * df + f * f * amp.value(x)
        },
        l,
        r,
        ENVELOPE_PANELS,
    );
    (num / den).sqrt()
}

/// How a reported ratio was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioRoute {
    Grid,
    Envelope,
}

/// Summary of one probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub lambda: f64,
    pub m: u32,
    pub rho: f64,
    pub support: (f64, f64),
    /// Grid samples used, 0 when the grid route was skipped.
    pub points: usize,
    pub ratio: f64,
    pub route: RatioRoute,
    pub envelope_ratio: f64,
}

/// Probe every `m`: the grid ratio when the grid fits within
/// [`MAX_POINTS`], the envelope ratio otherwise.
pub fn probe_sequence(amplitude: &Amplitude, ms: &[u32]) -> Result<Vec<ProbeReport>> {
    let run = |&m: &u32| -> Result<ProbeReport> {
        let probe = EssentialProbe::new(amplitude.clone(), m)?;
        let envelope_ratio = envelope_residual_ratio(&probe);
        let (ratio, route, points) = match build_quasimode(&probe) {
            Ok(qm) => (qm.residual_ratio, RatioRoute::Grid, qm.values.len()),
            Err(Error::UnderResolved { .. }) => (envelope_ratio, RatioRoute::Envelope, 0),
            Err(e) => return Err(e),
        };
        Ok(ProbeReport {
            lambda: amplitude.lambda,
            m,
            rho: probe.rho,
            support: probe.support(),
            points,
            ratio,
            route,
            envelope_ratio,
        })
    };
    #[cfg(feature = "parallel")]
    let out: Vec<Result<ProbeReport>> = ms.par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let out: Vec<Result<ProbeReport>> = ms.iter().map(run).collect();
    out.into_iter().collect()
}

/// Points across the cone support.
const CONE_POINTS: usize = 4000;

/// Cone sequence for `λ = 0`: `φ_m(x) = ρ_m^{1/4} 𝜑(ρ_m^{1/2}x - m)` with
/// `ρ_m = sup_{x>m} |q|`, or `ρ_m = 1/m` when `q ≡ 0`.
///
/// Only the `x > 0` copy of the radial profile is sampled; the mirror image
/// doubles both norms and leaves the ratio unchanged. The ratio is
/// `‖(Δ_h - q)φ‖/‖∇_h φ‖`.
pub fn cone_sequence(q: &Coefficient, m: u32) -> Result<Quasimode> {
    q.validate()?;
    if m == 0 {
        return param("sequence index m starts at 1");
    }
    if !q.decays() {
        return Err(Error::HypothesisViolated(
            "cone sequence needs q(x) → 0".to_string(),
        ));
    }
    let rho = if q.is_zero() {
        1.0 / m as f64
    } else {
        sup_beyond(m as f64, |t| q.value(t).abs())
    };
    let w = rho.powf(-0.5);
    let (l, r) = (m as f64 * w, (m as f64 + 1.0) * w);
    let h = (r - l) / CONE_POINTS as f64;
    let c = rho.powf(0.25);
    let mut values: Vec<C64> = (0..=CONE_POINTS)
        .map(|i| C64::new(c * bump(rho.sqrt() * (l + h * i as f64) - m as f64).0, 0.0))
        .collect();
    let scale = gradient_norm(&values, h, false);
    values.iter_mut().for_each(|v| *v /= scale);
    // (Δ - q)φ = -(-Δ - (-q))φ, so the same ratio with amplitude -q
    let a: Vec<f64> = (0..=CONE_POINTS)
        .map(|i| -q.value(l + h * i as f64))
        .collect();
    let residual_ratio = discrete_ratio(&values, &a, h, false);
    Ok(Quasimode {
        rho,
        left: l,
        step: h,
        values,
        residual_ratio,
    })
}

/// Default sequence indices.
pub const DEFAULT_M: [u32; 4] = [10, 20, 40, 80];
