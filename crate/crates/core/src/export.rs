//! Spectrum pipelines and plot-ready data.
//!
//! Eigenvalues are stored with `Im λ > 0`; export expands every point into its
//! conjugate pair. The essential spectrum `(-∞, 0]` is represented by the
//! segment from `(re_cut, 0)` to `(0, 0)`.

use serde::{Deserialize, Serialize};

use crate::{
    dispersion::{line_branches, strip_branches, EigenvalueBranch, PencilParams, StripParams},
    error::param,
    oscillator::anharmonic_eigenvalues,
    verify::verify_branches,
    Result,
};

/// Where the oscillator eigenvalues `μ_k` come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MuSource {
    /// `μ_k = 2k + 1`; only valid for `n = 1`.
    Exact,
    /// Grid eigenvalues to absolute tolerance `tol`.
    Numeric { tol: f64 },
}

pub const DEFAULT_MU_TOL: f64 = 1e-9;

impl Default for MuSource {
    fn default() -> Self {
        MuSource::Numeric {
            tol: DEFAULT_MU_TOL,
        }
    }
}

/// Non-real eigenvalues of the line problem for `k = 0..=k_max`.
pub fn line_spectrum(
    params: &PencilParams,
    k_max: usize,
    source: MuSource,
    verify: bool,
) -> Result<Vec<EigenvalueBranch>> {
    let params = PencilParams::new(params.n, params.a0, params.q0)?;
    let mus: Vec<f64> = match source {
        MuSource::Exact if params.n == 1 => (0..=k_max).map(|k| (2 * k + 1) as f64).collect(),
        MuSource::Exact => return param("exact μ_k = 2k+1 only holds for n = 1"),
        MuSource::Numeric { tol } => anharmonic_eigenvalues(params.n, k_max, tol)?.values,
    };
    let mut out = vec![];
    for (k, mu) in mus.into_iter().enumerate() {
        out.extend(line_branches(&params, k, mu)?);
    }
    if verify {
        verify_branches(&params, &mut out)?;
    }
    Ok(out)
}

/// Non-real eigenvalues of the strip problem for `j = 1..=j_max`, `k = 0..=k_max`.
/// Verification runs through the separated one-dimensional pencil of each `j`.
pub fn strip_spectrum(
    params: &StripParams,
    j_max: u32,
    k_max: usize,
    verify: bool,
) -> Result<Vec<EigenvalueBranch>> {
    let params = StripParams::new(params.ell, params.a0, params.q0)?;
    if j_max == 0 {
        return param("j_max must be at least 1");
    }
    let mut out = vec![];
    for j in 1..=j_max {
        let mut row = vec![];
        for k in 0..=k_max {
            row.extend(strip_branches(&params, j, k)?);
        }
        if verify {
            verify_branches(&params.line_params(j), &mut row)?;
        }
        out.extend(row);
    }
    Ok(out)
}

/// One exported eigenvalue (either member of a conjugate pair).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExportPoint {
    pub branch_index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<u32>,
    pub re_lambda: f64,
    pub im_lambda: f64,
    pub mu: f64,
    pub residual: f64,
    pub verified: bool,
}

/// `(re_cut, 0) → (0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssentialSegment {
    pub start: (f64, f64),
    pub end: (f64, f64),
}

pub const DEFAULT_RE_CUT: f64 = -10.0;

impl EssentialSegment {
    pub fn new(re_cut: f64) -> Result<Self> {
        if !(re_cut < 0.0) || !re_cut.is_finite() {
            return param(format!("re_cut must be negative, got {re_cut}"));
        }
        Ok(Self {
            start: (re_cut, 0.0),
            end: (0.0, 0.0),
        })
    }
}

/// Both members of each conjugate pair, `+Im` first.
pub fn expand_conjugates(branches: &[EigenvalueBranch]) -> Vec<ExportPoint> {
    branches
        .iter()
        .flat_map(|b| {
            let j = match b.params {
                crate::dispersion::BranchParams::Strip { j, .. } => Some(j),
                crate::dispersion::BranchParams::Line(_) => None,
            };
            let p = ExportPoint {
                branch_index: b.k,
                j,
                re_lambda: b.lambda.re,
                im_lambda: b.lambda.im,
                mu: b.mu,
                residual: b.residual,
                verified: b.verified,
            };
            [
                p,
                ExportPoint {
                    im_lambda: -p.im_lambda,
                    ..p
                },
            ]
        })
        .collect()
}

/// A labelled set of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub points: Vec<ExportPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureData {
    pub name: String,
    pub series: Vec<Series>,
    pub essential_segment: EssentialSegment,
}

/// Line spectrum for `n = 1`, `q₀ = 0`, `a₀ ∈ {0, 3}`, `k = 0..=k_max`.
pub fn figure_x2(k_max: usize, re_cut: f64, verify: bool) -> Result<FigureData> {
    let mut series = vec![];
    for a0 in [0.0, 3.0] {
        let params = PencilParams::new(1, a0, 0.0)?;
        let b = line_spectrum(&params, k_max, MuSource::Exact, verify)?;
        series.push(Series {
            label: format!("a0={a0}"),
            points: expand_conjugates(&b),
        });
    }
    Ok(FigureData {
        name: "fig-x2".to_string(),
        series,
        essential_segment: EssentialSegment::new(re_cut)?,
    })
}

/// Strip spectrum on `ℝ × (-ℓ, ℓ)` with damping `x² + a₀`, one series per `k`.
pub fn figure_strip(
    params: &StripParams,
    j_max: u32,
    k_max: usize,
    re_cut: f64,
    verify: bool,
) -> Result<FigureData> {
    let all = strip_spectrum(params, j_max, k_max, verify)?;
    let series = (0..=k_max)
        .map(|k| {
            let b: Vec<EigenvalueBranch> = all.iter().filter(|b| b.k == k).copied().collect();
            Series {
                label: format!("k={k}"),
                points: expand_conjugates(&b),
            }
        })
        .collect();
    Ok(FigureData {
        name: "fig-strip".to_string(),
        series,
        essential_segment: EssentialSegment::new(re_cut)?,
    })
}
