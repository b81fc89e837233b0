//! Eigenvalue branches `λ_k(n, a₀, q₀)` as the damping exponent `n` grows.
//!
//! As `n → ∞` the damping `x^{2n} + a₀` confines the problem to `(-1, 1)` with
//! constant damping `a₀`, whose eigenvalues are [`limit_lambda`] with `ℓ = 1`.
//! Limit index `k ≥ 1` pairs with oscillator index `k - 1`, since
//! `μ_{k-1}(n) → (kπ/2)²`; branches are matched by proximity only.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{
    dispersion::{limit_lambda, line_branches, LimitEigenvalue, PencilParams},
    error::param,
    oscillator::anharmonic_eigenvalues,
    Complex64, Result,
};

/// Whether a row's nearest root lies inside the matching radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchStatus {
    Matched,
    BranchLost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: u32,
    /// Oscillator index of the chosen root.
    pub oscillator_index: usize,
    pub mu: f64,
    pub lambda: Complex64,
    /// Distance to the nearest limit value.
    pub error: f64,
    pub status: MatchStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub k: usize,
    pub a0: f64,
    pub q0: f64,
    pub limit: LimitEigenvalue,
    pub matching_radius: f64,
    pub rows: Vec<ConvergenceRow>,
}

/// Default ladder of exponents.
pub const DEFAULT_N: [u32; 6] = [1, 2, 3, 4, 6, 8];

fn distance(limit: &LimitEigenvalue, z: Complex64) -> f64 {
    limit
        .values()
        .into_iter()
        .map(|v| (v - z).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Half the smallest distance from the `k`-th limit values to any other
/// limit value (the partner of a real pair included).
fn matching_radius(k: usize, a0: f64, q0: f64) -> Result<f64> {
    let own = limit_lambda(k, a0, q0, 1.0)?.values();
    let mut others = vec![];
    for j in (k.saturating_sub(1).max(1))..=k + 1 {
        let vals = limit_lambda(j, a0, q0, 1.0)?.values();
        others.extend(vals.into_iter().flat_map(|v| [v, v.conj()]));
    }
    let mut best = f64::INFINITY;
    for a in &own {
        for b in &others {
            let d = (a - b).norm();
            if d > 0.0 {
                best = best.min(d);
            }
        }
    }
    Ok(0.5 * best)
}

/// Follow branch `k` along `n_list`.
///
/// For each `n`, roots are taken from oscillator indices `0..=2k+1` and the
/// physical root nearest the limit is kept; it is flagged
/// [`MatchStatus::BranchLost`] when outside the matching radius.
pub fn lambda_branch(
    n_list: &[u32],
    k: usize,
    a0: f64,
    q0: f64,
    tol: f64,
) -> Result<ConvergenceTable> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return param("n_list must be non-empty and strictly ascending");
    }
    if !(tol > 0.0) {
        return param(format!("tolerance must be positive, got {tol}"));
    }
    let limit = limit_lambda(k, a0, q0, 1.0)?;
    let radius = matching_radius(k, a0, q0)?;
    let row = |&n: &u32| -> Result<ConvergenceRow> {
        let params = PencilParams::new(n, a0, q0)?;
        let spectrum = anharmonic_eigenvalues(n, 2 * k + 1, tol)?;
        let mut best: Option<ConvergenceRow> = None;
        for (i, &mu) in spectrum.values.iter().enumerate() {
            for b in line_branches(&params, i, mu)? {
                let error = distance(&limit, b.lambda);
                if best.as_ref().map_or(true, |r| error < r.error) {
                    best = Some(ConvergenceRow {
                        n,
                        oscillator_index: i,
                        mu,
                        lambda: b.lambda,
                        error,
                        status: if error <= radius {
                            MatchStatus::Matched
                        } else {
                            MatchStatus::BranchLost
                        },
                    });
                }
            }
        }
        best.ok_or_else(|| {
            crate::Error::HypothesisViolated(format!("no physical root at all for n = {n}"))
        })
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Result<ConvergenceRow>> = n_list.par_iter().map(row).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Result<ConvergenceRow>> = n_list.iter().map(row).collect();
    Ok(ConvergenceTable {
        k,
        a0,
        q0,
        limit,
        matching_radius: radius,
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactnessReport {
    pub verdict: bool,
    pub window: usize,
    /// `log(e_i / e_{i+1})` for consecutive rows.
    pub rates: Vec<f64>,
    /// Errors decrease at every step.
    pub monotone: bool,
    pub note: Option<String>,
}

/// True iff each of the trailing `window` errors is below the first error and
/// the last error is the smallest in the table.
pub fn verify_exactness(table: &ConvergenceTable, window: usize) -> ExactnessReport {
    let errors: Vec<f64> = table.rows.iter().map(|r| r.error).collect();
    exactness_of(&errors, window)
}

pub(crate) fn exactness_of(errors: &[f64], window: usize) -> ExactnessReport {
    let rates = errors.windows(2).map(|w| (w[0] / w[1]).ln()).collect();
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    if window == 0 || errors.len() < window + 1 {
        return ExactnessReport {
            verdict: false,
            window,
            rates,
            monotone,
            note: Some(format!(
                "need at least {} rows for window {window}, have {}",
                window + 1,
                errors.len()
            )),
        };
    }
    let first = errors[0];
    let last = errors[errors.len() - 1];
    let trailing = errors[errors.len() - window..].iter().all(|e| *e < first);
    let last_is_min = errors.iter().all(|e| last <= *e);
    ExactnessReport {
        verdict: trailing && last_is_min,
        window,
        rates,
        monotone,
        note: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactness_definition() {
        assert!(exactness_of(&[0.8, 0.5, 0.3, 0.2, 0.12], 3).verdict);
        assert!(!exactness_of(&[0.5, 0.5, 0.5], 2).verdict);
        let r = exactness_of(&[0.5, 0.4], 3);
        assert!(!r.verdict && r.note.is_some());
        // a late bump keeps the last error from being minimal
        assert!(!exactness_of(&[0.8, 0.1, 0.3], 2).verdict);
    }

    #[test]
    fn rates_are_log_ratios() {
        let r = exactness_of(&[1.0, 0.5, 0.25], 2);
        for rate in r.rates {
            assert!((rate - 2f64.ln()).abs() < 1e-15);
        }
        assert!(r.monotone);
    }

    #[test]
    fn radius_for_harmonic_limits() {
        let r = matching_radius(1, 0.0, 0.0).unwrap();
        assert!((r - std::f64::consts::PI / 4.0).abs() < 1e-15);
        assert!(lambda_branch(&[2, 1], 1, 0.0, 0.0, 1e-8).is_err());
    }
}
