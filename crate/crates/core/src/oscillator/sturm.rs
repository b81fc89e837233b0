//! Sturm-sequence bisection for symmetric tridiagonal matrices.

use serde::{Deserialize, Serialize};

use crate::{error::param, Error, Result};

/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalMatrix {
    pub diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
}

const PIVOT_GUARD: f64 = 1e-300;
const BISECTION_BUDGET: usize = 200;

impl TridiagonalMatrix {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() {
            return param("tridiagonal matrix must have at least one row");
        }
        if off_diagonal.len() + 1 != diagonal.len() {
            return param(format!(
                "off-diagonal length {} does not match dimension {}",
                off_diagonal.len(),
                diagonal.len()
            ));
        }
        Ok(Self {
            diagonal,
            off_diagonal,
        })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Number of eigenvalues strictly below `t` (negative pivots of `LDLᵀ` of `M - t`).
    pub fn count_below(&self, t: f64) -> usize {
        let d = &self.diagonal;
        let e = &self.off_diagonal;
        let mut count = 0;
        let mut q = d[0] - t;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..d.len() {
            let q_safe = if q.abs() < PIVOT_GUARD {
                PIVOT_GUARD.copysign(q)
            } else {
                q
            };
            q = (d[i] - t) - e[i - 1] * e[i - 1] / q_safe;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Union of the Gershgorin discs as an interval `[lo, hi]`.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        self.gershgorin_discs()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (c, r)| {
                (lo.min(c - r), hi.max(c + r))
            })
    }

    /// Centre and radius of every Gershgorin disc.
    pub fn gershgorin_discs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.dim();
        (0..n).map(move |i| {
            let left = if i > 0 { self.off_diagonal[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off_diagonal[i].abs() } else { 0.0 };
            (self.diagonal[i], left + right)
        })
    }
}

/// Lowest eigenvalues of a tridiagonal matrix, never merged.
#[derive(Debug, Clone, PartialEq)]
pub struct SturmEigenvalues {
    pub values: Vec<f64>,
    /// Indices `i` with `values[i + 1]` indistinguishable from `values[i]`
    /// at the bisection tolerance.
    pub degenerate: Vec<usize>,
}

impl SturmEigenvalues {
    /// Fails with [`Error::DegenerateBracket`] if any pair could not be separated.
    pub fn into_simple(self) -> Result<Vec<f64>> {
        if let Some(&i) = self.degenerate.first() {
            return Err(Error::DegenerateBracket {
                first: i,
                second: i + 1,
                value: self.values[i],
            });
        }
        Ok(self.values)
    }
}

#[inline]
fn bisection_tolerance(t: f64) -> f64 {
    1e-12 * t.abs().max(1.0)
}

fn bisect_index(m: &TridiagonalMatrix, index: usize, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..BISECTION_BUDGET {
        let mid = 0.5 * (a + b);
        if b - a < bisection_tolerance(mid) {
            return Ok(mid);
        }
        if m.count_below(mid) <= index {
            a = mid;
        } else {
            b = mid;
        }
    }
    Err(Error::BisectionBudget {
        index,
        budget: BISECTION_BUDGET,
    })
}

/// The `count` smallest eigenvalues, ascending.
///
/// Each index is bracketed independently from the Gershgorin interval, so
/// coincident eigenvalues come back as separate entries and are listed in
/// [`SturmEigenvalues::degenerate`].
pub fn eig_tridiagonal_lowest(m: &TridiagonalMatrix, count: usize) -> Result<SturmEigenvalues> {
    if count == 0 || count > m.dim() {
        return param(format!(
            "requested {count} eigenvalues of a {}x{} matrix",
            m.dim(),
            m.dim()
        ));
    }
    let (lo, hi) = m.gershgorin_bounds();
    let pad = 1e-9 * lo.abs().max(hi.abs()).max(1.0);
    let (lo, hi) = (lo - pad, hi + pad);

    #[cfg(feature = "parallel")]
    let values: Vec<f64> = {
        use rayon::prelude::*;
        (0..count)
            .into_par_iter()
            .map(|k| bisect_index(m, k, lo, hi))
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let values: Vec<f64> = (0..count)
        .map(|k| bisect_index(m, k, lo, hi))
        .collect::<Result<_>>()?;

    let degenerate = values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] - w[0] <= 2.0 * bisection_tolerance(w[0]))
        .map(|(i, _)| i)
        .collect();
    Ok(SturmEigenvalues { values, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn discrete_laplacian_3x3() {
        let m = TridiagonalMatrix::new(vec![2.0; 3], vec![-1.0; 2]).unwrap();
        let ev = eig_tridiagonal_lowest(&m, 3).unwrap().into_simple().unwrap();
        let s = 2f64.sqrt();
        assert_abs_diff_eq!(ev[0], 2.0 - s, epsilon = 1e-11);
        assert_abs_diff_eq!(ev[1], 2.0, epsilon = 1e-11);
        assert_abs_diff_eq!(ev[2], 2.0 + s, epsilon = 1e-11);
    }

    #[test]
    fn decoupled_diagonal_is_split_not_merged() {
        let m = TridiagonalMatrix::new(vec![5.0, 5.0], vec![0.0]).unwrap();
        let ev = eig_tridiagonal_lowest(&m, 2).unwrap();
        assert_eq!(ev.values.len(), 2);
        assert_abs_diff_eq!(ev.values[0], 5.0, epsilon = 1e-10);
        assert_abs_diff_eq!(ev.values[1], 5.0, epsilon = 1e-10);
        assert_eq!(ev.degenerate, vec![0]);
        assert!(matches!(
            ev.into_simple(),
            Err(Error::DegenerateBracket { first: 0, second: 1, .. })
        ));
    }

    #[test]
    fn rejects_bad_requests() {
        let m = TridiagonalMatrix::new(vec![1.0; 3], vec![0.5; 2]).unwrap();
        assert!(eig_tridiagonal_lowest(&m, 4).is_err());
        assert!(eig_tridiagonal_lowest(&m, 0).is_err());
        assert!(TridiagonalMatrix::new(vec![1.0; 3], vec![0.5; 3]).is_err());
    }

    fn matrix_strategy() -> impl Strategy<Value = TridiagonalMatrix> {
        (2usize..24).prop_flat_map(|n| {
            (
                proptest::collection::vec(-10.0f64..10.0, n),
                proptest::collection::vec(-3.0f64..3.0, n - 1),
            )
                .prop_map(|(d, e)| TridiagonalMatrix::new(d, e).unwrap())
        })
    }

    proptest! {
        #[test]
        fn sturm_count_is_monotone(m in matrix_strategy(), a in -20.0f64..20.0, b in -20.0f64..20.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(m.count_below(lo) <= m.count_below(hi));
        }

        #[test]
        fn eigenvalues_lie_in_gershgorin_union(m in matrix_strategy()) {
            let ev = eig_tridiagonal_lowest(&m, m.dim()).unwrap();
            for &v in &ev.values {
                let inside = m.gershgorin_discs().any(|(c, r)| (v - c).abs() <= r + 1e-9);
                prop_assert!(inside, "{v} outside every disc");
            }
            // trace is preserved
            let tr: f64 = m.diagonal.iter().sum();
            let sum: f64 = ev.values.iter().sum();
            prop_assert!((tr - sum).abs() < 1e-8 * (1.0 + tr.abs()));
        }
    }
}
