//! Complex banded LU factorisation with partial pivoting.
//!
//! Row `i` of the band store keeps columns `i - kl ..= i + kl + ku`, the extra
//! `kl` super-diagonals holding fill-in from row interchanges. Multipliers are
//! kept per elimination step and interchanges are not applied to earlier
//! columns, so `L` is the product `P₀ L₀ P₁ L₁ …` as in LAPACK `gbtrf`.

use num_complex::Complex64;

use crate::{error::param, Error, Result};

type C64 = Complex64;

/// Square banded matrix with `kl` sub- and `ku` super-diagonals.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// row-major, `width = 2 kl + ku + 1` entries per row
    data: Vec<C64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            data: vec![C64::new(0.0, 0.0); n * width],
        }
    }

    /// Tridiagonal matrix from its three diagonals.
    pub fn tridiagonal(lower: &[C64], diag: &[C64], upper: &[C64]) -> Result<Self> {
        let n = diag.len();
        if n == 0 || lower.len() + 1 != n || upper.len() + 1 != n {
            return param("inconsistent tridiagonal dimensions");
        }
        let mut m = Self::zeros(n, 1, 1);
        for i in 0..n {
            m.set(i, i, diag[i]);
            if i + 1 < n {
                m.set(i + 1, i, lower[i]);
                m.set(i, i + 1, upper[i]);
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn width(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> Option<usize> {
        let shift = j as isize - i as isize + self.kl as isize;
        if shift < 0 || shift as usize >= self.width() {
            None
        } else {
            Some(i * self.width() + shift as usize)
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.offset(i, j)
            .map(|o| self.data[o])
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Panics if `(i, j)` lies outside the stored band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        let o = self.offset(i, j).expect("entry outside the band");
        self.data[o] = v;
    }

    fn col_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    /// `y = A x` using the original (unfactored) band.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| self.col_range(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.col_range(i).map(|j| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let mut pivots = Vec::with_capacity(n);
        let mut multipliers = vec![C64::new(0.0, 0.0); n * kl.max(1)];
        let mut singular = None;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let p = (k..=last_row)
                .max_by(|&a, &b| self.get(a, k).norm().total_cmp(&self.get(b, k).norm()))
                .unwrap();
            pivots.push(p);
            let last_col = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let a = self.get(k, j);
                    let b = self.get(p, j);
                    self.set(k, j, b);
                    self.set(p, j, a);
                }
            }
            let pivot = self.get(k, k);
            if pivot.norm() == 0.0 {
                singular.get_or_insert(k);
                continue;
            }
            for i in k + 1..=last_row {
                let m = self.get(i, k) / pivot;
                multipliers[k * kl.max(1) + (i - k - 1)] = m;
                if m.norm() == 0.0 {
                    continue;
                }
                self.set(i, k, C64::new(0.0, 0.0));
                for j in k + 1..=last_col {
                    let v = self.get(i, j) - m * self.get(k, j);
                    self.set(i, j, v);
                }
            }
        }
        if let Some(pivot) = singular {
            return Err(Error::ExactlySingular { pivot });
        }
        Ok(BandLu {
            u: self,
            pivots,
            multipliers,
        })
    }
}

/// Factorisation produced by [`BandMatrix::factor`].
#[derive(Debug, Clone)]
pub struct BandLu {
    u: BandMatrix,
    pivots: Vec<usize>,
    multipliers: Vec<C64>,
}

impl BandLu {
    fn mult(&self, k: usize, i: usize) -> C64 {
        self.multipliers[k * self.u.kl.max(1) + (i - k - 1)]
    }

    fn u_cols(&self, k: usize) -> std::ops::RangeInclusive<usize> {
        k..=(k + self.u.kl + self.u.ku).min(self.u.n - 1)
    }

    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.u.n;
        let kl = self.u.kl;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                b[i] -= self.mult(k, i) * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in self.u_cols(k).skip(1) {
                s -= self.u.get(k, j) * b[j];
            }
            b[k] = s / self.u.get(k, k);
        }
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solve `Aᴴ x = b` in place.
    pub fn solve_adjoint_in_place(&self, b: &mut [C64]) {
        let n = self.u.n;
        let kl = self.u.kl;
        // Uᴴ y = b, forward
        for k in 0..n {
            let mut s = b[k];
            for j in k.saturating_sub(kl + self.u.ku)..k {
                s -= self.u.get(j, k).conj() * b[j];
            }
            b[k] = s / self.u.get(k, k).conj();
        }
        // apply (P_k L_k)ᴴ in reverse order
        for k in (0..n).rev() {
            let mut s = b[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                s -= self.mult(k, i).conj() * b[i];
            }
            b[k] = s;
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
        }
    }

    /// `log|det A|` and the phase of `det A`.
    pub fn log_det(&self) -> (f64, C64) {
        let mut log_abs = 0.0;
        let mut phase = C64::new(1.0, 0.0);
        for k in 0..self.u.n {
            let d = self.u.get(k, k);
            log_abs += d.norm().ln();
            phase *= d / d.norm();
            if self.pivots[k] != k {
                phase = -phase;
            }
        }
        (log_abs, phase)
    }

    /// Smallest pivot modulus, a cheap conditioning indicator.
    pub fn min_pivot(&self) -> f64 {
        (0..self.u.n)
            .map(|k| self.u.get(k, k).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn dense(m: &BandMatrix) -> Vec<Vec<C64>> {
        (0..m.dim())
            .map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect())
            .collect()
    }

    fn matvec_adjoint(a: &[Vec<C64>], x: &[C64]) -> Vec<C64> {
        (0..a.len())
            .map(|j| (0..a.len()).map(|i| a[i][j].conj() * x[i]).sum())
            .collect()
    }

    #[test]
    fn pivoting_is_required() {
        // zero leading entry forces an interchange
        let m = BandMatrix::tridiagonal(
            &[c(1.0, 0.0), c(1.0, 0.0)],
            &[c(0.0, 0.0), c(1.0, 1.0), c(2.0, 0.0)],
            &[c(2.0, 0.0), c(-1.0, 0.0)],
        )
        .unwrap();
        let b = vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 2.0)];
        let x = m.clone().factor().unwrap().solve(&b);
        let r = m.apply(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).norm() < 1e-14);
        }
    }

    #[test]
    fn singular_is_reported() {
        let m = BandMatrix::tridiagonal(
            &[c(0.0, 0.0)],
            &[c(1.0, 0.0), c(0.0, 0.0)],
            &[c(0.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(m.factor(), Err(Error::ExactlySingular { pivot: 1 })));
    }

    #[test]
    fn determinant_of_diagonal() {
        let m = BandMatrix::tridiagonal(
            &[c(0.0, 0.0)],
            &[c(2.0, 0.0), c(0.0, 3.0)],
            &[c(0.0, 0.0)],
        )
        .unwrap();
        let (log_abs, phase) = m.factor().unwrap().log_det();
        assert!((log_abs - 6f64.ln()).abs() < 1e-14);
        assert!((phase - c(0.0, 1.0)).norm() < 1e-14);
    }

    fn band_strategy() -> impl Strategy<Value = (BandMatrix, Vec<C64>)> {
        (3usize..20, 0usize..3, 0usize..3).prop_flat_map(|(n, kl, ku)| {
            let entries = n * (kl + ku + 1);
            (
                proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), entries),
                proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n),
            )
                .prop_map(move |(vals, rhs)| {
                    let mut m = BandMatrix::zeros(n, kl, ku);
                    let mut it = vals.into_iter();
                    for i in 0..n {
                        for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                            let (re, im) = it.next().unwrap();
                            // diagonal shift keeps the matrix comfortably nonsingular
                            let shift = if i == j { 6.0 } else { 0.0 };
                            m.set(i, j, c(re + shift, im));
                        }
                    }
                    let b = rhs.into_iter().map(|(re, im)| c(re, im)).collect();
                    (m, b)
                })
        })
    }

    proptest! {
        #[test]
        fn solves_match_dense_products((m, b) in band_strategy()) {
            let a = dense(&m);
            let lu = m.clone().factor().unwrap();
            let x = lu.solve(&b);
            let r = m.apply(&x);
            for (ri, bi) in r.iter().zip(&b) {
                prop_assert!((ri - bi).norm() < 1e-10);
            }
            let mut y = b.clone();
            lu.solve_adjoint_in_place(&mut y);
            let r = matvec_adjoint(&a, &y);
            for (ri, bi) in r.iter().zip(&b) {
                prop_assert!((ri - bi).norm() < 1e-10);
            }
        }
    }
}
