//! Banded matrices with an LU factorization using partial pivoting.
//!
//! Storage follows the LAPACK `gbtrf` layout: entry `A(i, j)` lives in row
//! `kl + ku + i − j` of a `(2·kl + ku + 1) × n` column-major array, leaving
//! `kl` extra superdiagonals for pivoting fill-in.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<T>,
}

impl<T: Real> BandedMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            data: vec![T::zero(); ldab * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    /// Number of stored diagonals of the original matrix, `kl + ku + 1`.
    pub fn bandwidth(&self) -> usize {
        self.kl + self.ku + 1
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && i + self.ku + self.kl >= j
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            T::zero()
        }
    }

    /// Adds `v` to `A(i, j)`. Panics outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        assert!(
            j + self.kl >= i && i + self.ku >= j,
            "entry ({i}, {j}) outside band ({}, {})",
            self.kl,
            self.ku
        );
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(j + self.kl >= i && i + self.ku >= j, "entry ({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    /// Zeroes row `i` and puts `diag` on its diagonal (Dirichlet row).
    pub fn set_identity_row(&mut self, i: usize, diag: T) {
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku).min(self.n - 1);
        for j in lo..=hi {
            self.set(i, j, T::zero());
        }
        self.set(i, i, diag);
    }

    /// Multiplies every column `j` by `d[j]` (right diagonal scaling).
    pub fn scale_columns(&mut self, d: &[T]) {
        for j in 0..self.n {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for i in lo..=hi {
                let k = self.idx(i, j);
                self.data[k] = self.data[k] * d[j];
            }
        }
    }

    /// Adds `alpha·other` entrywise; bandwidths must match.
    pub fn add_scaled(&mut self, alpha: T, other: &Self) {
        assert_eq!((self.n, self.kl, self.ku), (other.n, other.kl, other.ku));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    pub fn row_sums(&self) -> Vec<T> {
        self.mul_vec(&vec![T::one(); self.n])
    }

    pub fn factor(mut self) -> Result<BandedLu<T>> {
        let n = self.n;
        let kl = self.kl;
        let kmax = kl + self.ku;
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.idx(k, k)].abs();
            for i in k + 1..=last_row {
                let v = self.data[self.idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            piv[k] = p;
            if best == T::zero() || !best.is_finite() {
                return Err(Error::Singular(k));
            }
            let last_col = (k + kmax).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let a = self.idx(k, j);
                    let b = self.idx(p, j);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.idx(k, k)];
            for i in k + 1..=last_row {
                let li = self.idx(i, k);
                let l = self.data[li] / pivot;
                self.data[li] = l;
                if l == T::zero() {
                    continue;
                }
                for j in k + 1..=last_col {
                    let u = self.data[self.idx(k, j)];
                    let t = self.idx(i, j);
                    self.data[t] -= l * u;
                }
            }
        }
        Ok(BandedLu { lu: self, piv })
    }

    pub fn solve(self, rhs: &[T]) -> Result<Vec<T>> {
        let lu = self.factor()?;
        Ok(lu.solve(rhs))
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu<T> {
    lu: BandedMatrix<T>,
    piv: Vec<usize>,
}

impl<T: Real> BandedLu<T> {
    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        let a = &self.lu;
        let n = a.n;
        assert_eq!(rhs.len(), n);
        let mut x = rhs.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            for i in k + 1..=(k + a.kl).min(n - 1) {
                x[i] -= a.data[a.idx(i, k)] * xk;
            }
        }
        let kmax = a.kl + a.ku;
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..=(k + kmax).min(n - 1) {
                s -= a.data[a.idx(k, j)] * x[j];
            }
            x[k] = s / a.data[a.idx(k, k)];
        }
        x
    }
}
