//! Compressed sparse rows and a banded LU for shifted stiffness systems.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::{Error, Result, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Csr {
    /// Builds from per-row column maps, keeping explicit entries in column order.
    pub fn from_rows(rows: Vec<BTreeMap<usize, C64>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.cols[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.row(i).find(|&(c, _)| c == j).map_or(C64::new(0.0, 0.0), |(_, v)| v)
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut acc = C64::new(0.0, 0.0);
            for (c, v) in self.row(i) {
                acc += v * x[c];
            }
            *yi = acc;
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        self.matvec(x, &mut y);
        y
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut rows = vec![BTreeMap::new(); self.n];
        for i in 0..self.n {
            for (c, v) in self.row(i) {
                rows[c].insert(i, v.conj());
            }
        }
        Self::from_rows(rows)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(c, _)| i.abs_diff(c)))
            .max()
            .unwrap_or(0)
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (c, v) in self.row(i) {
                m[(i, c)] = v;
            }
        }
        m
    }

    /// Largest entrywise difference to another matrix with the same dimension.
    pub fn max_diff(&self, other: &Csr) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for (c, v) in self.row(i) {
                m = m.max((v - other.get(i, c)).norm());
            }
            for (c, v) in other.row(i) {
                m = m.max((v - self.get(i, c)).norm());
            }
        }
        m
    }
}

/// LU factors of `I + shift · M` in band storage, without pivoting.
///
/// Safe when the Hermitian part of `M` is positive semidefinite, which holds
/// for the stiffness operators of elliptic fields.
#[derive(Clone, Debug)]
pub struct BandLu {
    n: usize,
    bw: usize,
    // row-major, `2*bw+1` entries per row, diagonal at offset `bw`
    band: Vec<C64>,
}

impl BandLu {
    pub fn factor_shifted(m: &Csr, shift: f64) -> Result<Self> {
        let n = m.dim();
        let bw = m.bandwidth();
        let w = 2 * bw + 1;
        let mut band = vec![C64::new(0.0, 0.0); n * w];
        for i in 0..n {
            band[i * w + bw] = C64::new(1.0, 0.0);
            for (c, v) in m.row(i) {
                band[i * w + (bw + c) - i] += v * shift;
            }
        }
        for k in 0..n {
            let pivot = band[k * w + bw];
            if pivot.norm() < 1e-300 {
                return Err(Error::Singular("zero pivot in banded LU"));
            }
            let last = (k + bw).min(n - 1);
            for i in k + 1..=last {
                let ik = i * w + bw + k - i;
                let l = band[ik] / pivot;
                band[ik] = l;
                if l == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..=(k + bw).min(n - 1) {
                    let kj = band[k * w + bw + j - k];
                    band[i * w + bw + j - i] -= l * kj;
                }
            }
        }
        Ok(Self { n, bw, band })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves in place for `nrhs` right-hand sides stored interleaved:
    /// entry `i` of system `r` lives at `x[i * nrhs + r]`.
    pub fn solve_many(&self, x: &mut [C64], nrhs: usize) {
        let (n, bw, w) = (self.n, self.bw, 2 * self.bw + 1);
        debug_assert_eq!(x.len(), n * nrhs);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let (head, tail) = x.split_at_mut(i * nrhs);
            let xi = &mut tail[..nrhs];
            for k in lo..i {
                let l = self.band[i * w + bw + k - i];
                if l == C64::new(0.0, 0.0) {
                    continue;
                }
                let xk = &head[k * nrhs..(k + 1) * nrhs];
                for (a, b) in xi.iter_mut().zip(xk) {
                    *a -= l * b;
                }
            }
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let (head, tail) = x.split_at_mut((i + 1) * nrhs);
            let xi = &mut head[i * nrhs..];
            for j in i + 1..=hi {
                let u = self.band[i * w + bw + j - i];
                if u == C64::new(0.0, 0.0) {
                    continue;
                }
                let xj = &tail[(j - i - 1) * nrhs..(j - i) * nrhs];
                for (a, b) in xi.iter_mut().zip(xj) {
                    *a -= u * b;
                }
            }
            let inv = self.band[i * w + bw].inv();
            xi.iter_mut().for_each(|a| *a *= inv);
        }
    }

    pub fn solve(&self, x: &mut [C64]) {
        self.solve_many(x, 1);
    }
}
