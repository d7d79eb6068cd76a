use std::io::Write;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
///
/// Row `i` stores columns `i - kl ..= i + ku` contiguously; entries that
/// fall outside the matrix are kept at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandedOperator {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    /// Symmetric tridiagonal matrix from its diagonal and first off-diagonal.
    pub fn symmetric_tridiagonal(diag: &[f64], off: &[f64]) -> Self {
        let n = diag.len();
        assert!(off.len() + 1 == n || (n == 0 && off.is_empty()));
        let mut out = Self::zeros(n, 1, 1);
        for i in 0..n {
            out.set(i, i, diag[i]);
            if i + 1 < n {
                out.set(i, i + 1, off[i]);
                out.set(i + 1, i, off[i]);
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    /// `max(kl, ku)`.
    pub fn bandwidth(&self) -> usize {
        self.kl.max(self.ku)
    }

    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        i * self.width() + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            0.0
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside the band");
        let s = self.slot(i, j);
        self.data[s] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside the band");
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    /// `alpha * self + beta * other` for operators with the same shape.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        assert_eq!((self.n, self.kl, self.ku), (other.n, other.kl, other.ku));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Self {
            n: self.n,
            kl: self.kl,
            ku: self.ku,
            data,
        }
    }

    /// Column range of the band in row `i`.
    fn cols(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    /// `y = A x`.
    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.cols(i).map(|j| self.data[self.slot(i, j)] * x[j]).sum();
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.apply_into(x, &mut y);
        y
    }

    /// `x^T A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.apply(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| self.cols(i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// Non-zero entries as `(row, col, value)`.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in self.cols(i) {
                let v = self.get(i, j);
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    /// Writes `row col value` lines with 17 significant digits.
    pub fn write_coo<W: Write>(&self, mut w: W) -> Result<()> {
        for (i, j, v) in self.triplets() {
            writeln!(w, "{i} {j} {v:.16e}")?;
        }
        Ok(())
    }

    pub fn lu(&self) -> std::result::Result<BandedLu, usize> {
        BandedLu::factor(self)
    }
}

/// LU factorisation with partial (row) pivoting of a band matrix.
///
/// After pivoting the upper factor has bandwidth `kl + ku`; each row of `u`
/// is stored left-justified starting at its diagonal.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    width: usize,
    u: Vec<f64>,
    l: Vec<f64>,
    perm: Vec<usize>,
}

impl BandedLu {
    /// Factors `a`; an exactly zero pivot returns its row index.
    pub fn factor(a: &BandedOperator) -> std::result::Result<Self, usize> {
        let n = a.n;
        let kl = a.kl;
        let width = a.kl + a.ku + 1;
        // Row i holds columns lead(i) .. lead(i) + width with
        // lead(i) = max(0, i - kl); rows are shifted left as elimination
        // proceeds so that position 0 always holds the current column.
        let mut u = vec![0.0; n * width];
        for i in 0..n {
            let lead = i.saturating_sub(kl);
            for j in a.cols(i) {
                u[i * width + (j - lead)] = a.get(i, j);
            }
        }
        let mut l = vec![0.0; n * kl.max(1)];
        let mut perm = vec![0; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = u[k * width].abs();
            for i in k + 1..=last {
                let v = u[i * width].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            perm[k] = p;
            if best == 0.0 {
                return Err(k);
            }
            if p != k {
                for j in 0..width {
                    u.swap(k * width + j, p * width + j);
                }
            }
            let pivot = u[k * width];
            for i in k + 1..=last {
                let factor = u[i * width] / pivot;
                l[k * kl + (i - k - 1)] = factor;
                for j in 1..width {
                    u[i * width + j - 1] = u[i * width + j] - factor * u[k * width + j];
                }
                u[i * width + width - 1] = 0.0;
            }
        }
        Ok(Self {
            n,
            kl,
            width,
            u,
            l,
            perm,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let (n, kl, w) = (self.n, self.kl, self.width);
        for k in 0..n {
            b.swap(k, self.perm[k]);
            let last = (k + kl).min(n - 1);
            for i in k + 1..=last {
                b[i] -= self.l[k * kl + (i - k - 1)] * b[k];
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in 1..w.min(n - i) {
                s -= self.u[i * w + j] * b[i + j];
            }
            b[i] = s / self.u[i * w];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// `min |u_ii| / max |u_ii|`, a cheap conditioning indicator.
    pub fn pivot_ratio(&self) -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..self.n {
            let v = self.u[i * self.width].abs();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }

    /// Reciprocal condition estimate `1 / (|a|_inf |a^-1|)` of the factored
    /// matrix `a`, with `|a^-1|` from inverse iteration (the 2-norm when `a`
    /// is symmetric). Pivot sizes alone can miss a near-singular tridiagonal
    /// matrix; this does not.
    pub fn rcond_estimate(&self, a: &BandedOperator, iterations: usize) -> f64 {
        let n = self.n;
        let norm_a = (0..n)
            .map(|i| a.cols(i).map(|j| a.get(i, j).abs()).sum::<f64>())
            .fold(0.0f64, f64::max);
        if norm_a == 0.0 {
            return 0.0;
        }
        let norm2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7).sin()).collect();
        let s = norm2(&x);
        x.iter_mut().for_each(|v| *v /= s);
        let mut growth = 0.0;
        for _ in 0..iterations.max(1) {
            self.solve_in_place(&mut x);
            growth = norm2(&x);
            if !growth.is_finite() {
                return 0.0;
            }
            x.iter_mut().for_each(|v| *v /= growth);
        }
        1.0 / (norm_a * growth)
    }
}

/// Iterations used by [`solve_banded`] for its condition estimate.
pub const RCOND_ITERATIONS: usize = 8;

/// Factors `a` and solves `a x = b`, tagging a singular pivot with `mode`.
/// Also returns a reciprocal condition estimate of `a`.
pub fn solve_banded(a: &BandedOperator, b: &[f64], mode: usize) -> Result<(Vec<f64>, f64)> {
    let lu = a.lu().map_err(|pivot| Error::SingularSystem { mode, pivot })?;
    let rcond = lu.rcond_estimate(a, RCOND_ITERATIONS);
    Ok((lu.solve(b), rcond))
}
