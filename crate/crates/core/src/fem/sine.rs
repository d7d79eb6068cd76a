use std::f64::consts::PI;

use super::assembly::{mass_1d, stiffness_1d, Weight};
use super::grid::Grid1D;
use super::BandedOperator;
use crate::par;

/// Discrete sine eigenbasis of the P1 pair `(K_y, M_y)` on `(0, pi)`.
///
/// Column `m` (0-based, mode `m + 1`) holds the nodal values
/// `c_m sin((m+1) h_y l)` at the interior nodes `l = 1..M-1`, with `c_m`
/// chosen so that the column has unit `M_y`-norm.
#[derive(Debug, Clone)]
pub struct SineBasis {
    size: usize,
    /// Row-major `size x size`; row = node, column = mode.
    theta: Vec<f64>,
    tau2: Vec<f64>,
    k_y: BandedOperator,
    m_y: BandedOperator,
}

impl SineBasis {
    pub fn new(big_m: usize) -> Self {
        assert!(big_m >= 2, "need M >= 2");
        let grid = Grid1D::uniform(0.0, PI, big_m);
        let k_y = stiffness_1d(&grid, &Weight::Unit);
        let m_y = mass_1d(&grid, &Weight::Unit);
        let size = big_m - 1;
        let mut theta = vec![0.0; size * size];
        let two_m = 2 * big_m;
        for l in 0..size {
            for m in 0..size {
                // sin(pi k / M) with k reduced mod 2M keeps the argument small.
                let k = ((l + 1) * (m + 1)) % two_m;
                theta[l * size + m] = (PI * k as f64 / big_m as f64).sin();
            }
        }
        let mut tau2 = vec![0.0; size];
        for m in 0..size {
            let col: Vec<f64> = (0..size).map(|l| theta[l * size + m]).collect();
            let norm2 = m_y.quadratic_form(&col);
            let c = 1.0 / norm2.sqrt();
            for l in 0..size {
                theta[l * size + m] *= c;
            }
            let col: Vec<f64> = col.iter().map(|v| v * c).collect();
            tau2[m] = k_y.quadratic_form(&col);
        }
        Self {
            size,
            theta,
            tau2,
            k_y,
            m_y,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `theta[node][mode]`, both 0-based.
    pub fn theta(&self, node: usize, mode: usize) -> f64 {
        self.theta[node * self.size + mode]
    }

    /// Nodal vector of mode `mode` (0-based).
    pub fn column(&self, mode: usize) -> Vec<f64> {
        (0..self.size).map(|l| self.theta(l, mode)).collect()
    }

    /// Rayleigh quotients `theta_m^T K_y theta_m`, i.e. `tau_m^2`.
    pub fn tau2(&self) -> &[f64] {
        &self.tau2
    }

    pub fn stiffness(&self) -> &BandedOperator {
        &self.k_y
    }

    pub fn mass(&self) -> &BandedOperator {
        &self.m_y
    }

    /// `out = v Theta` for one row `v`: inner products of a load row with
    /// every mode.
    fn row_times_theta(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (l, &vl) in v.iter().enumerate() {
            if vl == 0.0 {
                continue;
            }
            let row = &self.theta[l * self.size..(l + 1) * self.size];
            for (o, t) in out.iter_mut().zip(row) {
                *o += vl * t;
            }
        }
    }

    /// `out = Theta c` for one row of mode coefficients.
    fn theta_times(&self, c: &[f64], out: &mut [f64]) {
        for (l, o) in out.iter_mut().enumerate() {
            let row = &self.theta[l * self.size..(l + 1) * self.size];
            *o = row.iter().zip(c).map(|(t, ci)| t * ci).sum();
        }
    }

    /// Projects rows of y-load data (`rows x size`, row-major) onto the
    /// modes: `F Theta`.
    pub fn project(&self, data: &[f64]) -> Vec<f64> {
        let mut out = data.to_vec();
        let n = self.size;
        par::for_each_row(&mut out, n, |i, row| {
            self.row_times_theta(&data[i * n..(i + 1) * n], row);
        });
        out
    }

    /// Nodal values to mode coefficients, row by row: `u M_y Theta`.
    pub fn forward(&self, data: &[f64]) -> Vec<f64> {
        let n = self.size;
        let mut out = data.to_vec();
        par::for_each_row(&mut out, n, |i, row| {
            let my_u = self.m_y.apply(&data[i * n..(i + 1) * n]);
            self.row_times_theta(&my_u, row);
        });
        out
    }

    /// Mode coefficients to nodal values, row by row: `c Theta^T`.
    pub fn inverse(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.size;
        let mut out = coeffs.to_vec();
        par::for_each_row(&mut out, n, |i, row| {
            self.theta_times(&coeffs[i * n..(i + 1) * n], row);
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::discrete_lambda_hat;

    #[test]
    fn generalized_eigenvectors() {
        let b = SineBasis::new(8);
        for m in 0..7 {
            let v = b.column(m);
            let kv = b.stiffness().apply(&v);
            let mv = b.mass().apply(&v);
            let tau = discrete_lambda_hat(m + 1, PI / 8.0).unwrap();
            assert!((b.tau2()[m] - tau * tau).abs() < 1e-12 * tau * tau);
            for l in 0..7 {
                assert!((kv[l] - tau * tau * mv[l]).abs() < 1e-12 * (1.0 + tau * tau));
            }
        }
    }

    #[test]
    fn mass_orthonormal() {
        let b = SineBasis::new(9);
        for m in 0..8 {
            let mv = b.mass().apply(&b.column(m));
            for k in 0..8 {
                let ip: f64 = b.column(k).iter().zip(&mv).map(|(a, c)| a * c).sum();
                let expect = if k == m { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn round_trip() {
        let b = SineBasis::new(11);
        let data: Vec<f64> = (0..30).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect();
        let back = b.inverse(&b.forward(&data));
        for (x, y) in data.iter().zip(&back) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
