use std::io::Write;

use nalgebra::DMatrix;

use super::banded::BandedOperator;
use super::grid::Grid1D;
use super::quadrature::GaussLegendre;
use crate::config::{MeshConfig, PhysicalConfig};
use crate::error::{Error, Result};
use crate::par;
use crate::spectral;

/// Cellwise-constant weight of a 1D bilinear form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    Unit,
    /// `left` on cells with negative midpoint, `right` elsewhere.
    Piecewise { left: f64, right: f64 },
}

impl Weight {
    pub fn sigma(phys: &PhysicalConfig) -> Self {
        Weight::Piecewise {
            left: phys.sigma_minus(),
            right: phys.sigma_plus(),
        }
    }

    fn on_cell(&self, a: f64, b: f64) -> f64 {
        match *self {
            Weight::Unit => 1.0,
            Weight::Piecewise { left, right } => {
                if 0.5 * (a + b) < 0.0 {
                    left
                } else {
                    right
                }
            }
        }
    }
}

/// Assembles the P1 matrix with local matrix `local(w, h)` on the interior
/// nodes of `grid`.
fn assemble_1d(grid: &Grid1D, weight: &Weight, local: impl Fn(f64, f64) -> (f64, f64)) -> BandedOperator {
    let n = grid.interior_len();
    let mut out = BandedOperator::zeros(n, 1, 1);
    for c in 0..grid.cells() {
        let (a, b) = grid.cell(c);
        let (diag, off) = local(weight.on_cell(a, b), b - a);
        // Cell c joins nodes c and c+1, i.e. interior indices c-1 and c.
        let left = c.checked_sub(1);
        let right = (c < n).then_some(c);
        if let Some(i) = left {
            out.add(i, i, diag);
        }
        if let Some(j) = right {
            out.add(j, j, diag);
        }
        if let (Some(i), Some(j)) = (left, right) {
            out.add(i, j, off);
            out.add(j, i, off);
        }
    }
    out
}

/// P1 stiffness matrix `int w phi_i' phi_j'` on the interior nodes.
pub fn stiffness_1d(grid: &Grid1D, weight: &Weight) -> BandedOperator {
    assemble_1d(grid, weight, |w, h| (w / h, -w / h))
}

/// P1 mass matrix `int w phi_i phi_j` on the interior nodes.
pub fn mass_1d(grid: &Grid1D, weight: &Weight) -> BandedOperator {
    assemble_1d(grid, weight, |w, h| (w * h / 3.0, w * h / 6.0))
}

/// `K_x^sigma + lambda^2 M_x^sigma` with `lambda = m` or, if `use_hat`, the
/// discrete eigenvalue `tau_m` of the y-discretisation.
pub fn mode_matrix(phys: &PhysicalConfig, mesh: &MeshConfig, m: usize, use_hat: bool) -> Result<BandedOperator> {
    mesh.check_against(phys)?;
    let lambda = mode_lambda(mesh, m, use_hat)?;
    let grid = Grid1D::from_mesh(mesh);
    let w = Weight::sigma(phys);
    Ok(stiffness_1d(&grid, &w).combine(1.0, &mass_1d(&grid, &w), lambda * lambda))
}

/// Unweighted counterpart of [`mode_matrix`], the x-part of the H^1_0 Gram
/// matrix for one mode.
pub fn mode_gram(mesh: &MeshConfig, m: usize, use_hat: bool) -> Result<BandedOperator> {
    let lambda = mode_lambda(mesh, m, use_hat)?;
    let grid = Grid1D::from_mesh(mesh);
    Ok(stiffness_1d(&grid, &Weight::Unit).combine(1.0, &mass_1d(&grid, &Weight::Unit), lambda * lambda))
}

fn mode_lambda(mesh: &MeshConfig, m: usize, use_hat: bool) -> Result<f64> {
    let variant = if use_hat {
        spectral::DiagonalVariant::FullBounded
    } else {
        spectral::DiagonalVariant::SemiBounded
    };
    spectral::mode_lambda(mesh, m, variant)
}

/// `K_x (x) M_y + M_x (x) K_y` in matrix-free form, unknowns ordered
/// lexicographically with the y-index fastest.
#[derive(Debug, Clone)]
pub struct TensorOperator {
    pub kx: BandedOperator,
    pub mx: BandedOperator,
    pub ky: BandedOperator,
    pub my: BandedOperator,
}

impl TensorOperator {
    pub fn nx(&self) -> usize {
        self.kx.dim()
    }

    pub fn ny(&self) -> usize {
        self.ky.dim()
    }

    pub fn dim(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let (nx, ny) = (self.nx(), self.ny());
        assert_eq!(u.len(), nx * ny);
        // Y = Kx (U My) + Mx (U Ky) with U stored as nx rows of length ny.
        let mut u_my = vec![0.0; nx * ny];
        let mut u_ky = vec![0.0; nx * ny];
        par::for_each_row(&mut u_my, ny, |i, row| self.my.apply_into(&u[i * ny..(i + 1) * ny], row));
        par::for_each_row(&mut u_ky, ny, |i, row| self.ky.apply_into(&u[i * ny..(i + 1) * ny], row));
        let mut out = vec![0.0; nx * ny];
        par::for_each_row(&mut out, ny, |i, row| {
            for j in i.saturating_sub(1)..(i + 2).min(nx) {
                let (k, m) = (self.kx.get(i, j), self.mx.get(i, j));
                let a = &u_my[j * ny..(j + 1) * ny];
                let b = &u_ky[j * ny..(j + 1) * ny];
                for l in 0..ny {
                    row[l] += k * a[l] + m * b[l];
                }
            }
        });
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let (kx, mx, ky, my) = (self.kx.to_dense(), self.mx.to_dense(), self.ky.to_dense(), self.my.to_dense());
        kx.kronecker(&my) + mx.kronecker(&ky)
    }

    /// Non-zero entries of the assembled matrix as `(row, col, value)`.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let ny = self.ny();
        let mut out = Vec::new();
        for i in 0..self.nx() {
            for j in i.saturating_sub(1)..(i + 2).min(self.nx()) {
                for l in 0..ny {
                    for k in l.saturating_sub(1)..(l + 2).min(ny) {
                        let v = self.kx.get(i, j) * self.my.get(l, k) + self.mx.get(i, j) * self.ky.get(l, k);
                        if v != 0.0 {
                            out.push((i * ny + l, j * ny + k, v));
                        }
                    }
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
}

/// The operator `A` of the bilinear form and the H^1_0 Gram matrix `G`.
pub fn assemble_2d(phys: &PhysicalConfig, mesh: &MeshConfig) -> Result<(TensorOperator, TensorOperator)> {
    mesh.check_against(phys)?;
    let gx = Grid1D::from_mesh(mesh);
    let gy = Grid1D::uniform(0.0, std::f64::consts::PI, mesh.big_m());
    let sigma = Weight::sigma(phys);
    let ky = stiffness_1d(&gy, &Weight::Unit);
    let my = mass_1d(&gy, &Weight::Unit);
    let a = TensorOperator {
        kx: stiffness_1d(&gx, &sigma),
        mx: mass_1d(&gx, &sigma),
        ky: ky.clone(),
        my: my.clone(),
    };
    let g = TensorOperator {
        kx: stiffness_1d(&gx, &Weight::Unit),
        mx: mass_1d(&gx, &Weight::Unit),
        ky,
        my,
    };
    Ok((a, g))
}

/// Load entries `<f, phi_n psi_l>` over interior nodes, `nx` rows of `ny`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadVector {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

pub const DEFAULT_QUADRATURE: usize = 5;

pub fn load_vector<F>(phys: &PhysicalConfig, mesh: &MeshConfig, f: F) -> Result<LoadVector>
where
    F: Fn(f64, f64) -> f64 + Sync + Send,
{
    load_vector_with_order(phys, mesh, f, DEFAULT_QUADRATURE)
}

/// [`load_vector`] with a `order`-point Gauss rule per cell and direction.
pub fn load_vector_with_order<F>(phys: &PhysicalConfig, mesh: &MeshConfig, f: F, order: usize) -> Result<LoadVector>
where
    F: Fn(f64, f64) -> f64 + Sync + Send,
{
    mesh.check_against(phys)?;
    if order == 0 {
        return Err(Error::domain("quadrature order must be positive"));
    }
    let rule = GaussLegendre::new(order);
    let gx = Grid1D::from_mesh(mesh);
    let gy = Grid1D::uniform(0.0, std::f64::consts::PI, mesh.big_m());
    let (nx, ny) = (mesh.nx(), mesh.ny());
    // Quadrature points in y with both hat values of their cell.
    let mut ypts = Vec::with_capacity(gy.cells() * order);
    for c in 0..gy.cells() {
        let (a, b) = gy.cell(c);
        for (y, w) in rule.mapped(a, b) {
            ypts.push((c, y, w * (b - y) / (b - a), w * (y - a) / (b - a)));
        }
    }
    let mut values = vec![0.0; nx * ny];
    par::for_each_row(&mut values, ny, |i, row| {
        // Interior x-index i is grid node i+1, supported on cells i and i+1.
        for c in [i, i + 1] {
            let (a, b) = gx.cell(c);
            for (x, wx) in rule.mapped(a, b) {
                let phi = if c == i { (x - a) / (b - a) } else { (b - x) / (b - a) };
                let wphi = wx * phi;
                for &(cy, y, wl, wr) in &ypts {
                    let v = wphi * f(x, y);
                    // Cell cy joins y-nodes cy and cy+1 (interior cy-1 and cy).
                    if cy >= 1 {
                        row[cy - 1] += v * wl;
                    }
                    if cy < ny {
                        row[cy] += v * wr;
                    }
                }
            }
        }
    });
    Ok(LoadVector { nx, ny, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_row_matches_local_coeffs() {
        let grid = Grid1D::uniform(0.0, 6.0, 6);
        let k = stiffness_1d(&grid, &Weight::Unit);
        let m = mass_1d(&grid, &Weight::Unit);
        let lambda: f64 = 1.7;
        let a = k.combine(1.0, &m, lambda * lambda);
        let (ca, cb) = spectral::local_coeffs(lambda, 1.0).unwrap();
        assert!((a.get(2, 2) - 2.0 * ca).abs() < 1e-14);
        assert!((a.get(2, 3) - cb).abs() < 1e-14);
        assert!((a.get(2, 1) - cb).abs() < 1e-14);
    }

    #[test]
    fn interface_row() {
        let phys = PhysicalConfig::new(-1.0, 1.2, 2.0).unwrap();
        let mesh = MeshConfig::from_counts(2.0, 2, 4, 2).unwrap();
        let a = mode_matrix(&phys, &mesh, 1, false).unwrap();
        // -4/3 + 1.2 (2 + 1/6)
        assert!((a.get(1, 1) - 1.266_666_666_666_666_7).abs() < 1e-14);
    }

    #[test]
    fn smallest_mesh() {
        let grid = Grid1D::uniform(-1.0, 1.0, 2);
        assert_eq!(stiffness_1d(&grid, &Weight::Unit).get(0, 0), 2.0);
        assert!((mass_1d(&grid, &Weight::Unit).get(0, 0) - 2.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn constant_load() {
        let phys = PhysicalConfig::new(-1.0, 1.2, 2.0).unwrap();
        let mesh = MeshConfig::from_counts(2.0, 2, 4, 4).unwrap();
        let load = load_vector(&phys, &mesh, |_, _| 1.0).unwrap();
        let hy = mesh.h_y();
        // node x = -1 (interior index 0) and the interface node (index 1)
        assert!((load.values[1] - 1.0 * hy).abs() < 1e-14);
        assert!((load.values[load.ny + 1] - 0.75 * hy).abs() < 1e-14);
    }

    #[test]
    fn tensor_apply_matches_dense() {
        let phys = PhysicalConfig::new(-1.0, 1.2, 2.0).unwrap();
        let mesh = MeshConfig::from_counts(2.0, 3, 2, 5).unwrap();
        let (a, g) = assemble_2d(&phys, &mesh).unwrap();
        for op in [&a, &g] {
            let dense = op.to_dense();
            let u: Vec<f64> = (0..op.dim()).map(|i| ((i * 13 % 7) as f64).sin()).collect();
            let y = op.apply(&u);
            let yd = &dense * nalgebra::DVector::from_column_slice(&u);
            for i in 0..op.dim() {
                assert!((y[i] - yd[i]).abs() < 1e-12 * (1.0 + yd[i].abs()));
            }
            assert_eq!(op.triplets().len(), dense.iter().filter(|v| **v != 0.0).count());
        }
    }
}
