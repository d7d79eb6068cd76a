use std::io::Write;

use nalgebra::DVector;

use super::manufactured::ManufacturedCase;
use crate::config::{MeshConfig, PhysicalConfig};
use crate::error::{Error, Result};
use crate::fem::{self, BandedOperator, Grid1D, SineBasis, TensorOperator, Weight};
use crate::par;

/// Largest system the dense oracles accept.
pub const DENSE_LIMIT: usize = 2000;

/// Nodal coefficients of a discrete solution on the interior nodes,
/// `nx` rows (x) of `ny` values (y).
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub mesh: MeshConfig,
    pub values: Vec<f64>,
    /// Smallest reciprocal condition estimate over the per-mode matrices
    /// (1 for the dense route, which does not report it).
    pub min_rcond: f64,
    /// Mode (1-based) at which [`SolutionField::min_rcond`] occurs.
    pub worst_mode: usize,
}

impl SolutionField {
    /// Value at grid node `(ix, iy)`, `ix in 0..=N_minus+N_plus`,
    /// `iy in 0..=M`; Dirichlet nodes return 0.
    pub fn node_value(&self, ix: usize, iy: usize) -> f64 {
        let (nx, ny) = (self.mesh.nx(), self.mesh.ny());
        if ix == 0 || iy == 0 || ix > nx || iy > ny {
            0.0
        } else {
            self.values[(ix - 1) * ny + (iy - 1)]
        }
    }

    /// Writes `x y value` lines for every node, boundary included.
    pub fn write_field<W: Write>(&self, mut w: W) -> Result<()> {
        let gx = Grid1D::from_mesh(&self.mesh);
        let hy = self.mesh.h_y();
        for (ix, &x) in gx.nodes().iter().enumerate() {
            for iy in 0..=self.mesh.big_m() {
                writeln!(w, "{x:.16e} {:.16e} {:.16e}", iy as f64 * hy, self.node_value(ix, iy))?;
            }
        }
        Ok(())
    }
}

/// Nodal interpolant of `u` on the interior nodes.
pub fn interpolate<F: Fn(f64, f64) -> f64>(mesh: &MeshConfig, u: F) -> SolutionField {
    let gx = Grid1D::from_mesh(mesh);
    let hy = mesh.h_y();
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let mut values = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            values.push(u(gx.nodes()[i + 1], (j + 1) as f64 * hy));
        }
    }
    SolutionField {
        mesh: *mesh,
        values,
        min_rcond: 1.0,
        worst_mode: 0,
    }
}

/// Solves `(Kx (x) My + Mx (x) Ky) u = rhs` mode by mode in the sine basis
/// of `(Ky, My)`. Returns the solution, the smallest reciprocal condition
/// estimate and its (1-based) mode.
pub fn solve_per_mode(
    kx: &BandedOperator,
    mx: &BandedOperator,
    basis: &SineBasis,
    rhs: &[f64],
) -> Result<(Vec<f64>, f64, usize)> {
    let (nx, ny) = (kx.dim(), basis.size());
    assert_eq!(rhs.len(), nx * ny);
    let projected = basis.project(rhs);
    let tau2 = basis.tau2();
    let modes = par::map_range(ny, |m| {
        let a = kx.combine(1.0, mx, tau2[m]);
        let b: Vec<f64> = (0..nx).map(|i| projected[i * ny + m]).collect();
        fem::solve_banded(&a, &b, m + 1)
    });
    let mut coeffs = vec![0.0; nx * ny];
    let (mut worst, mut worst_mode) = (f64::INFINITY, 0);
    for (m, res) in modes.into_iter().enumerate() {
        let (v, ratio) = res?;
        if ratio < worst {
            worst = ratio;
            worst_mode = m + 1;
        }
        for (i, vi) in v.into_iter().enumerate() {
            coeffs[i * ny + m] = vi;
        }
    }
    Ok((basis.inverse(&coeffs), worst, worst_mode))
}

/// Load vector of the manufactured case.
pub fn manufactured_load(phys: &PhysicalConfig, mesh: &MeshConfig, case: &ManufacturedCase) -> Result<Vec<f64>> {
    Ok(fem::load_vector(phys, mesh, |x, y| case.source(x, y))?.values)
}

/// Per-mode solve of the Galerkin system: project the load onto the sine
/// modes, factor each `K_x^sigma + tau_m^2 M_x^sigma` with partial
/// pivoting, and recompose.
pub fn solve(phys: &PhysicalConfig, mesh: &MeshConfig, case: &ManufacturedCase) -> Result<SolutionField> {
    mesh.check_against(phys)?;
    let load = manufactured_load(phys, mesh, case)?;
    let gx = Grid1D::from_mesh(mesh);
    let sigma = Weight::sigma(phys);
    let kx = fem::stiffness_1d(&gx, &sigma);
    let mx = fem::mass_1d(&gx, &sigma);
    let basis = SineBasis::new(mesh.big_m());
    let (values, min_rcond, worst_mode) = solve_per_mode(&kx, &mx, &basis, &load)?;
    Ok(SolutionField {
        mesh: *mesh,
        values,
        min_rcond,
        worst_mode,
    })
}

fn dense_guard(mesh: &MeshConfig) -> Result<()> {
    if mesh.unknowns() > DENSE_LIMIT {
        return Err(Error::TooLarge {
            unknowns: mesh.unknowns(),
            limit: DENSE_LIMIT,
        });
    }
    Ok(())
}

/// Dense LU solve of an assembled tensor system (oracle route).
pub fn solve_dense_system(op: &TensorOperator, rhs: &[f64]) -> Result<Vec<f64>> {
    let lu = op.to_dense().lu();
    lu.solve(&DVector::from_column_slice(rhs))
        .map(|x| x.as_slice().to_vec())
        .ok_or_else(|| Error::SingularSystem { mode: 0, pivot: 0 })
}

/// The same problem as [`solve`] through a dense LU of the full matrix.
pub fn solve_dense(phys: &PhysicalConfig, mesh: &MeshConfig, case: &ManufacturedCase) -> Result<SolutionField> {
    mesh.check_against(phys)?;
    dense_guard(mesh)?;
    let (a, _) = fem::assemble_2d(phys, mesh)?;
    let load = manufactured_load(phys, mesh, case)?;
    Ok(SolutionField {
        mesh: *mesh,
        values: solve_dense_system(&a, &load)?,
        min_rcond: 1.0,
        worst_mode: 0,
    })
}

/// `max |a - b| / max |b|`.
pub fn relative_max_difference(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

pub(crate) fn check_dense(mesh: &MeshConfig) -> Result<()> {
    dense_guard(mesh)
}
