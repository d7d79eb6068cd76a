use serde::{Deserialize, Serialize};

use super::manufactured::ManufacturedCase;
use super::solve::SolutionField;
use crate::fem::{GaussLegendre, Grid1D, DEFAULT_QUADRATURE};
use crate::par;

/// Norm used for the relative H^1 error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum H1Convention {
    /// `|grad e| / |grad u|`.
    #[default]
    Seminorm,
    /// `(|e|^2 + |grad e|^2)^(1/2) / (|u|^2 + |grad u|^2)^(1/2)`.
    Full,
}

/// Squared norms accumulated over the mesh.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorIntegrals {
    pub err_l2: f64,
    pub err_grad: f64,
    pub ref_l2: f64,
    pub ref_grad: f64,
}

impl ErrorIntegrals {
    fn add(self, o: Self) -> Self {
        Self {
            err_l2: self.err_l2 + o.err_l2,
            err_grad: self.err_grad + o.err_grad,
            ref_l2: self.ref_l2 + o.ref_l2,
            ref_grad: self.ref_grad + o.ref_grad,
        }
    }

    pub fn rel_l2(&self) -> f64 {
        (self.err_l2 / self.ref_l2).sqrt()
    }

    pub fn rel_h1(&self, conv: H1Convention) -> f64 {
        match conv {
            H1Convention::Seminorm => (self.err_grad / self.ref_grad).sqrt(),
            H1Convention::Full => ((self.err_l2 + self.err_grad) / (self.ref_l2 + self.ref_grad)).sqrt(),
        }
    }
}

/// Integrates `(u - u_h)^2`, `|grad (u - u_h)|^2` and the matching norms of
/// `u` with a tensor Gauss rule on every cell.
pub fn error_integrals<U, G>(sol: &SolutionField, u: U, grad: G) -> ErrorIntegrals
where
    U: Fn(f64, f64) -> f64 + Sync + Send,
    G: Fn(f64, f64) -> (f64, f64) + Sync + Send,
{
    let mesh = &sol.mesh;
    let gx = Grid1D::from_mesh(mesh);
    let big_m = mesh.big_m();
    let hy = mesh.h_y();
    let rule = GaussLegendre::new(DEFAULT_QUADRATURE);
    let parts = par::map_range(gx.cells(), |cx| {
        let (x0, x1) = gx.cell(cx);
        let hx = x1 - x0;
        let mut acc = ErrorIntegrals::default();
        for cy in 0..big_m {
            let y0 = cy as f64 * hy;
            let y1 = if cy + 1 == big_m { std::f64::consts::PI } else { (cy + 1) as f64 * hy };
            let v00 = sol.node_value(cx, cy);
            let v10 = sol.node_value(cx + 1, cy);
            let v01 = sol.node_value(cx, cy + 1);
            let v11 = sol.node_value(cx + 1, cy + 1);
            for (x, wx) in rule.mapped(x0, x1) {
                let sx = (x - x0) / hx;
                for (y, wy) in rule.mapped(y0, y1) {
                    let sy = (y - y0) / (y1 - y0);
                    let uh = v00 * (1.0 - sx) * (1.0 - sy) + v10 * sx * (1.0 - sy) + v01 * (1.0 - sx) * sy + v11 * sx * sy;
                    let dxh = ((v10 - v00) * (1.0 - sy) + (v11 - v01) * sy) / hx;
                    let dyh = ((v01 - v00) * (1.0 - sx) + (v11 - v10) * sx) / (y1 - y0);
                    let ue = u(x, y);
                    let (dx, dy) = grad(x, y);
                    let w = wx * wy;
                    acc.err_l2 += w * (ue - uh) * (ue - uh);
                    acc.err_grad += w * ((dx - dxh) * (dx - dxh) + (dy - dyh) * (dy - dyh));
                    acc.ref_l2 += w * ue * ue;
                    acc.ref_grad += w * (dx * dx + dy * dy);
                }
            }
        }
        acc
    });
    parts.into_iter().fold(ErrorIntegrals::default(), ErrorIntegrals::add)
}

/// Relative L^2 and H^1 errors of `sol` against the manufactured solution.
pub fn errors(case: &ManufacturedCase, sol: &SolutionField, conv: H1Convention) -> (f64, f64) {
    let ints = error_integrals(sol, |x, y| case.exact_u(x, y), |x, y| case.exact_grad(x, y));
    (ints.rel_l2(), ints.rel_h1(conv))
}
