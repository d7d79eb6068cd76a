use crate::config::PhysicalConfig;

/// The smooth test problem `u = (1 - x^2/L^2) y (y - pi)(y - 2 pi)`.
///
/// `u` vanishes on the boundary of `(-L, L) x (0, pi)` and `d_x u = 0` on
/// the interface, so `u` solves the transmission problem for any
/// piecewise-constant `sigma` with the source returned by
/// [`ManufacturedCase::source`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedCase {
    phys: PhysicalConfig,
}

const PI: f64 = std::f64::consts::PI;

fn g(y: f64) -> f64 {
    y * (y - PI) * (y - 2.0 * PI)
}

fn dg(y: f64) -> f64 {
    3.0 * y * y - 6.0 * PI * y + 2.0 * PI * PI
}

impl ManufacturedCase {
    pub fn new(phys: PhysicalConfig) -> Self {
        Self { phys }
    }

    pub fn phys(&self) -> &PhysicalConfig {
        &self.phys
    }

    pub fn exact_u(&self, x: f64, y: f64) -> f64 {
        let l = self.phys.half_width();
        (1.0 - x * x / (l * l)) * g(y)
    }

    pub fn exact_grad(&self, x: f64, y: f64) -> (f64, f64) {
        let l = self.phys.half_width();
        (-2.0 * x / (l * l) * g(y), (1.0 - x * x / (l * l)) * dg(y))
    }

    /// `f = -sigma (u_xx + u_yy)`, with `sigma` taken from the side of `x`.
    pub fn source(&self, x: f64, y: f64) -> f64 {
        let l = self.phys.half_width();
        let sigma = self.phys.sigma_at(x);
        -sigma * (-2.0 * g(y) / (l * l) + 6.0 * (1.0 - x * x / (l * l)) * (y - PI))
    }

    /// One-sided fluxes `sigma d_x u` at `x = 0` from the left and right.
    pub fn interface_fluxes(&self, y: f64) -> (f64, f64) {
        let (gx, _) = self.exact_grad(0.0, y);
        (self.phys.sigma_minus() * gx, self.phys.sigma_plus() * gx)
    }
}
