use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when checking that `L/h` and `pi/h_y` are integers.
pub const INTEGRALITY_TOL: f64 = 1e-12;

/// Piecewise-constant coefficient and domain half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    sigma_minus: f64,
    sigma_plus: f64,
    half_width: f64,
}

impl PhysicalConfig {
    pub fn new(sigma_minus: f64, sigma_plus: f64, half_width: f64) -> Result<Self> {
        if !(sigma_minus < 0.0) || !sigma_minus.is_finite() {
            return Err(Error::config(format!(
                "sigma_minus must be negative and finite, got {sigma_minus}"
            )));
        }
        if !(sigma_plus > 0.0) || !sigma_plus.is_finite() {
            return Err(Error::config(format!(
                "sigma_plus must be positive and finite, got {sigma_plus}"
            )));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::config(format!(
                "half-width L must be positive and finite, got {half_width}"
            )));
        }
        let kappa = sigma_plus / sigma_minus;
        if (kappa + 1.0).abs() <= 1e-12 {
            return Err(Error::config(
                "contrast kappa = -1 is critical: the continuous problem is not well-posed",
            ));
        }
        Ok(Self {
            sigma_minus,
            sigma_plus,
            half_width,
        })
    }

    /// Builds a configuration with `sigma_minus = -1` and `sigma_plus = -kappa`.
    pub fn from_kappa(kappa: f64, half_width: f64) -> Result<Self> {
        Self::new(-1.0, -kappa, half_width)
    }

    pub fn sigma_minus(&self) -> f64 {
        self.sigma_minus
    }

    pub fn sigma_plus(&self) -> f64 {
        self.sigma_plus
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Contrast `sigma_plus / sigma_minus`, always negative.
    pub fn kappa(&self) -> f64 {
        self.sigma_plus / self.sigma_minus
    }

    /// Coefficient value on the side of the interface that contains `x`
    /// (`x < 0` is the negative side).
    pub fn sigma_at(&self, x: f64) -> f64 {
        if x < 0.0 {
            self.sigma_minus
        } else {
            self.sigma_plus
        }
    }
}

/// How real-valued cell counts `L/h` and `pi/h_y` are turned into integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CountRounding {
    /// Counts must be integral within [`INTEGRALITY_TOL`]; otherwise the
    /// mesh is rejected.
    #[default]
    Strict,
    /// Counts are truncated towards zero without any check. This mirrors
    /// mesh generators that compute `int(L / h)` and can lose a cell when
    /// the quotient rounds to just below an integer.
    Truncate,
}

/// Tensor-product mesh of `(-L, L) x (0, pi)` with uniform cells of width
/// `h_minus` on the left, `h_plus` on the right and `h_y` in `y`.
///
/// The mesh is stored by its cell counts; all widths and ratios are
/// derived from them so that `N * h = L` holds to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshConfig {
    half_width: f64,
    n_minus: usize,
    n_plus: usize,
    big_m: usize,
}

impl MeshConfig {
    pub fn from_counts(half_width: f64, n_minus: usize, n_plus: usize, big_m: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::config(format!(
                "half-width L must be positive and finite, got {half_width}"
            )));
        }
        if n_minus == 0 || n_plus == 0 {
            return Err(Error::config(format!(
                "cell counts must be positive, got N- = {n_minus}, N+ = {n_plus}"
            )));
        }
        if big_m < 2 {
            return Err(Error::config(format!(
                "need at least two cells in y (M >= 2), got M = {big_m}"
            )));
        }
        Ok(Self {
            half_width,
            n_minus,
            n_plus,
            big_m,
        })
    }

    /// Builds the mesh from `h_minus`, `r = h_plus / h_minus` and
    /// `r_y = h_y / h_minus`.
    pub fn from_ratios(
        half_width: f64,
        h_minus: f64,
        ratio_r: f64,
        ratio_ry: f64,
        rounding: CountRounding,
    ) -> Result<Self> {
        for (name, v) in [("h_minus", h_minus), ("r", ratio_r), ("r_y", ratio_ry)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        let n_minus = count(half_width / h_minus, "N- = L/h_minus", rounding)?;
        let n_plus = count(half_width / (ratio_r * h_minus), "N+ = L/h_plus", rounding)?;
        let big_m = count(PI / (ratio_ry * h_minus), "M = pi/h_y", rounding)?;
        Self::from_counts(half_width, n_minus, n_plus, big_m)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn big_m(&self) -> usize {
        self.big_m
    }

    pub fn h_minus(&self) -> f64 {
        self.half_width / self.n_minus as f64
    }

    pub fn h_plus(&self) -> f64 {
        self.half_width / self.n_plus as f64
    }

    pub fn h_y(&self) -> f64 {
        PI / self.big_m as f64
    }

    pub fn ratio_r(&self) -> f64 {
        self.h_plus() / self.h_minus()
    }

    pub fn ratio_ry(&self) -> f64 {
        self.h_y() / self.h_minus()
    }

    /// Interior x-nodes `n = -N_minus+1 ..= N_plus-1`.
    pub fn nx(&self) -> usize {
        self.n_minus + self.n_plus - 1
    }

    /// Interior y-nodes, equal to the number of discrete sine modes.
    pub fn ny(&self) -> usize {
        self.big_m - 1
    }

    pub fn unknowns(&self) -> usize {
        self.nx() * self.ny()
    }

    /// Checks that this mesh was built for the same `L` as `phys`.
    pub fn check_against(&self, phys: &PhysicalConfig) -> Result<()> {
        let l = phys.half_width();
        if (self.half_width - l).abs() > INTEGRALITY_TOL * l {
            return Err(Error::config(format!(
                "mesh half-width {} does not match physical half-width {l}",
                self.half_width
            )));
        }
        Ok(())
    }
}

fn count(value: f64, what: &str, rounding: CountRounding) -> Result<usize> {
    if !value.is_finite() || value < 0.5 {
        return Err(Error::config(format!("{what} = {value} is not a positive count")));
    }
    match rounding {
        CountRounding::Strict => {
            let n = value.round();
            if (value - n).abs() > INTEGRALITY_TOL * n {
                return Err(Error::config(format!(
                    "{what} = {value} is not an integer within relative tolerance {INTEGRALITY_TOL:e}"
                )));
            }
            Ok(n as usize)
        }
        CountRounding::Truncate => Ok((value.trunc() as usize).max(1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l4() -> f64 {
        10.0 * (11f64.sqrt() * PI / 4.0)
    }

    #[test]
    fn rejects_bad_physics() {
        assert!(PhysicalConfig::new(1.0, 1.2, 1.0).is_err());
        assert!(PhysicalConfig::new(-1.0, -1.2, 1.0).is_err());
        assert!(PhysicalConfig::new(-1.0, 1.2, 0.0).is_err());
        assert!(PhysicalConfig::new(-1.0, 1.0, 1.0).is_err());
        let p = PhysicalConfig::new(-1.0, 1.2, 2.0).unwrap();
        assert!((p.kappa() + 1.2).abs() < 1e-15);
    }

    #[test]
    fn strict_counts_for_critical_family() {
        let c = 11f64.sqrt() * PI / 4.0;
        for m in 1..=40 {
            let mesh = MeshConfig::from_ratios(l4(), c / m as f64, 0.5, 2.0 / 11f64.sqrt(), CountRounding::Strict)
                .unwrap();
            assert_eq!(mesh.n_minus(), 10 * m);
            assert_eq!(mesh.n_plus(), 20 * m);
            assert_eq!(mesh.big_m(), 2 * m);
        }
    }

    #[test]
    fn truncation_can_drop_a_cell() {
        // pi / (r_y h) evaluates to 29.999999999999996 for m = 15.
        let c = 11f64.sqrt() * PI / 4.0;
        let mesh =
            MeshConfig::from_ratios(l4(), c / 15.0, 0.5, 2.0 / 11f64.sqrt(), CountRounding::Truncate).unwrap();
        assert_eq!(mesh.big_m(), 29);
        assert_eq!(mesh.n_minus(), 150);
    }

    #[test]
    fn non_integral_counts_rejected() {
        let err = MeshConfig::from_ratios(1.0, 0.3, 1.0, 1.0, CountRounding::Strict).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn derived_widths() {
        let mesh = MeshConfig::from_counts(2.0, 2, 4, 4).unwrap();
        assert_eq!(mesh.h_minus(), 1.0);
        assert_eq!(mesh.h_plus(), 0.5);
        assert_eq!(mesh.ratio_r(), 0.5);
        assert_eq!(mesh.nx(), 5);
        assert_eq!(mesh.ny(), 3);
        assert!(MeshConfig::from_counts(2.0, 2, 4, 1).is_err());
    }
}
