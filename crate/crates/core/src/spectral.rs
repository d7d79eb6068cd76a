//! Closed-form analysis of the interface block.
//!
//! Every discretisation considered here splits into a negative-side block,
//! a positive-side block (both multiples of the identity) and an interface
//! block that is diagonal in a basis of exponentially decaying profiles.
//! This module evaluates the local stiffness/mass coefficients, the roots
//! of the three-term recurrence that generates the profiles, the diagonal
//! entries themselves and the scalar functions that describe them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::config::{MeshConfig, PhysicalConfig};
use crate::error::{Error, Result};

/// `|b| <= DEGENERACY_TOL * a` is treated as `b = 0`.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Arguments of `arccos` within this distance of `[-1, 1]` are clamped.
pub const ACOS_CLAMP_TOL: f64 = 1e-12;

/// Relative agreement required between the two evaluation routes of a
/// diagonal entry (relative to `max(|sigma_-|, |sigma_+|)`).
pub const ROUTE_TOL: f64 = 1e-10;

/// Default cutoff for truncating the geometric tails of unbounded profiles.
pub const TAIL_CUTOFF: f64 = 1e-16;

/// P1 coefficients `a = 1/h + lambda^2 h / 3`, `b = -1/h + lambda^2 h / 6`
/// of the operator `-d_xx + lambda^2` on a uniform cell of width `h`.
pub fn local_coeffs(lambda: f64, h: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0) || !(h > 0.0) || !lambda.is_finite() || !h.is_finite() {
        return Err(Error::domain(format!(
            "local_coeffs needs lambda > 0 and h > 0, got lambda = {lambda}, h = {h}"
        )));
    }
    let l2h = lambda * lambda * h;
    Ok((1.0 / h + l2h / 3.0, -1.0 / h + l2h / 6.0))
}

/// Roots of `b mu^2 + 2 a mu + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Roots {
    /// Root inside the unit disc (0 on the degenerate branch).
    pub mu1: f64,
    /// Root outside the unit disc (1 on the degenerate branch).
    pub mu2: f64,
    pub degenerate: bool,
}

impl Roots {
    /// `nu = mu1 / mu2`, which equals `mu1^2` since `mu1 mu2 = 1`.
    pub fn nu(&self) -> f64 {
        if self.degenerate {
            0.0
        } else {
            self.mu1 / self.mu2
        }
    }

    /// `nu^n`, computed through logarithms; underflows quietly to zero.
    pub fn nu_pow(&self, n: usize) -> f64 {
        if self.degenerate || self.mu1 == 0.0 {
            return 0.0;
        }
        (2.0 * n as f64 * self.mu1.abs().ln()).exp()
    }
}

pub fn mu_roots(a: f64, b: f64) -> Result<Roots> {
    if !(a > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!("mu_roots needs a > 0, got a = {a}, b = {b}")));
    }
    let disc = (a - b) * (a + b);
    if !(disc > 0.0) {
        return Err(Error::domain(format!(
            "mu_roots needs a^2 - b^2 > 0, got a = {a}, b = {b}"
        )));
    }
    if b.abs() <= DEGENERACY_TOL * a {
        return Ok(Roots {
            mu1: 0.0,
            mu2: 1.0,
            degenerate: true,
        });
    }
    let d = disc.sqrt();
    // (-a + d) / b rewritten without cancellation.
    let mu1 = -b / (a + d);
    let mu2 = -(a + d) / b;
    Ok(Roots {
        mu1,
        mu2,
        degenerate: false,
    })
}

/// Coefficients and recurrence roots on one side of the interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideCoefficients {
    pub h: f64,
    pub a: f64,
    pub b: f64,
    pub roots: Roots,
}

impl SideCoefficients {
    pub fn new(lambda: f64, h: f64) -> Result<Self> {
        let (a, b) = local_coeffs(lambda, h)?;
        let roots = mu_roots(a, b)?;
        Ok(Self { h, a, b, roots })
    }

    /// `sqrt(a^2 - b^2)`.
    pub fn sqrt_disc(&self) -> f64 {
        ((self.a - self.b) * (self.a + self.b)).sqrt()
    }

    /// `b mu + a` with the decaying root, the interface weight of the
    /// unbounded profile.
    pub fn unbounded_weight(&self) -> f64 {
        self.b * self.roots.mu1 + self.a
    }

    /// `(1 + nu^N) / (1 - nu^N) sqrt(a^2 - b^2)`, the interface weight of
    /// the profile truncated by a Dirichlet node after `n_cells` cells.
    pub fn bounded_weight(&self, n_cells: usize) -> f64 {
        let nun = self.roots.nu_pow(n_cells);
        (1.0 + nun) / (1.0 - nun) * self.sqrt_disc()
    }
}

/// All per-mode scalars for both sides of the interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub mode_m: usize,
    /// `m` for semi-discrete variants, the discrete eigenvalue `tau_m` for
    /// fully discrete ones.
    pub lambda: f64,
    pub a_minus: f64,
    pub a_plus: f64,
    pub b_minus: f64,
    pub b_plus: f64,
    pub mu1_minus: f64,
    pub mu2_minus: f64,
    pub mu1_plus: f64,
    pub mu2_plus: f64,
    pub mu_minus: f64,
    pub mu_plus: f64,
    pub nu_minus: f64,
    pub nu_plus: f64,
    pub degenerate_minus: bool,
    pub degenerate_plus: bool,
}

impl ModeCoefficients {
    pub fn new(mode_m: usize, lambda: f64, h_minus: f64, h_plus: f64) -> Result<Self> {
        let minus = SideCoefficients::new(lambda, h_minus)?;
        let plus = SideCoefficients::new(lambda, h_plus)?;
        Ok(Self::from_sides(mode_m, lambda, &minus, &plus))
    }

    fn from_sides(mode_m: usize, lambda: f64, minus: &SideCoefficients, plus: &SideCoefficients) -> Self {
        Self {
            mode_m,
            lambda,
            a_minus: minus.a,
            a_plus: plus.a,
            b_minus: minus.b,
            b_plus: plus.b,
            mu1_minus: minus.roots.mu1,
            mu2_minus: minus.roots.mu2,
            mu1_plus: plus.roots.mu1,
            mu2_plus: plus.roots.mu2,
            mu_minus: minus.roots.mu1,
            mu_plus: plus.roots.mu1,
            nu_minus: minus.roots.nu(),
            nu_plus: plus.roots.nu(),
            degenerate_minus: minus.roots.degenerate,
            degenerate_plus: plus.roots.degenerate,
        }
    }
}

/// `sqrt(r^2 t^2 + 12) / sqrt(t^2 + 12)`.
fn width_ratio(r: f64, t: f64) -> f64 {
    ((r * r * t * t + 12.0) / (t * t + 12.0)).sqrt()
}

/// Scaled diagonal entry of the unbounded semi-discrete interface block,
/// `(1 + kappa rho) / (1 + rho)` with `rho = sqrt(r^2t^2+12)/sqrt(t^2+12)`.
pub fn f_kr(kappa: f64, r: f64, t: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("f_kr needs r > 0, got {r}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("f_kr needs t >= 0, got {t}")));
    }
    let rho = width_ratio(r, t);
    Ok((1.0 + kappa * rho) / (1.0 + rho))
}

/// The unique non-negative root of [`f_kr`], which exists iff
/// `(|kappa| < 1, r|kappa| > 1)` or `(|kappa| > 1, r|kappa| < 1)`.
pub fn t_crit(kappa: f64, r: f64) -> Result<f64> {
    let k = kappa.abs();
    let rk = r * k;
    let holds = (k < 1.0 && rk > 1.0) || (k > 1.0 && rk < 1.0);
    if !holds || !(r > 0.0) {
        return Err(Error::NoRealRoot(format!(
            "f_kr has no root on [0, inf) for kappa = {kappa}, r = {r}"
        )));
    }
    Ok((12.0 * (1.0 - kappa * kappa) / (kappa * kappa * r * r - 1.0)).sqrt())
}

/// `sqrt(6 / r_y^2 (1 - cos s) / (2 + cos s))`, i.e. `tau_m h_-` as a
/// function of `s = m h_y`.
pub fn frak_h(ry: f64, s: f64) -> Result<f64> {
    if !(ry > 0.0) {
        return Err(Error::domain(format!("frak_h needs r_y > 0, got {ry}")));
    }
    if !(s >= 0.0) || s > PI * (1.0 + 4.0 * f64::EPSILON) {
        return Err(Error::domain(format!("frak_h needs s in [0, pi], got {s}")));
    }
    let half = (0.5 * s).sin();
    let one_minus_cos = 2.0 * half * half;
    Ok((6.0 / (ry * ry) * one_minus_cos / (2.0 + s.cos())).sqrt())
}

/// The unique `s` in `(0, pi]` with `frak_h(r_y, s) = t_crit(kappa, r)`.
pub fn s_crit(kappa: f64, r: f64, ry: f64) -> Result<f64> {
    let k = kappa.abs();
    let k2 = kappa * kappa;
    let rhs = 1.0 + ry * ry * (1.0 - k2);
    let lhs = r * r * k2;
    let holds = (k < 1.0 && lhs > rhs) || (k > 1.0 && lhs < rhs);
    if !holds || !(r > 0.0) || !(ry > 0.0) {
        return Err(Error::NoRealRoot(format!(
            "frak_h(r_y, .) never reaches t_crit for kappa = {kappa}, r = {r}, r_y = {ry}"
        )));
    }
    let x = ry * ry * (1.0 - k2);
    let arg = 1.0 + 6.0 * x / ((1.0 - k2 * r * r) - 2.0 * x);
    clamped_acos(arg)
}

fn clamped_acos(arg: f64) -> Result<f64> {
    if arg > 1.0 + ACOS_CLAMP_TOL || arg < -1.0 - ACOS_CLAMP_TOL || !arg.is_finite() {
        return Err(Error::Consistency(format!(
            "arccos argument {arg} lies outside [-1, 1] beyond tolerance"
        )));
    }
    Ok(arg.clamp(-1.0, 1.0).acos())
}

/// Square root of the `m`-th generalized eigenvalue of the 1D P1
/// stiffness/mass pair on `(0, pi)` with `M = pi / h_y` cells.
pub fn discrete_lambda_hat(m: usize, hy: f64) -> Result<f64> {
    if !(hy > 0.0) || hy > PI {
        return Err(Error::domain(format!("discrete_lambda_hat needs h_y in (0, pi], got {hy}")));
    }
    let big_m = PI / hy;
    if m == 0 || m as f64 > big_m - 1.0 + 1e-9 {
        return Err(Error::domain(format!(
            "mode {m} outside 1..=M-1 with M = {big_m}"
        )));
    }
    Ok(frak_h(1.0, m as f64 * hy)? / hy)
}

/// `ln frak_q(t)`; `-inf` where `frak_q` vanishes (`t^2 = 6`).
fn ln_frak_q(t: f64) -> f64 {
    if t == 0.0 {
        return -2.0;
    }
    let t2 = t * t;
    // numerator * denominator = (1 - t^2/6)^2, so the ratio inside the
    // power is (1 - t^2/6)^2 / den^2 and needs no subtraction of nearby terms.
    let den_ln = (t2 / 3.0 + t * (1.0 + t2 / 12.0).sqrt()).ln_1p();
    let num_ln = if t2 < 3.0 {
        (-t2 / 6.0).ln_1p()
    } else {
        (t2 / 6.0 - 1.0).abs().ln()
    };
    2.0 * (num_ln - den_ln) / t
}

/// `frak_q(t)`, extended continuously by `e^-2` at `t = 0`.
pub fn frak_q(t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("frak_q needs t >= 0, got {t}")));
    }
    Ok(ln_frak_q(t).exp())
}

/// `(1 - q^n) / (1 + q^n)` for `q` in `[0, 1)`.
pub fn frak_j(n: f64, q: f64) -> Result<f64> {
    if !(n > 0.0) || !(0.0..1.0).contains(&q) {
        return Err(Error::domain(format!("frak_j needs n > 0 and q in [0, 1), got n = {n}, q = {q}")));
    }
    let qn = if q == 0.0 { 0.0 } else { (n * q.ln()).exp() };
    Ok((1.0 - qn) / (1.0 + qn))
}

fn frak_j_from_ln(n: f64, ln_q: f64) -> f64 {
    let qn = (n * ln_q).exp();
    (1.0 - qn) / (1.0 + qn)
}

/// `frak_j(lambda L, frak_q(t)) / frak_j(lambda L, frak_q(r t))`: the
/// factor by which the Dirichlet boundaries perturb the width ratio.
pub fn frak_z(r: f64, lambda: f64, half_width: f64, t: f64) -> Result<f64> {
    if !(r > 0.0) || !(lambda > 0.0) || !(half_width > 0.0) || !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!(
            "frak_z needs r, lambda, L > 0 and t >= 0, got r = {r}, lambda = {lambda}, L = {half_width}, t = {t}"
        )));
    }
    let n = lambda * half_width;
    Ok(frak_j_from_ln(n, ln_frak_q(t)) / frak_j_from_ln(n, ln_frak_q(r * t)))
}

/// Bounded-domain counterpart of [`f_kr`].
pub fn f_tilde(kappa: f64, r: f64, lambda: f64, half_width: f64, t: f64) -> Result<f64> {
    let z = frak_z(r, lambda, half_width, t)?;
    let rho = width_ratio(r, t) * z;
    Ok((1.0 + kappa * rho) / (1.0 + rho))
}

/// Which discretisation a diagonal entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiagonalVariant {
    /// Semi-discrete (x only) on the infinite strip.
    SemiUnbounded,
    /// Fully discrete on the infinite strip.
    FullUnbounded,
    /// Semi-discrete on `(-L, L) x (0, pi)`.
    SemiBounded,
    /// Fully discrete on `(-L, L) x (0, pi)`.
    FullBounded,
}

impl DiagonalVariant {
    pub fn is_full(self) -> bool {
        matches!(self, Self::FullUnbounded | Self::FullBounded)
    }

    pub fn is_bounded(self) -> bool {
        matches!(self, Self::SemiBounded | Self::FullBounded)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalEntry {
    pub mode_m: usize,
    pub variant: DiagonalVariant,
    pub value: f64,
}

/// The `y`-eigenvalue that couples to the x-direction for mode `m`.
pub fn mode_lambda(mesh: &MeshConfig, m: usize, variant: DiagonalVariant) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("mode index must be >= 1"));
    }
    if variant.is_full() {
        if m >= mesh.big_m() {
            return Err(Error::domain(format!(
                "mode {m} outside 1..=M-1 with M = {}",
                mesh.big_m()
            )));
        }
        discrete_lambda_hat(m, mesh.h_y())
    } else {
        Ok(m as f64)
    }
}

/// Side coefficients for mode `m` of `variant`, negative side first.
pub fn side_coefficients(
    mesh: &MeshConfig,
    m: usize,
    variant: DiagonalVariant,
) -> Result<(f64, SideCoefficients, SideCoefficients)> {
    let lambda = mode_lambda(mesh, m, variant)?;
    let minus = SideCoefficients::new(lambda, mesh.h_minus())?;
    let plus = SideCoefficients::new(lambda, mesh.h_plus())?;
    Ok((lambda, minus, plus))
}

pub fn mode_coefficients(mesh: &MeshConfig, m: usize, variant: DiagonalVariant) -> Result<ModeCoefficients> {
    let (lambda, minus, plus) = side_coefficients(mesh, m, variant)?;
    Ok(ModeCoefficients::from_sides(m, lambda, &minus, &plus))
}

/// Diagonal entry from the recurrence roots: the interface-row quotient.
pub fn diagonal_by_quotient(
    phys: &PhysicalConfig,
    mesh: &MeshConfig,
    m: usize,
    variant: DiagonalVariant,
) -> Result<f64> {
    let (_, minus, plus) = side_coefficients(mesh, m, variant)?;
    let (wm, wp) = if variant.is_bounded() {
        (minus.bounded_weight(mesh.n_minus()), plus.bounded_weight(mesh.n_plus()))
    } else {
        (minus.unbounded_weight(), plus.unbounded_weight())
    };
    Ok((phys.sigma_minus() * wm + phys.sigma_plus() * wp) / (wm + wp))
}

/// Diagonal entry from the composed scalar functions.
pub fn diagonal_by_function(
    phys: &PhysicalConfig,
    mesh: &MeshConfig,
    m: usize,
    variant: DiagonalVariant,
) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("mode index must be >= 1"));
    }
    let kappa = phys.kappa();
    let r = mesh.ratio_r();
    let hm = mesh.h_minus();
    let t = if variant.is_full() {
        if m >= mesh.big_m() {
            return Err(Error::domain(format!(
                "mode {m} outside 1..=M-1 with M = {}",
                mesh.big_m()
            )));
        }
        let ry = mesh.ratio_ry();
        frak_h(ry, (ry * m as f64 * hm).min(PI))?
    } else {
        m as f64 * hm
    };
    let f = if variant.is_bounded() {
        let lambda = mode_lambda(mesh, m, variant)?;
        f_tilde(kappa, r, lambda, mesh.half_width(), t)?
    } else {
        f_kr(kappa, r, t)?
    };
    Ok(phys.sigma_minus() * f)
}

/// Evaluates the diagonal entry by both routes, checks that they agree and
/// returns the function-form value.
pub fn diagonal_entry(
    phys: &PhysicalConfig,
    mesh: &MeshConfig,
    m: usize,
    variant: DiagonalVariant,
) -> Result<DiagonalEntry> {
    mesh.check_against(phys)?;
    let by_quotient = diagonal_by_quotient(phys, mesh, m, variant)?;
    let by_function = diagonal_by_function(phys, mesh, m, variant)?;
    let scale = phys.sigma_minus().abs().max(phys.sigma_plus().abs());
    if (by_quotient - by_function).abs() > ROUTE_TOL * scale {
        return Err(Error::Consistency(format!(
            "diagonal entry of mode {m} ({variant:?}): quotient form {by_quotient:e} \
             vs function form {by_function:e}"
        )));
    }
    Ok(DiagonalEntry {
        mode_m: m,
        variant,
        value: by_function,
    })
}

/// Coefficients `beta_n` of an interface profile in the nodal basis, for
/// `n = first_index .. first_index + coefficients.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeProfile {
    pub mode_m: usize,
    pub variant: DiagonalVariant,
    pub first_index: i64,
    pub coefficients: Vec<f64>,
    /// `beta_0`, the normalisation constant.
    pub beta0: f64,
}

impl ModeProfile {
    pub fn beta(&self, n: i64) -> f64 {
        let k = n - self.first_index;
        if k < 0 || k as usize >= self.coefficients.len() {
            0.0
        } else {
            self.coefficients[k as usize]
        }
    }

    /// Coefficients on the interior nodes `-N_minus+1 ..= N_plus-1` of a
    /// bounded mesh.
    pub fn interior(&self, mesh: &MeshConfig) -> Vec<f64> {
        let lo = -(mesh.n_minus() as i64) + 1;
        let hi = mesh.n_plus() as i64 - 1;
        (lo..=hi).map(|n| self.beta(n)).collect()
    }
}

/// `mu^n` for the decaying branch, with `0^0 = 1`.
fn powi(mu: f64, n: usize) -> f64 {
    if n == 0 {
        1.0
    } else if mu == 0.0 {
        0.0
    } else {
        mu.powi(n as i32)
    }
}

/// Profile coefficient `n` cells away from the interface on a side with
/// Dirichlet node after `n_cells` cells:
/// `(mu1^n - nu^N mu2^n) / (1 - nu^N) = (mu1^n - mu1^(2N-n)) / (1 - mu1^(2N))`.
fn bounded_coefficient(roots: &Roots, n: usize, n_cells: usize) -> f64 {
    let mu = roots.mu1;
    let num = powi(mu, n) - powi(mu, 2 * n_cells - n);
    num / (1.0 - roots.nu_pow(n_cells))
}

/// The interface profile of mode `m` for `variant`.
///
/// Bounded variants return all nodes `-N_minus ..= N_plus` (boundary
/// values are zero). Unbounded variants are truncated on each side at the
/// first power `|mu|^n < tail_cutoff`.
pub fn mode_profile(
    phys: &PhysicalConfig,
    mesh: &MeshConfig,
    m: usize,
    variant: DiagonalVariant,
    tail_cutoff: f64,
) -> Result<ModeProfile> {
    mesh.check_against(phys)?;
    let (_, minus, plus) = side_coefficients(mesh, m, variant)?;
    if variant.is_bounded() {
        let (nm, np) = (mesh.n_minus(), mesh.n_plus());
        let radicand = minus.bounded_weight(nm) + plus.bounded_weight(np);
        if !(radicand > 0.0) || !radicand.is_finite() {
            return Err(Error::DegenerateNormalization {
                mode: m,
                detail: format!("radicand {radicand} for N- = {nm}, N+ = {np}"),
            });
        }
        let beta0 = 1.0 / radicand.sqrt();
        let mut coefficients = Vec::with_capacity(nm + np + 1);
        for k in (0..=nm).rev() {
            coefficients.push(beta0 * bounded_coefficient(&minus.roots, k, nm));
        }
        for k in 1..=np {
            coefficients.push(beta0 * bounded_coefficient(&plus.roots, k, np));
        }
        Ok(ModeProfile {
            mode_m: m,
            variant,
            first_index: -(nm as i64),
            coefficients,
            beta0,
        })
    } else {
        if !(tail_cutoff > 0.0 && tail_cutoff < 1.0) {
            return Err(Error::domain(format!("tail cutoff must lie in (0, 1), got {tail_cutoff}")));
        }
        let radicand = minus.unbounded_weight() + plus.unbounded_weight();
        if !(radicand > 0.0) {
            return Err(Error::DegenerateNormalization {
                mode: m,
                detail: format!("radicand {radicand}"),
            });
        }
        let beta0 = 1.0 / radicand.sqrt();
        let tail = |mu: f64| -> Vec<f64> {
            let mut out = Vec::new();
            let mut p = mu;
            while p.abs() >= tail_cutoff {
                out.push(beta0 * p);
                p *= mu;
            }
            out
        };
        let left = tail(minus.roots.mu1);
        let right = tail(plus.roots.mu1);
        let mut coefficients: Vec<f64> = left.iter().rev().copied().collect();
        coefficients.push(beta0);
        coefficients.extend(right);
        Ok(ModeProfile {
            mode_m: m,
            variant,
            first_index: -(left.len() as i64),
            coefficients,
            beta0,
        })
    }
}
