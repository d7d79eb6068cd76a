//! Stability classification of `(kappa, r, r_y)` and critical mesh sizes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::config::{MeshConfig, PhysicalConfig};
use crate::error::{Error, Result};
use crate::par;
use crate::spectral::{self, DiagonalVariant};

/// Absolute tolerance on the defining inequalities below which a
/// parameter set is reported as [`Regime::Boundary`].
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Default slack for the bounded-domain conditions.
pub const DEFAULT_EPSILON: f64 = 0.05;

const BOUNDED_CAVEAT: &str = "bound holds for h_minus small enough; the threshold is not quantified";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Stable,
    Unstable,
    Boundary,
}

/// Which inequality decided the verdict. `vv` marks the stability
/// conditions, `L` the slacked bounded-domain ones, `y` the fully discrete
/// ones; `a` is the `|kappa| < 1` branch and `b` the `|kappa| > 1` branch.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionId {
    AssR_a,
    AssR_b,
    AssR_vv_a,
    AssR_vv_b,
    AssRy_a,
    AssRy_b,
    AssRy_vv_a,
    AssRy_vv_b,
    AssRL_vv_a,
    AssRL_vv_b,
    AssRyL_vv_a,
    AssRyL_vv_b,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub regime: Regime,
    pub condition_id: ConditionId,
    /// The minimum in the denominator of the inverse-norm bound.
    pub min_factor: Option<f64>,
    /// `1 / (|sigma_minus| * min_factor)`; computed for `|sigma_minus| = 1`
    /// unless rescaled with [`StabilityVerdict::scaled`].
    pub inverse_norm_bound: Option<f64>,
    pub epsilon_slack: Option<f64>,
    pub critical_t: Option<f64>,
    pub critical_s: Option<f64>,
    pub notes: Vec<String>,
    pub caveat: Option<String>,
}

impl StabilityVerdict {
    fn new(regime: Regime, condition_id: ConditionId) -> Self {
        Self {
            regime,
            condition_id,
            min_factor: None,
            inverse_norm_bound: None,
            epsilon_slack: None,
            critical_t: None,
            critical_s: None,
            notes: Vec::new(),
            caveat: None,
        }
    }

    fn stable(condition_id: ConditionId, min_factor: f64) -> Self {
        let mut v = Self::new(Regime::Stable, condition_id);
        v.min_factor = Some(min_factor);
        v.inverse_norm_bound = Some(1.0 / min_factor);
        v
    }

    /// Rescales the inverse-norm bound for a given `sigma_minus`.
    pub fn scaled(mut self, sigma_minus: f64) -> Self {
        if let Some(f) = self.min_factor {
            self.inverse_norm_bound = Some(1.0 / (sigma_minus.abs() * f));
        }
        self
    }
}

fn check_kappa_r(kappa: f64, r: f64) -> Result<()> {
    if !(kappa < 0.0) || !kappa.is_finite() {
        return Err(Error::domain(format!("kappa must be negative, got {kappa}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("r must be positive, got {r}")));
    }
    Ok(())
}

fn check_ry(ry: f64) -> Result<()> {
    if !(ry > 0.0) || !ry.is_finite() {
        return Err(Error::domain(format!("r_y must be positive, got {ry}")));
    }
    Ok(())
}

/// `min{1, |kappa|, |1+kappa|/2, |1+r kappa|/(1+r)}`.
pub fn semi_min_factor(kappa: f64, r: f64) -> f64 {
    [
        1.0,
        kappa.abs(),
        ((1.0 + kappa) / 2.0).abs(),
        ((1.0 + r * kappa) / (1.0 + r)).abs(),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min)
}

/// Fully discrete counterpart of [`semi_min_factor`].
pub fn full_min_factor(kappa: f64, r: f64, ry: f64) -> f64 {
    let p = (1.0 + ry * ry).sqrt();
    let q = (r * r + ry * ry).sqrt();
    [
        1.0,
        kappa.abs(),
        ((1.0 + kappa) / 2.0).abs(),
        ((p + kappa * q) / (p + q)).abs(),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min)
}

/// Bounded-domain minimum with slack `epsilon` (semi-discrete if `ry` is
/// `None`).
pub fn bounded_min_factor(kappa: f64, r: f64, ry: Option<f64>, epsilon: f64) -> f64 {
    let mut out = 1f64.min(kappa.abs());
    for p in [1.0, -1.0] {
        let k = (1.0 + p * epsilon) * kappa;
        out = out.min((1.0 + k).abs() / (2.0 + epsilon));
        let last = match ry {
            None => (1.0 + k * r).abs() / (1.0 + (1.0 + epsilon) * r),
            Some(ry) => {
                let a = (1.0 + ry * ry).sqrt();
                let b = (r * r + ry * ry).sqrt();
                (a + k * b).abs() / (a + (1.0 + epsilon) * b)
            }
        };
        out = out.min(last);
    }
    out
}

pub fn classify_semi(kappa: f64, r: f64) -> Result<StabilityVerdict> {
    classify_semi_tol(kappa, r, BOUNDARY_TOL)
}

pub fn classify_semi_tol(kappa: f64, r: f64, tol: f64) -> Result<StabilityVerdict> {
    check_kappa_r(kappa, r)?;
    let k = kappa.abs();
    let rk = r * k;
    if (k - 1.0).abs() <= tol || (rk - 1.0).abs() <= tol {
        return Ok(StabilityVerdict::new(Regime::Boundary, ConditionId::None));
    }
    let verdict = match (k < 1.0, rk > 1.0) {
        (true, true) | (false, false) => {
            let id = if k < 1.0 { ConditionId::AssR_a } else { ConditionId::AssR_b };
            let mut v = StabilityVerdict::new(Regime::Unstable, id);
            v.critical_t = Some(spectral::t_crit(kappa, r)?);
            v
        }
        (true, false) => StabilityVerdict::stable(ConditionId::AssR_vv_a, semi_min_factor(kappa, r)),
        (false, true) => StabilityVerdict::stable(ConditionId::AssR_vv_b, semi_min_factor(kappa, r)),
    };
    Ok(verdict)
}

pub fn classify_full(kappa: f64, r: f64, ry: f64) -> Result<StabilityVerdict> {
    classify_full_tol(kappa, r, ry, BOUNDARY_TOL)
}

pub fn classify_full_tol(kappa: f64, r: f64, ry: f64, tol: f64) -> Result<StabilityVerdict> {
    check_kappa_r(kappa, r)?;
    check_ry(ry)?;
    let k = kappa.abs();
    let k2 = kappa * kappa;
    let gap = r * r * k2 - (1.0 + ry * ry * (1.0 - k2));
    if (k - 1.0).abs() <= tol || gap.abs() <= tol {
        return Ok(StabilityVerdict::new(Regime::Boundary, ConditionId::None));
    }
    let mut verdict = match (k < 1.0, gap > 0.0) {
        (true, true) | (false, false) => {
            let id = if k < 1.0 { ConditionId::AssRy_a } else { ConditionId::AssRy_b };
            let mut v = StabilityVerdict::new(Regime::Unstable, id);
            v.critical_t = Some(spectral::t_crit(kappa, r)?);
            v.critical_s = Some(spectral::s_crit(kappa, r, ry)?);
            v
        }
        (true, false) => StabilityVerdict::stable(ConditionId::AssRy_vv_a, full_min_factor(kappa, r, ry)),
        (false, true) => StabilityVerdict::stable(ConditionId::AssRy_vv_b, full_min_factor(kappa, r, ry)),
    };
    if verdict.regime == Regime::Stable && classify_semi_tol(kappa, r, tol)?.regime == Regime::Unstable {
        verdict.notes.push(format!(
            "the semi-discrete problem with the same r would be unstable (critical t = {:.16e}); \
             the y-mesh ratio removes the critical mesh sizes",
            spectral::t_crit(kappa, r)?
        ));
    }
    Ok(verdict)
}

/// Bounded-domain verdict with slack `epsilon`; `ry = None` selects the
/// semi-discretisation.
pub fn classify_bounded(kappa: f64, r: f64, ry: Option<f64>, epsilon: f64) -> Result<StabilityVerdict> {
    check_kappa_r(kappa, r)?;
    if let Some(ry) = ry {
        check_ry(ry)?;
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let k = kappa.abs();
    let slack_holds = |p: f64| -> bool {
        let ke = k * (1.0 + p * epsilon);
        let branch_a = p > 0.0;
        let first = if branch_a { ke < 1.0 } else { ke > 1.0 };
        let second = match ry {
            None => {
                let rke = r * ke;
                if branch_a { rke < 1.0 } else { rke > 1.0 }
            }
            Some(ry) => {
                let lhs = r * r * ke * ke;
                let rhs = 1.0 + ry * ry * (1.0 - ke * ke);
                if branch_a { lhs < rhs } else { lhs > rhs }
            }
        };
        first && second
    };
    let stable_id = match (ry.is_some(), slack_holds(1.0), slack_holds(-1.0)) {
        (false, true, _) => Some(ConditionId::AssRL_vv_a),
        (false, _, true) => Some(ConditionId::AssRL_vv_b),
        (true, true, _) => Some(ConditionId::AssRyL_vv_a),
        (true, _, true) => Some(ConditionId::AssRyL_vv_b),
        _ => None,
    };
    if let Some(id) = stable_id {
        let mut v = StabilityVerdict::stable(id, bounded_min_factor(kappa, r, ry, epsilon));
        v.epsilon_slack = Some(epsilon);
        v.caveat = Some(BOUNDED_CAVEAT.to_string());
        return Ok(v);
    }
    let unslacked = match ry {
        None => classify_semi(kappa, r)?,
        Some(ry) => classify_full(kappa, r, ry)?,
    };
    let mut v = if unslacked.regime == Regime::Unstable {
        unslacked
    } else {
        StabilityVerdict::new(Regime::Boundary, ConditionId::None)
    };
    v.epsilon_slack = Some(epsilon);
    Ok(v)
}

/// Critical `h_minus` for `m = 1..=m_max`: `s_crit / (r_y m)` for the full
/// discretisation, `t_crit / m` for the semi-discretisation (`ry = None`).
pub fn critical_meshes(kappa: f64, r: f64, ry: Option<f64>, m_max: usize) -> Result<Vec<(usize, f64)>> {
    if m_max == 0 {
        return Err(Error::domain("m_max must be at least 1"));
    }
    let (verdict, scale) = match ry {
        None => {
            let v = classify_semi(kappa, r)?;
            let t = v.critical_t;
            (v, t)
        }
        Some(ry) => {
            let v = classify_full(kappa, r, ry)?;
            let s = v.critical_s.map(|s| s / ry);
            (v, s)
        }
    };
    match (verdict.regime, scale) {
        (Regime::Unstable, Some(base)) => Ok((1..=m_max).map(|m| (m, base / m as f64)).collect()),
        _ => Err(Error::NoCriticalMesh(format!(
            "kappa = {kappa}, r = {r}, r_y = {ry:?} is classified {:?}",
            verdict.regime
        ))),
    }
}

/// `r_y` such that the critical angle equals `pi l / k`.
pub fn solve_ry_for_rational_s(kappa: f64, r: f64, l: usize, k: usize) -> Result<f64> {
    check_kappa_r(kappa, r)?;
    if l == 0 || l >= k {
        return Err(Error::domain(format!("need 0 < l < k, got l = {l}, k = {k}")));
    }
    let target = PI * l as f64 / k as f64;
    let c = target.cos() - 1.0;
    let k2 = kappa * kappa;
    let rad = c * (1.0 - k2 * r * r) / ((1.0 - k2) * (6.0 + 2.0 * c));
    if !(rad > 0.0) || !rad.is_finite() {
        return Err(Error::NoAdmissibleRatio(format!(
            "r_y^2 = {rad} for kappa = {kappa}, r = {r}, s = pi {l}/{k}"
        )));
    }
    let ry = rad.sqrt();
    let s = spectral::s_crit(kappa, r, ry).map_err(|e| match e {
        Error::NoRealRoot(msg) => Error::NoAdmissibleRatio(msg),
        other => other,
    })?;
    if (s - target).abs() > 1e-9 {
        return Err(Error::Consistency(format!(
            "substituting r_y = {ry} gives s_crit = {s}, expected {target}"
        )));
    }
    Ok(ry)
}

/// Smallest `|d|` over the fully discrete bounded-domain diagonal entries
/// `m = 1..M-1`; returns `(m_star, |d_{m_star}|)`.
pub fn min_abs_diagonal(phys: &PhysicalConfig, mesh: &MeshConfig) -> Result<(usize, f64)> {
    mesh.check_against(phys)?;
    let values = par::map_range(mesh.ny(), |i| {
        spectral::diagonal_entry(phys, mesh, i + 1, DiagonalVariant::FullBounded).map(|d| d.value.abs())
    });
    let mut best = (0, f64::INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        let v = v?;
        if v < best.1 {
            best = (i + 1, v);
        }
    }
    Ok(best)
}
