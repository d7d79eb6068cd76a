//! Randomised checks of the closed-form identities.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::config::{MeshConfig, PhysicalConfig};
use crate::error::Result;
use crate::spectral::{self, DiagonalVariant};
use crate::stability::{self, Regime};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(name: &str, cases: usize, max_deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            cases,
            max_deviation,
            tolerance,
            passed: max_deviation <= tolerance,
        }
    }
}

pub const IDENTITY_TOL: f64 = 1e-10;
pub const Q_LIMIT_TOL: f64 = 1e-5;

fn log_uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn kappa(rng: &mut StdRng) -> f64 {
    loop {
        let k = rng.random_range(-3.0..-0.05);
        if (k + 1.0f64).abs() > 0.02 {
            return k;
        }
    }
}

/// `f_kr(kappa, r, t_crit) = 0` on unstable `(kappa, r)`.
pub fn check_f_root(rng: &mut StdRng, cases: usize) -> Result<IdentityCheck> {
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < cases {
        let (k, r) = (kappa(rng), log_uniform(rng, 0.1, 10.0));
        let v = stability::classify_semi(k, r)?;
        if v.regime != Regime::Unstable {
            continue;
        }
        let t = spectral::t_crit(k, r)?;
        worst = worst.max(spectral::f_kr(k, r, t)?.abs());
        done += 1;
    }
    Ok(IdentityCheck::new("f_kr(t_crit) = 0", cases, worst, IDENTITY_TOL))
}

/// `frak_h(r_y, s_crit) = t_crit` on unstable `(kappa, r, r_y)`.
pub fn check_h_root(rng: &mut StdRng, cases: usize) -> Result<IdentityCheck> {
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < cases {
        let (k, r, ry) = (kappa(rng), log_uniform(rng, 0.1, 10.0), log_uniform(rng, 0.05, 5.0));
        let v = stability::classify_full(k, r, ry)?;
        if v.regime != Regime::Unstable {
            continue;
        }
        let t = spectral::t_crit(k, r)?;
        let s = spectral::s_crit(k, r, ry)?;
        worst = worst.max((spectral::frak_h(ry, s)? - t).abs() / t.max(1.0));
        done += 1;
    }
    Ok(IdentityCheck::new("frak_h(s_crit) = t_crit", cases, worst, IDENTITY_TOL))
}

/// Quotient and function forms of the diagonal entries agree.
pub fn check_dual_route(rng: &mut StdRng, cases: usize) -> Result<IdentityCheck> {
    let variants = [
        DiagonalVariant::SemiUnbounded,
        DiagonalVariant::FullUnbounded,
        DiagonalVariant::SemiBounded,
        DiagonalVariant::FullBounded,
    ];
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < cases {
        let sm = rng.random_range(-3.0..-0.1);
        let sp = rng.random_range(0.1..3.0);
        if (sp / sm + 1.0f64).abs() < 1e-3 {
            continue;
        }
        let l = rng.random_range(0.5..30.0);
        let phys = PhysicalConfig::new(sm, sp, l)?;
        let mesh = MeshConfig::from_counts(
            l,
            rng.random_range(1..=60),
            rng.random_range(1..=60),
            rng.random_range(2..=60),
        )?;
        let variant = variants[rng.random_range(0..4)];
        let m = if variant.is_full() {
            rng.random_range(1..mesh.big_m())
        } else {
            rng.random_range(1..=60)
        };
        let q = spectral::diagonal_by_quotient(&phys, &mesh, m, variant)?;
        let f = spectral::diagonal_by_function(&phys, &mesh, m, variant)?;
        worst = worst.max((q - f).abs() / sm.abs().max(sp));
        done += 1;
    }
    Ok(IdentityCheck::new("diagonal entry: quotient form = function form", cases, worst, IDENTITY_TOL))
}

/// `mu1 mu2 = 1` off the degenerate branch.
pub fn check_root_product(rng: &mut StdRng, cases: usize) -> Result<IdentityCheck> {
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < cases {
        let lambda = log_uniform(rng, 1.0, 200.0);
        let h = log_uniform(rng, 1e-3, 3.0);
        let (a, b) = spectral::local_coeffs(lambda, h)?;
        let roots = spectral::mu_roots(a, b)?;
        if roots.degenerate {
            continue;
        }
        worst = worst.max((roots.mu1 * roots.mu2 - 1.0).abs());
        done += 1;
    }
    Ok(IdentityCheck::new("mu1 mu2 = 1", cases, worst, IDENTITY_TOL))
}

/// `frak_q(1e-6)` is within `1e-5` of `e^-2`.
pub fn check_q_limit() -> Result<IdentityCheck> {
    let dev = (spectral::frak_q(1e-6)? - (-2f64).exp()).abs();
    Ok(IdentityCheck::new("frak_q(1e-6) = e^-2", 1, dev, Q_LIMIT_TOL))
}

/// All identity checks with `cases` random samples each.
pub fn identity_suite(cases: usize, seed: u64) -> Result<Vec<IdentityCheck>> {
    let mut rng = StdRng::seed_from_u64(seed);
    Ok(vec![
        check_f_root(&mut rng, cases)?,
        check_h_root(&mut rng, cases)?,
        check_dual_route(&mut rng, cases)?,
        check_root_product(&mut rng, cases)?,
        check_q_limit()?,
    ])
}
