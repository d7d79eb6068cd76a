use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::solve::{check_dense, solve_per_mode};
use crate::config::{MeshConfig, PhysicalConfig};
use crate::error::{Error, Result};
use crate::fem::{self, SineBasis};
use crate::spectral::{self, DiagonalVariant};
use crate::stability;

/// Eigenvalues of the symmetric-definite pencil `(a, g)`, ascending.
pub fn generalized_eigenvalues(a: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<Vec<f64>> {
    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Consistency("Gram matrix is not positive definite".into()))?;
    let l = chol.l();
    // C = L^-1 A L^-T
    let y = l
        .solve_lower_triangular(a)
        .ok_or_else(|| Error::Consistency("triangular solve failed".into()))?;
    let c = l
        .solve_lower_triangular(&y.transpose())
        .ok_or_else(|| Error::Consistency("triangular solve failed".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    let mut values: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// All generalized eigenvalues of `(A, G)` by a dense solve.
pub fn generalized_spectrum_small(phys: &PhysicalConfig, mesh: &MeshConfig) -> Result<Vec<f64>> {
    mesh.check_against(phys)?;
    check_dense(mesh)?;
    let (a, g) = fem::assemble_2d(phys, mesh)?;
    generalized_eigenvalues(&a.to_dense(), &g.to_dense())
}

/// The spectrum implied by the block structure: `sigma_minus` with
/// multiplicity `(N_minus - 1)(M - 1)`, `sigma_plus` with `(N_plus - 1)(M - 1)`
/// and one interface value per sine mode. Ascending.
pub fn predicted_spectrum(phys: &PhysicalConfig, mesh: &MeshConfig) -> Result<Vec<f64>> {
    let ny = mesh.ny();
    let mut out = Vec::with_capacity(mesh.unknowns());
    out.extend(std::iter::repeat_n(phys.sigma_minus(), (mesh.n_minus() - 1) * ny));
    out.extend(std::iter::repeat_n(phys.sigma_plus(), (mesh.n_plus() - 1) * ny));
    for m in 1..=ny {
        out.push(spectral::diagonal_entry(phys, mesh, m, DiagonalVariant::FullBounded)?.value);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Predicted and computed eigenvalues side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumComparison {
    pub predicted: Vec<f64>,
    pub computed: Vec<f64>,
    pub max_deviation: f64,
}

pub fn compare_spectrum(phys: &PhysicalConfig, mesh: &MeshConfig) -> Result<SpectrumComparison> {
    let computed = generalized_spectrum_small(phys, mesh)?;
    let predicted = predicted_spectrum(phys, mesh)?;
    if computed.len() != predicted.len() {
        return Err(Error::Consistency(format!(
            "{} computed eigenvalues vs {} predicted",
            computed.len(),
            predicted.len()
        )));
    }
    let max_deviation = computed
        .iter()
        .zip(&predicted)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(SpectrumComparison {
        predicted,
        computed,
        max_deviation,
    })
}

/// `|A x|_{G^-1} / |x|_G` for `x` = (interface profile of mode `m`) (x)
/// (sine mode `m`). For an exact generalized eigenvector this is `|d_m|`.
pub fn kernel_residual(phys: &PhysicalConfig, mesh: &MeshConfig, m: usize) -> Result<f64> {
    mesh.check_against(phys)?;
    if m == 0 || m > mesh.ny() {
        return Err(Error::domain(format!("mode {m} outside 1..=M-1 with M = {}", mesh.big_m())));
    }
    let profile = spectral::mode_profile(phys, mesh, m, DiagonalVariant::FullBounded, spectral::TAIL_CUTOFF)?;
    let px = profile.interior(mesh);
    let basis = SineBasis::new(mesh.big_m());
    let theta = basis.column(m - 1);
    let ny = mesh.ny();
    let mut x = vec![0.0; mesh.unknowns()];
    for (i, pi) in px.iter().enumerate() {
        for (j, tj) in theta.iter().enumerate() {
            x[i * ny + j] = pi * tj;
        }
    }
    let (a, g) = fem::assemble_2d(phys, mesh)?;
    let ax = a.apply(&x);
    let (z, _, _) = solve_per_mode(&g.kx, &g.mx, &basis, &ax)?;
    let dual: f64 = ax.iter().zip(&z).map(|(p, q)| p * q).sum();
    let primal: f64 = g.apply(&x).iter().zip(&x).map(|(p, q)| p * q).sum();
    Ok((dual / primal).sqrt())
}

/// How [`min_generalized_singular`] evaluates the smallest `|eigenvalue|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SingularMethod {
    /// Dense eigensolve (refused above the dense limit).
    Dense,
    /// Closed form from the block structure.
    Analytic,
    /// Dense when small enough, analytic otherwise.
    #[default]
    Auto,
}

/// Smallest `|mu|` with `A v = mu G v`; its reciprocal is the norm of the
/// discrete inverse in the H^1_0 metric.
pub fn min_generalized_singular(phys: &PhysicalConfig, mesh: &MeshConfig, method: SingularMethod) -> Result<f64> {
    let dense = match method {
        SingularMethod::Dense => true,
        SingularMethod::Analytic => false,
        SingularMethod::Auto => check_dense(mesh).is_ok(),
    };
    if dense {
        let values = generalized_spectrum_small(phys, mesh)?;
        return Ok(values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs())));
    }
    let (_, mut best) = stability::min_abs_diagonal(phys, mesh)?;
    if mesh.n_minus() > 1 {
        best = best.min(phys.sigma_minus().abs());
    }
    if mesh.n_plus() > 1 {
        best = best.min(phys.sigma_plus().abs());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_case(n_minus: usize, n_plus: usize, big_m: usize) -> (PhysicalConfig, MeshConfig) {
        let l = 11f64.sqrt() * std::f64::consts::PI / 4.0;
        (
            PhysicalConfig::new(-1.0, 1.2, l).unwrap(),
            MeshConfig::from_counts(l, n_minus, n_plus, big_m).unwrap(),
        )
    }

    #[test]
    fn two_by_two_spectrum() {
        let (phys, mesh) = reference_case(1, 2, 2);
        let cmp = compare_spectrum(&phys, &mesh).unwrap();
        assert_eq!(cmp.computed.len(), 2);
        assert!(cmp.max_deviation < 1e-10);
        assert!(cmp.computed.iter().any(|v| (v - 1.2).abs() < 1e-10));
    }

    #[test]
    fn gram_is_positive_definite() {
        let (phys, mesh) = reference_case(2, 4, 2);
        let (_, g) = fem::assemble_2d(&phys, &mesh).unwrap();
        assert!(g.to_dense().cholesky().is_some());
    }

    #[test]
    fn multiset_match_small() {
        let (phys, mesh) = reference_case(2, 4, 4);
        assert!(compare_spectrum(&phys, &mesh).unwrap().max_deviation < 1e-9);
    }

    #[test]
    fn symmetric_case_residual() {
        let phys = PhysicalConfig::new(-1.0, 0.5, 2.0).unwrap();
        let mesh = MeshConfig::from_counts(2.0, 4, 4, 6).unwrap();
        for m in 1..6 {
            assert!((kernel_residual(&phys, &mesh, m).unwrap() - 0.25).abs() < 1e-10);
        }
    }

    #[test]
    fn analytic_shortcut_matches_dense() {
        let (phys, mesh) = reference_case(3, 2, 8);
        let d = min_generalized_singular(&phys, &mesh, SingularMethod::Dense).unwrap();
        let a = min_generalized_singular(&phys, &mesh, SingularMethod::Analytic).unwrap();
        assert!((d - a).abs() < 1e-9);
    }
}
