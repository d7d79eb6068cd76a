use proptest::prelude::*;

use signfem::fem::{self, Grid1D, Weight};
use signfem::harness::{
    read_csv, reference_physics, relative_max_difference, solve, solve_dense, write_csv, ManufacturedCase, Scenario,
    SweepRecord,
};
use signfem::spectral::{self, DiagonalVariant};
use signfem::stability::{self, Regime};
use signfem::{CountRounding, MeshConfig, PhysicalConfig};

fn kappa() -> impl Strategy<Value = f64> {
    (-3.0..-0.05f64).prop_filter("away from -1", |k| (k + 1.0).abs() > 0.02)
}

fn log_range(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn local_roots_are_reciprocal(lambda in log_range(0.5, 500.0), h in log_range(1e-3, 3.0)) {
        let (a, b) = spectral::local_coeffs(lambda, h).unwrap();
        prop_assert!(a > b.abs());
        let roots = spectral::mu_roots(a, b).unwrap();
        prop_assert!(roots.mu1.abs() < 1.0);
        if !roots.degenerate {
            prop_assert!((roots.mu1 * roots.mu2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn f_kr_monotone_with_predicted_sign(k in kappa(), r in log_range(0.1, 10.0), t1 in 0.0..50.0f64, dt in 1e-3..50.0f64) {
        let f1 = spectral::f_kr(k, r, t1).unwrap();
        let f2 = spectral::f_kr(k, r, t1 + dt).unwrap();
        let sign = ((k - 1.0) * (r * r - 1.0)).signum();
        prop_assert!(sign * (f2 - f1) >= -1e-14, "f({t1}) = {f1}, f({}) = {f2}", t1 + dt);
    }

    #[test]
    fn f_kr_root_or_lower_bound(k in kappa(), r in log_range(0.1, 10.0)) {
        let verdict = stability::classify_semi(k, r).unwrap();
        match verdict.regime {
            Regime::Unstable => {
                let t = spectral::t_crit(k, r).unwrap();
                prop_assert!(spectral::f_kr(k, r, t).unwrap().abs() < 1e-12);
            }
            Regime::Stable => {
                let floor = ((1.0 + k) / 2.0).abs().min(((1.0 + r * k) / (1.0 + r)).abs());
                let f0 = spectral::f_kr(k, r, 0.0).unwrap();
                for i in 0..=200 {
                    let f = spectral::f_kr(k, r, 5.0 * i as f64).unwrap();
                    prop_assert!(f * f0 > 0.0);
                    prop_assert!(f.abs() >= floor - 1e-12);
                }
            }
            Regime::Boundary => {}
        }
    }

    #[test]
    fn frak_h_maps_s_crit_to_t_crit(k in kappa(), r in log_range(0.1, 10.0), ry in log_range(0.05, 5.0)) {
        if stability::classify_full(k, r, ry).unwrap().regime == Regime::Unstable {
            let t = spectral::t_crit(k, r).unwrap();
            let s = spectral::s_crit(k, r, ry).unwrap();
            prop_assert!((spectral::frak_h(ry, s).unwrap() - t).abs() < 1e-12 * t.max(1.0));
        }
    }

    #[test]
    fn frak_z_tends_to_one(r in log_range(0.1, 10.0), lambda in 1.0..100.0f64, l in 0.5..30.0f64, t in 0.5..10.0f64) {
        prop_assume!(r * t >= 0.5 && r * t <= 10.0);
        if lambda * l >= 200.0 {
            prop_assert!((spectral::frak_z(r, lambda, l, t).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn frak_z_deviation_controlled_by_q_power(r in log_range(0.1, 10.0), n in 1.0..500.0f64, t in 0.01..50.0f64) {
        let worst = spectral::frak_q(t).unwrap().max(spectral::frak_q(r * t).unwrap()).powf(n);
        let z = spectral::frak_z(r, n, 1.0, t).unwrap();
        prop_assert!((z - 1.0).abs() <= 2.0 * worst / (1.0 - worst) + 1e-14);
    }

    #[test]
    fn frak_z_small_t(r in log_range(0.1, 10.0), lambda in 1.0..1e4f64, l in 0.5..30.0f64, t in 1e-9..1e-6f64) {
        prop_assert!((spectral::frak_z(r, lambda, l, t).unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn diagonal_routes_agree(
        sm in -3.0..-0.1f64,
        sp in 0.1..3.0f64,
        l in 0.5..30.0f64,
        n_minus in 1usize..40,
        n_plus in 1usize..40,
        big_m in 2usize..40,
        pick in 0usize..4,
        m_raw in 1usize..40,
    ) {
        prop_assume!((sp / sm + 1.0).abs() > 1e-3);
        let phys = PhysicalConfig::new(sm, sp, l).unwrap();
        let mesh = MeshConfig::from_counts(l, n_minus, n_plus, big_m).unwrap();
        let variant = [
            DiagonalVariant::SemiUnbounded,
            DiagonalVariant::FullUnbounded,
            DiagonalVariant::SemiBounded,
            DiagonalVariant::FullBounded,
        ][pick];
        let m = if variant.is_full() { 1 + m_raw % (big_m - 1) } else { m_raw };
        let q = spectral::diagonal_by_quotient(&phys, &mesh, m, variant).unwrap();
        let f = spectral::diagonal_by_function(&phys, &mesh, m, variant).unwrap();
        prop_assert!((q - f).abs() <= 1e-10 * sm.abs().max(sp));
    }

    #[test]
    fn full_reduces_to_semi_for_tiny_ry(k in kappa(), r in log_range(0.1, 10.0)) {
        let semi = stability::classify_semi(k, r).unwrap().regime;
        prop_assume!(semi != Regime::Boundary);
        prop_assume!(((r * k).powi(2) - 1.0).abs() > 1e-6);
        prop_assert_eq!(stability::classify_full(k, r, 1e-7).unwrap().regime, semi);
    }

    #[test]
    fn critical_meshes_reconstruct_s_crit(k in kappa(), r in log_range(0.1, 10.0), ry in log_range(0.05, 5.0)) {
        if stability::classify_full(k, r, ry).unwrap().regime == Regime::Unstable {
            let s = spectral::s_crit(k, r, ry).unwrap();
            for (m, h) in stability::critical_meshes(k, r, Some(ry), 12).unwrap() {
                prop_assert!((h * ry * m as f64 - s).abs() <= 1e-12 * s.max(1.0));
            }
        }
    }

    #[test]
    fn interface_row_structure(
        sm in -3.0..-0.1f64,
        sp in 0.1..3.0f64,
        n_minus in 2usize..12,
        n_plus in 2usize..12,
        big_m in 2usize..12,
        m_raw in 0usize..12,
    ) {
        let l = 2.0;
        prop_assume!((sp / sm + 1.0).abs() > 1e-3);
        let phys = PhysicalConfig::new(sm, sp, l).unwrap();
        let mesh = MeshConfig::from_counts(l, n_minus, n_plus, big_m).unwrap();
        let m = 1 + m_raw % (big_m - 1);
        let a = fem::mode_matrix(&phys, &mesh, m, true).unwrap();
        let (_, minus, plus) = spectral::side_coefficients(&mesh, m, DiagonalVariant::FullBounded).unwrap();
        let i = n_minus - 1;
        let scale = sm.abs().max(sp) * (minus.a + plus.a);
        prop_assert!((a.get(i, i) - (sm * minus.a + sp * plus.a)).abs() < 1e-13 * scale);
        prop_assert!((a.get(i, i - 1) - sm * minus.b).abs() < 1e-13 * scale);
        prop_assert!((a.get(i, i + 1) - sp * plus.b).abs() < 1e-13 * scale);
    }

    #[test]
    fn tensor_apply_matches_dense(
        n_minus in 1usize..5,
        n_plus in 1usize..5,
        big_m in 2usize..6,
        seed in proptest::collection::vec(-1.0..1.0f64, 64),
    ) {
        let phys = PhysicalConfig::new(-1.0, 1.7, 1.5).unwrap();
        let mesh = MeshConfig::from_counts(1.5, n_minus, n_plus, big_m).unwrap();
        let (a, g) = fem::assemble_2d(&phys, &mesh).unwrap();
        let x: Vec<f64> = (0..a.dim()).map(|i| seed[i % seed.len()] + 0.01 * i as f64).collect();
        for op in [&a, &g] {
            let dense = op.to_dense();
            let y = op.apply(&x);
            let z = &dense * nalgebra::DVector::from_column_slice(&x);
            prop_assert!(relative_max_difference(&y, z.as_slice()) < 1e-12);
            prop_assert!((&dense - dense.transpose()).amax() < 1e-14 * dense.amax());
        }
        prop_assert!(g.to_dense().cholesky().is_some());
    }

    #[test]
    fn csv_round_trip(
        vals in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 7),
        counts in proptest::collection::vec(1usize..100_000, 4),
    ) {
        let rec = SweepRecord {
            m: counts[0],
            h_minus: vals[0],
            h_plus: vals[1],
            h_y: vals[2],
            n_minus: counts[1],
            n_plus: counts[2],
            big_m: counts[3],
            rel_l2: vals[3],
            rel_h1: vals[4],
            min_gen_sv: vals[5],
            min_abs_diag: vals[6],
        };
        let mut buf = Vec::new();
        write_csv(&[rec], &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), 1);
        let b = back[0];
        prop_assert_eq!((b.m, b.n_minus, b.n_plus, b.big_m), (rec.m, rec.n_minus, rec.n_plus, rec.big_m));
        for (x, y) in [
            (b.h_minus, rec.h_minus),
            (b.h_plus, rec.h_plus),
            (b.h_y, rec.h_y),
            (b.rel_l2, rec.rel_l2),
            (b.rel_h1, rec.rel_h1),
            (b.min_gen_sv, rec.min_gen_sv),
            (b.min_abs_diag, rec.min_abs_diag),
        ] {
            prop_assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn per_mode_matches_dense(
        sp in 0.3..3.0f64,
        n_minus in 1usize..8,
        n_plus in 1usize..8,
        big_m in 2usize..10,
    ) {
        let phys = PhysicalConfig::new(-1.0, sp, 2.0).unwrap();
        let mesh = MeshConfig::from_counts(2.0, n_minus, n_plus, big_m).unwrap();
        prop_assume!(stability::min_abs_diagonal(&phys, &mesh).unwrap().1 > 1e-3);
        let case = ManufacturedCase::new(phys);
        let a = solve(&phys, &mesh, &case).unwrap();
        let b = solve_dense(&phys, &mesh, &case).unwrap();
        prop_assert!(relative_max_difference(&a.values, &b.values) < 1e-10);
    }

    #[test]
    fn galerkin_orthogonality(
        n_minus in 1usize..8,
        n_plus in 1usize..8,
        big_m in 2usize..10,
        w in proptest::collection::vec(-1.0..1.0f64, 20 * 64),
    ) {
        let phys = PhysicalConfig::new(-1.0, 1.2, 2.0).unwrap();
        let mesh = MeshConfig::from_counts(2.0, n_minus, n_plus, big_m).unwrap();
        prop_assume!(stability::min_abs_diagonal(&phys, &mesh).unwrap().1 > 1e-3);
        let case = ManufacturedCase::new(phys);
        let sol = solve(&phys, &mesh, &case).unwrap();
        let load = fem::load_vector(&phys, &mesh, |x, y| case.source(x, y)).unwrap().values;
        let (a, _) = fem::assemble_2d(&phys, &mesh).unwrap();
        let au = a.apply(&sol.values);
        let n = au.len();
        for k in 0..20 {
            let wk: Vec<f64> = (0..n).map(|i| w[(k * 64 + i) % w.len()]).collect();
            let lhs: f64 = au.iter().zip(&wk).map(|(p, q)| p * q).sum();
            let rhs: f64 = load.iter().zip(&wk).map(|(p, q)| p * q).sum();
            let scale: f64 = load.iter().zip(&wk).map(|(p, q)| (p * q).abs()).sum();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
        }
    }
}

#[test]
fn duality_flips_the_reference_pair() {
    let s11 = 11f64.sqrt();
    let (k, r, ry) = (-1.2, 0.5, 2.0 / s11);
    let a = stability::classify_full(k, r, ry).unwrap().regime;
    let b = stability::classify_full(k, 1.0 / r, ry / r).unwrap().regime;
    assert_eq!((a, b), (Regime::Unstable, Regime::Stable));
}

#[test]
fn inverse_bound_shrinks_away_from_minus_one() {
    // Above kappa = -1/3 the `|kappa|` term binds and the bound grows again.
    let samples: Vec<f64> = (0..=400).map(|i| -1.0 + 1e-3 + i as f64 * (2.0 / 3.0 - 1e-3) / 400.0).collect();
    let mut last: [Option<f64>; 3] = [None; 3];
    for &k in &samples {
        let verdicts = [
            Some(stability::classify_semi(k, 1.0).unwrap()),
            Some(stability::classify_full(k, 1.0, 1.0).unwrap()),
            Some(stability::classify_bounded(k, 1.0, Some(1.0), 0.05).unwrap()),
        ];
        for (slot, v) in last.iter_mut().zip(verdicts) {
            match v {
                Some(v) if v.regime == Regime::Stable => {
                    let bound = v.inverse_norm_bound.unwrap();
                    assert!(bound > 0.0);
                    if let Some(prev) = *slot {
                        assert!(bound <= prev * (1.0 + 1e-12), "kappa {k}: {bound} > {prev}");
                    }
                    *slot = Some(bound);
                }
                _ => *slot = None,
            }
        }
    }
}

#[test]
fn flipped_diagonal_respects_bounded_factor() {
    let phys = reference_physics();
    let factor = stability::bounded_min_factor(-1.2, 2.0, Some(4.0 / 11f64.sqrt()), 0.05);
    for m in [14, 20, 33, 50] {
        let mesh = Scenario::Flipped.mesh(&phys, m, CountRounding::Strict).unwrap();
        assert!(mesh.h_minus() <= 0.1);
        let (_, d) = stability::min_abs_diagonal(&phys, &mesh).unwrap();
        assert!(d >= factor, "m = {m}: {d} < {factor}");
    }
}

#[test]
fn manufactured_flux_vanishes_on_interface() {
    let case = ManufacturedCase::new(reference_physics());
    for i in 0..=50 {
        let y = std::f64::consts::PI * i as f64 / 50.0;
        assert_eq!(case.interface_fluxes(y), (0.0, 0.0));
    }
}

#[test]
fn stiffness_and_mass_are_symmetric() {
    let grid = Grid1D::uniform(-1.0, 2.0, 9);
    let w = Weight::Piecewise { left: -1.0, right: 2.5 };
    assert!(fem::stiffness_1d(&grid, &w).is_symmetric(0.0));
    assert!(fem::mass_1d(&grid, &w).is_symmetric(0.0));
}
