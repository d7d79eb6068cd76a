use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::errors::{errors, H1Convention};
use super::manufactured::ManufacturedCase;
use super::solve::{relative_max_difference, solve, solve_dense, DENSE_LIMIT};
use super::spectrum::{min_generalized_singular, SingularMethod};
use crate::config::{CountRounding, MeshConfig, PhysicalConfig};
use crate::error::{Error, Result};
use crate::par;
use crate::stability;

/// `sqrt(11) pi / 4`: with `kappa = -1.2`, `r = 1/2` and `r_y = 2/sqrt(11)`
/// the critical angle is `pi/2`, so `h_minus = UNIT / m` is critical.
pub const UNIT: f64 = 3.3166247903554 * std::f64::consts::PI / 4.0;

/// Mesh indices of the published error curves.
pub const REFERENCE_M_LIST: [usize; 25] = [
    1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 15, 18, 22, 26, 31, 38, 46, 55, 66, 79, 95, 114, 137, 164, 197,
];

/// `sigma = (-1, 1.2)` on `(-10 UNIT, 10 UNIT) x (0, pi)`.
pub fn reference_physics() -> PhysicalConfig {
    PhysicalConfig::new(-1.0, 1.2, 10.0 * UNIT).expect("reference physics is valid")
}

/// Mesh family of a sweep, indexed by `m >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scenario {
    /// `h_minus = UNIT / m`, `r = 1/2`, `r_y = 2/sqrt(11)`.
    Critical,
    /// `h_minus = UNIT / (m + 1/2)` with the critical ratios.
    NearCritical,
    /// `h_plus = UNIT / m`, `r = 2`, `r_y = 4/sqrt(11)`.
    Flipped,
    /// `h_minus = base_h_minus / m` with the given ratios.
    Custom { base_h_minus: f64, r: f64, ry: f64 },
}

impl Scenario {
    /// `(h_minus, r, r_y)` for index `m`.
    pub fn parameters(&self, m: usize) -> Result<(f64, f64, f64)> {
        if m == 0 {
            return Err(Error::config("sweep index m must be at least 1"));
        }
        let m = m as f64;
        let s11 = 11f64.sqrt();
        Ok(match *self {
            Scenario::Critical => (UNIT / m, 0.5, 2.0 / s11),
            Scenario::NearCritical => (UNIT / (m + 0.5), 0.5, 2.0 / s11),
            Scenario::Flipped => (UNIT / m / 2.0, 2.0, 4.0 / s11),
            Scenario::Custom { base_h_minus, r, ry } => (base_h_minus / m, r, ry),
        })
    }

    pub fn mesh(&self, phys: &PhysicalConfig, m: usize, rounding: CountRounding) -> Result<MeshConfig> {
        let (h, r, ry) = self.parameters(m)?;
        MeshConfig::from_ratios(phys.half_width(), h, r, ry, rounding)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub rounding: CountRounding,
    pub h1: H1Convention,
    /// Cross-check the per-mode solution with a dense LU where the mesh is
    /// small enough.
    pub dense_check: bool,
    /// Compute the spectral indicators (`min_gen_sv`, `min_abs_diag`).
    pub spectral: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            rounding: CountRounding::Strict,
            h1: H1Convention::Seminorm,
            dense_check: false,
            spectral: true,
        }
    }
}

/// One row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub m: usize,
    pub h_minus: f64,
    pub h_plus: f64,
    pub h_y: f64,
    #[serde(rename = "N_minus")]
    pub n_minus: usize,
    #[serde(rename = "N_plus")]
    pub n_plus: usize,
    #[serde(rename = "M")]
    pub big_m: usize,
    pub rel_l2: f64,
    pub rel_h1: f64,
    /// NaN when spectral indicators were not requested.
    pub min_gen_sv: f64,
    pub min_abs_diag: f64,
}

pub const CSV_HEADER: [&str; 11] = [
    "m", "h_minus", "h_plus", "h_y", "N_minus", "N_plus", "M", "rel_l2", "rel_h1", "min_gen_sv", "min_abs_diag",
];

/// Solves one mesh of a sweep.
pub fn run_one(phys: &PhysicalConfig, m: usize, mesh: &MeshConfig, opts: &SweepOptions) -> Result<SweepRecord> {
    let case = ManufacturedCase::new(*phys);
    let sol = solve(phys, mesh, &case)?;
    if opts.dense_check && mesh.unknowns() <= DENSE_LIMIT {
        let dense = solve_dense(phys, mesh, &case)?;
        let diff = relative_max_difference(&sol.values, &dense.values);
        if diff > 1e-9 {
            return Err(Error::Consistency(format!(
                "per-mode and dense solutions differ by {diff:e} (relative) on m = {m}"
            )));
        }
    }
    let (rel_l2, rel_h1) = errors(&case, &sol, opts.h1);
    let (min_gen_sv, min_abs_diag) = if opts.spectral {
        let method = if opts.dense_check {
            SingularMethod::Auto
        } else {
            SingularMethod::Analytic
        };
        (
            min_generalized_singular(phys, mesh, method)?,
            stability::min_abs_diagonal(phys, mesh)?.1,
        )
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(SweepRecord {
        m,
        h_minus: mesh.h_minus(),
        h_plus: mesh.h_plus(),
        h_y: mesh.h_y(),
        n_minus: mesh.n_minus(),
        n_plus: mesh.n_plus(),
        big_m: mesh.big_m(),
        rel_l2,
        rel_h1,
        min_gen_sv,
        min_abs_diag,
    })
}

/// Runs `scenario` for every `m` in `m_list`; records come back in input
/// order.
pub fn run_sweep(
    scenario: Scenario,
    phys: &PhysicalConfig,
    m_list: &[usize],
    opts: &SweepOptions,
) -> Result<Vec<SweepRecord>> {
    let meshes = m_list
        .iter()
        .map(|&m| scenario.mesh(phys, m, opts.rounding))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, MeshConfig)> = m_list.iter().copied().zip(meshes).collect();
    par::map_slice(&jobs, |(m, mesh)| run_one(phys, *m, mesh, opts))
        .into_iter()
        .collect()
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes records as CSV with 17 significant digits.
pub fn write_csv<W: Write>(records: &[SweepRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in records {
        out.write_record([
            r.m.to_string(),
            fmt(r.h_minus),
            fmt(r.h_plus),
            fmt(r.h_y),
            r.n_minus.to_string(),
            r.n_plus.to_string(),
            r.big_m.to_string(),
            fmt(r.rel_l2),
            fmt(r.rel_h1),
            fmt(r.min_gen_sv),
            fmt(r.min_abs_diag),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Io(format!("unexpected CSV header {header:?}")));
    }
    rdr.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn write_csv_file(records: &[SweepRecord], path: &Path) -> Result<()> {
    write_csv(records, std::fs::File::create(path)?)
}

pub fn read_csv_file(path: &Path) -> Result<Vec<SweepRecord>> {
    read_csv(std::fs::File::open(path)?)
}

/// Estimated orders of convergence between consecutive records, using
/// `h_minus` as the mesh size. Returns `(l2, h1)` pairs.
pub fn eoc(records: &[SweepRecord]) -> Vec<(f64, f64)> {
    records
        .windows(2)
        .map(|w| {
            let dh = (w[0].h_minus / w[1].h_minus).ln();
            ((w[0].rel_l2 / w[1].rel_l2).ln() / dh, (w[0].rel_h1 / w[1].rel_h1).ln() / dh)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_value() {
        assert!((UNIT - 11f64.sqrt() * std::f64::consts::PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn scenario_counts() {
        let phys = reference_physics();
        for m in [1, 3, 7, 40] {
            let c = Scenario::Critical.mesh(&phys, m, CountRounding::Strict).unwrap();
            assert_eq!((c.n_minus(), c.n_plus(), c.big_m()), (10 * m, 20 * m, 2 * m));
            let n = Scenario::NearCritical.mesh(&phys, m, CountRounding::Strict).unwrap();
            assert_eq!((n.n_minus(), n.n_plus(), n.big_m()), (10 * m + 5, 20 * m + 10, 2 * m + 1));
            let f = Scenario::Flipped.mesh(&phys, m, CountRounding::Strict).unwrap();
            assert_eq!((f.n_minus(), f.n_plus(), f.big_m()), (20 * m, 10 * m, 2 * m));
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let rec = SweepRecord {
            m: 3,
            h_minus: 0.1 + 0.2,
            h_plus: 1.0 / 3.0,
            h_y: std::f64::consts::PI / 7.0,
            n_minus: 30,
            n_plus: 60,
            big_m: 6,
            rel_l2: 1.234_567_890_123_456_7e-7,
            rel_h1: 5e300,
            min_gen_sv: 2.2250738585072014e-308,
            min_abs_diag: f64::NAN,
        };
        let mut buf = Vec::new();
        write_csv(&[rec, rec], &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        let b = back[0];
        assert_eq!(b.h_minus.to_bits(), rec.h_minus.to_bits());
        assert_eq!(b.h_plus.to_bits(), rec.h_plus.to_bits());
        assert_eq!(b.h_y.to_bits(), rec.h_y.to_bits());
        assert_eq!(b.rel_l2.to_bits(), rec.rel_l2.to_bits());
        assert_eq!(b.rel_h1.to_bits(), rec.rel_h1.to_bits());
        assert_eq!(b.min_gen_sv.to_bits(), rec.min_gen_sv.to_bits());
        assert!(b.min_abs_diag.is_nan());
    }
}
