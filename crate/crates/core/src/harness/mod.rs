//! Manufactured-solution experiments and spectral verification.

mod errors;
mod identities;
mod manufactured;
mod solve;
mod spectrum;
mod sweep;

pub use errors::{error_integrals, errors, ErrorIntegrals, H1Convention};
pub use identities::{
    check_dual_route, check_f_root, check_h_root, check_q_limit, check_root_product, identity_suite, IdentityCheck,
    IDENTITY_TOL, Q_LIMIT_TOL,
};
pub use manufactured::ManufacturedCase;
pub use solve::{
    interpolate, manufactured_load, relative_max_difference, solve, solve_dense, solve_dense_system, solve_per_mode,
    SolutionField, DENSE_LIMIT,
};
pub use spectrum::{
    compare_spectrum, generalized_eigenvalues, generalized_spectrum_small, kernel_residual, min_generalized_singular,
    predicted_spectrum, SingularMethod, SpectrumComparison,
};
pub use sweep::{
    eoc, read_csv, read_csv_file, reference_physics, run_one, run_sweep, write_csv, write_csv_file, Scenario,
    SweepOptions, SweepRecord, CSV_HEADER, REFERENCE_M_LIST, UNIT,
};
