//! P1 tensor-product finite elements for `-div(sigma grad u) = f` with a
//! coefficient that is negative on the left half of a strip and positive on
//! the right half.
//!
//! The crate has four layers:
//!
//! * [`spectral`]: closed-form recurrence roots, diagonal entries of the
//!   interface block and the auxiliary functions that control them.
//! * [`stability`]: classification of `(kappa, r, r_y)` into stable and
//!   unstable regimes, inverse-norm bounds and critical mesh sizes.
//! * [`fem`]: 1D/2D Galerkin assembly, banded LU and the discrete sine basis.
//! * [`harness`]: the manufactured-solution experiments, error norms,
//!   spectral verification and CSV output.

pub mod config;
pub mod error;
pub mod fem;
pub mod harness;
mod par;
pub mod spectral;
pub mod stability;

pub use config::{CountRounding, MeshConfig, PhysicalConfig};
pub use error::{Error, Result};
