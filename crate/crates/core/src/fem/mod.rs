//! P1 Galerkin matrices on tensor-product meshes of `(-L, L) x (0, pi)`.
//!
//! Dirichlet nodes are eliminated, so every matrix lives on interior nodes
//! only. 2D unknowns are ordered lexicographically, y-index fastest.

mod assembly;
mod banded;
mod grid;
mod quadrature;
mod sine;

pub use assembly::{
    assemble_2d, load_vector, load_vector_with_order, mass_1d, mode_gram, mode_matrix, stiffness_1d, LoadVector,
    TensorOperator, Weight, DEFAULT_QUADRATURE,
};
pub use banded::{solve_banded, BandedLu, BandedOperator};
pub use grid::Grid1D;
pub use quadrature::GaussLegendre;
pub use sine::SineBasis;
