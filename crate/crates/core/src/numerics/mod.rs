//! Numerics for `p = 2`: quadrature on curves, Sobolev inner products, Gram
//! matrices, orthonormal polynomials, the compressed multiplication
//! operator and polynomial zeros.

mod basis;
mod gram;
mod orthopoly;
mod rule;
mod zeros;


pub use basis::{basis_jets, measure_frame, FramePoly};
pub use gram::{
    gram_matrix, ortho_from_gram, sobolev_inner, sobolev_norm, GramMatrix, OrthoBasis, OrthoMethod, PIVOT_TOL,
};
pub use orthopoly::{
    history_sizes, multiplication_matrix, orthonormal_basis, verify_zero_bound, MultOpReport, SigmaPoint,
};
pub use rule::{integrate_weighted, Node, QuadratureResult, SobolevRule};
pub use zeros::{frame_zeros, poly_zeros, ZeroSet, LEADING_TOL};

/// Default budgets.
pub const DEFAULT_N: usize = 64;
pub const DEFAULT_N_MAX: usize = 20;
pub const DEFAULT_ZERO_TOL: f64 = 0.05;
