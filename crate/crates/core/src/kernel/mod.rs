//! The kernel `K(gamma, mu)`: functions on `Omega^(0)` with zero Sobolev
//! seminorm.
//!
//! On each component `Lambda` of `Omega_1 u ... u Omega_k` a kernel element
//! is a polynomial of degree `< j_lambda`; atoms impose `f^(j)(z) = 0` and
//! regular separating points impose continuity of `f^(j)`. The kernel is
//! the null space of that homogeneous system.

mod c0;
mod exact;
mod poly;
mod solve;
mod system;

pub use c0::{check_c0, C0Justification, C0Options, C0Report};
pub use exact::{compare_with_float, null_space_exact, sample_points, solve_exact, ExactKernel};
pub use poly::{mutual_projection_residual, projection_residual, PiecewisePolynomial, PolyPiece};
pub use solve::{seminorm, solve_kernel, KernelReport, RANK_TOL};
pub use system::{
    assemble_kernel_system, decompose_components, ComponentDecomposition, ConstraintAtom, Equation, EquationKind,
    KernelComponent, KernelSystem, NormAtom, PastingPoint, UnknownBlock,
};

use crate::error::Result;
use crate::measure::{Region, VectorialMeasure};

/// Assembles and solves the kernel system on `Omega^(0)`, or on its part
/// inside `region`.
pub fn compute_kernel(mu: &VectorialMeasure, region: Option<&Region>) -> Result<(KernelSystem, KernelReport)> {
    let sys = assemble_kernel_system(mu, region)?;
    let report = solve_kernel(mu, &sys);
    Ok((sys, report))
}

#[cfg(test)]
mod tests;
