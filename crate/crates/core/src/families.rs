//! Parametric measure families that are defined by infinite sums and can
//! only be handled through truncations.

use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::measure::{Atom, MeasureComponent, VectorialMeasure, WeightPiece};

/// How a truncation treats the part of the family below the last block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// Plain truncation: the blocks below depth `d` are dropped.
    #[default]
    Open,
    /// Keeps the constraint the dropped blocks impose on the last one:
    /// every element of the kernel vanishes at `2^{-2d-2}`, recorded as an
    /// extra atom of `mu_0` there.
    Closed,
}

/// Truncation at depth `d` of the measure on `[0, 1]` (`k = 3`) with
///
/// * `mu_0 = sum_m 2^{-m} delta_{2^{-2m-1}}`,
/// * `mu_1 = sum_m 2^{-m} delta_{3 * 2^{-2m-2}}`,
/// * `mu_2 = 0`,
/// * `w_3 = sum_m (2^{-2m} - x)^{2p-1} (x - 2^{-2m-2})^{2p-1}` on `[2^{-2m-2}, 2^{-2m}]`,
///
/// keeping the blocks `m = 0..=d`. Its kernel is trivial while the kernel
/// on every compact `[2^{-2n-2}, 1]` is not.
pub fn dyadic_counterexample(depth: usize, p: f64, tail: Tail) -> Result<VectorialMeasure> {
    if depth > 24 {
        return Err(Error::InvalidArgument("depth above 24 underflows the block widths".into()));
    }
    let curve = Curve::segment(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))?;
    let pow2 = |e: i32| libm::ldexp(1.0, e);
    let mut a0: Vec<Atom> = Vec::new();
    let mut a1: Vec<Atom> = Vec::new();
    for m in 0..=depth as i32 {
        a0.push(Atom { t: pow2(-2 * m - 1), mass: pow2(-m) });
        a1.push(Atom { t: 3.0 * pow2(-2 * m - 2), mass: pow2(-m) });
    }
    let bottom = pow2(-2 * depth as i32 - 2);
    if tail == Tail::Closed {
        a0.push(Atom { t: bottom, mass: pow2(-(depth as i32) - 1) });
    }
    let e = 2.0 * p - 1.0;
    let mut pieces = alloc::vec![WeightPiece::zero(0.0, bottom)];
    for m in (0..=depth as i32).rev() {
        pieces.push(WeightPiece::power(pow2(-2 * m - 2), pow2(-2 * m), 1.0, e, e));
    }
    let comps = alloc::vec![
        MeasureComponent::atoms_only(a0),
        MeasureComponent::atoms_only(a1),
        MeasureComponent::default(),
        MeasureComponent::new(pieces, Vec::new()),
    ];
    VectorialMeasure::new(curve, p, comps)
}
