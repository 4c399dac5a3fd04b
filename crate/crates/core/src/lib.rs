#![no_std]
//! Weighted Sobolev spaces on curves in the complex plane.
//!
//! The crate models vectorial measures `(mu_0, ..., mu_k)` on rectifiable
//! curves and decides, where the theory allows, whether multiplication by
//! `z` is bounded on the associated Sobolev space. It computes the sets
//! where weights are locally in `B_p`, the regular sets, Muckenhoupt-type
//! constants, the kernel of the Sobolev seminorm, the structural types of a
//! measure, and Sobolev orthogonal polynomials with their zeros.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classify;
pub mod curve;
pub mod error;
pub mod families;
pub mod kernel;
pub mod measure;
pub mod numerics;
pub mod quad;
pub mod weight;

pub use curve::{Arc, Curve, CurveKind};
pub use error::{Error, Result};
pub use measure::{Atom, MeasureComponent, Profile, VectorialMeasure, WeightForm, WeightPiece};
