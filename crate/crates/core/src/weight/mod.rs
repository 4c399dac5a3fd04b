//! Analysis of the weights of a vectorial measure: `B_p` membership, the
//! sets `Omega_j`, the regular sets, Muckenhoupt-type constants,
//! admissibility and completions.

pub mod admissible;
pub mod local;
pub mod muckenhoupt;
pub mod omega;
pub mod sets;

pub use local::{Decision, LocalStructure};
pub use sets::{ArcComponent, CellSet, OpenSetOnCurve};
