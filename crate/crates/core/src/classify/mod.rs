//! Structural types of a measure and the boundedness verdict for the
//! multiplication operator `f -> z f`.
//!
//! Type A, B and C measures are the classes on which boundedness of the
//! operator is equivalent to a trivial kernel. Outside them only a
//! non-trivial kernel decides anything: then the operator is not even well
//! defined on the Sobolev space.

mod esd;
mod type_a;
mod types_bc;
mod verdict;

pub use esd::{esd, esd_closure, EsdReport, EsdStep};
pub use type_a::{classify_type_a, TypeAArc, TypeAReport};
pub use types_bc::{classify_type_b, classify_type_c, EndCase, TypeBPiece, TypeBReport, TypeCReport};
pub use verdict::{
    boundedness_verdict, classify, Certificate, Classification, PropK1Check, Theorem, Verdict, VerdictReport,
};

#[cfg(test)]
mod tests;
