//! The boundedness verdict.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::type_a::type_a_on;
use super::types_bc::{type_b_on, type_c_on};
use super::{TypeAReport, TypeBReport, TypeCReport};
use crate::error::Result;
use crate::kernel::{compute_kernel, seminorm, ComponentDecomposition, KernelReport, PiecewisePolynomial};
use crate::measure::VectorialMeasure;
use crate::weight::admissible::admissibility_on;
use crate::weight::local::{Decision, LocalStructure};
use crate::weight::ArcComponent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    Unbounded,
    Unknown,
}

/// The result that justifies a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// Type A: bounded iff the kernel is trivial.
    Mult1,
    /// Type B.
    Mult2,
    /// Absolutely continuous `mu_j`, `j >= 1`, with piecewise monotone
    /// densities (up to constants).
    Mult3,
    /// Type C; with `int w_1 > 0` also equivalent to `mu_0(gamma) > 0`.
    Mult4,
    /// For a p-admissible measure the operator is well defined only when
    /// the kernel is trivial.
    WellDefinedness,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub admissible: Decision,
    pub type_a: TypeAReport,
    pub type_b: TypeBReport,
    pub type_c: TypeCReport,
}

/// Runs the three classifications on one shared local analysis.
pub fn classify(mu: &VectorialMeasure) -> Classification {
    let ls = LocalStructure::new(mu, &[]);
    let adm = admissibility_on(&ls, mu);
    Classification {
        admissible: adm.admissible,
        type_a: type_a_on(mu, &ls, &adm),
        type_b: type_b_on(mu, &adm),
        type_c: type_c_on(mu, &ls, &adm),
    }
}

/// A kernel element `h` with `||h|| = 0` and `||z h|| > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub h: PiecewisePolynomial,
    pub norm_h: f64,
    pub norm_zh: f64,
    /// Reference size: largest coefficient of `h` times
    /// `max(1, max |z|) * (total mass)^(1/p)`.
    pub scale: f64,
    /// `norm_h < 1e-8 scale` and `norm_zh > 1e-6 scale`.
    pub valid: bool,
}

/// For `k = 1`: the kernel is trivial iff every component of `Omega^(0)`
/// carries `mu_0` mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropK1Check {
    pub components: usize,
    pub zero_mass_components: usize,
    /// Agreement with the computed kernel.
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub verdict: Verdict,
    pub theorem: Theorem,
    /// Every theorem whose hypotheses were verified.
    pub applicable: Vec<Theorem>,
    pub kernel_dim: usize,
    /// The kernel dimension is certain (exact sets, clear singular gap).
    pub kernel_certain: bool,
    pub evidence: Classification,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prop_k1: Option<PropK1Check>,
    /// `mu_0(gamma) > 0`, recorded for type C measures with `int w_1 > 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu0_positive: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    pub notes: Vec<String>,
}

fn arc_mass(mu: &VectorialMeasure, j: usize, arc: &ArcComponent) -> f64 {
    let comp = mu.component(j);
    let l = mu.curve().length();
    let ac = if arc.full {
        comp.ac_mass()
    } else if arc.wraps() {
        comp.ac_mass_between(arc.t0, l) + comp.ac_mass_between(0.0, arc.t1)
    } else {
        comp.ac_mass_between(arc.t0, arc.t1)
    };
    ac + comp.atoms.iter().filter(|a| arc.full || arc.contains(a.t)).map(|a| a.mass).sum::<f64>()
}

/// Picks the kernel element whose product with `z` is farthest from the
/// kernel.
fn certificate(mu: &VectorialMeasure, dec: &ComponentDecomposition, kernel: &KernelReport) -> Option<Certificate> {
    let mass = libm::pow(mu.masses().iter().sum::<f64>(), 1.0 / mu.p());
    let zmax = mu.curve().max_modulus().max(1.0);
    kernel
        .basis
        .iter()
        .map(|h| {
            let norm_h = seminorm(mu, dec, h);
            let norm_zh = seminorm(mu, dec, &h.times_z());
            let scale = h.max_coeff() * zmax * mass;
            let valid = norm_h < 1e-8 * scale && norm_zh > 1e-6 * scale;
            Certificate { h: h.clone(), norm_h, norm_zh, scale, valid }
        })
        .max_by(|a, b| (a.norm_zh / a.scale).total_cmp(&(b.norm_zh / b.scale)))
}

/// Decides whether `f -> z f` is bounded on the Sobolev space of `mu`.
pub fn boundedness_verdict(mu: &VectorialMeasure) -> Result<VerdictReport> {
    let evidence = classify(mu);
    let (sys, kernel) = compute_kernel(mu, None)?;
    let dec = &sys.decomposition;
    let kernel_certain = !kernel.inexact && !kernel.low_confidence;
    let mut notes = Vec::new();
    if !kernel_certain {
        notes.push(String::from("the kernel dimension is not certain"));
    }

    let mut applicable = Vec::new();
    if evidence.type_a.is_type_a == Decision::Yes {
        applicable.push(Theorem::Mult1);
    }
    if evidence.type_b.is_type_b == Decision::Yes {
        applicable.push(Theorem::Mult2);
    }
    if evidence.type_b.absolutely_continuous {
        applicable.push(Theorem::Mult3);
    }
    if evidence.type_c.is_type_c == Decision::Yes {
        applicable.push(Theorem::Mult4);
    }

    let mut prop_k1 = None;
    if mu.k() == 1 && evidence.admissible == Decision::Yes {
        let zero = dec.omega0.iter().filter(|a| arc_mass(mu, 0, a) == 0.0).count();
        let agrees = (zero == 0) == (kernel.dim == 0);
        if !agrees {
            notes.push(format!(
                "{zero} components of Omega^(0) carry no mu_0 mass but the kernel has dimension {}",
                kernel.dim
            ));
        }
        prop_k1 = Some(PropK1Check { components: dec.omega0.len(), zero_mass_components: zero, agrees });
    }
    let mut mu0_positive = None;
    if applicable.contains(&Theorem::Mult4) && mu.k() >= 1 && mu.component(1).ac_mass() > 0.0 {
        let pos = mu.component(0).total_mass() > 0.0;
        if pos != (kernel.dim == 0) {
            notes.push(String::from("mu_0(gamma) > 0 disagrees with the computed kernel"));
        }
        mu0_positive = Some(pos);
    }
    let consistent = prop_k1.as_ref().is_none_or(|c| c.agrees) && mu0_positive.is_none_or(|p| p == (kernel.dim == 0));

    let (verdict, theorem) = if !kernel_certain || !consistent {
        (Verdict::Unknown, Theorem::None)
    } else if let Some(&t) = applicable.first() {
        (if kernel.dim == 0 { Verdict::Bounded } else { Verdict::Unbounded }, t)
    } else if kernel.dim > 0 && evidence.admissible == Decision::Yes {
        (Verdict::Unbounded, Theorem::WellDefinedness)
    } else {
        notes.push(String::from("no structural type was verified and the kernel is trivial"));
        (Verdict::Unknown, Theorem::None)
    };
    let certificate = (kernel.dim > 0 && kernel_certain).then(|| certificate(mu, dec, &kernel)).flatten();
    if let Some(c) = &certificate {
        if !c.valid {
            notes.push(String::from("the kernel certificate does not separate ||h|| from ||z h||"));
        }
    }
    Ok(VerdictReport {
        verdict,
        theorem,
        applicable,
        kernel_dim: kernel.dim,
        kernel_certain,
        evidence,
        prop_k1,
        mu0_positive,
        certificate,
        notes,
    })
}
