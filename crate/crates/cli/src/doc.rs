//! Measure documents, the JSON input format.
//!
//! ```json
//! {"curve": {"kind": "segment", "params": {"a": [-1, 0], "b": [1, 0]}},
//!  "p": 2, "k": 1,
//!  "components": [{"j": 0, "atoms": [{"t": "1/2", "mass": 1}]},
//!                 {"j": 1, "pieces": [{"arc": [0, 2], "form": {"type": "power", "c": 1,
//!                                      "alpha_left": 0, "alpha_right": 0}}]}]}
//! ```
//!
//! Positions are arc-length parameters. A number written as a string
//! (`"0.125"`, `"1/3"`) is read exactly and its rational value is kept for
//! the exact kernel solver. A document with a `family` key is a generator.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sobolev_curves::families::{dyadic_counterexample, Tail};
use sobolev_curves::{Atom, Curve, CurveKind, MeasureComponent, VectorialMeasure, WeightForm, WeightPiece};

/// A number given either as a double or as an exact decimal or fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Float(f64),
    Text(String),
}

impl Num {
    /// The double used by the model and, for strings, the exact value.
    pub fn value(&self) -> Result<(f64, Option<BigRational>), String> {
        match self {
            Num::Float(x) => Ok((*x, None)),
            Num::Text(s) => {
                let r = parse_rational(s)?;
                let x = r.to_f64().ok_or_else(|| format!("`{s}` is out of range"))?;
                Ok((x, Some(r)))
            }
        }
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Num {
        Num::Float(x)
    }
}

/// Parses `"-12.5e-3"` or `"3/8"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let bad = || format!("`{s}` is not a decimal number or a fraction a/b");
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(format!("`{s}` has a zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let (neg, int) = match int.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, int.strip_prefix('+').unwrap_or(int)),
    };
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = BigInt::from_str(&format!("0{int}{frac}")).map_err(|_| bad())?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if shift >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-shift) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDoc {
    pub kind: String,
    #[serde(default)]
    pub params: serde_json::Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    pub arc: [Num; 2],
    pub form: WeightForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc {
    pub t: Num,
    pub mass: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDoc {
    pub j: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pieces: Vec<PieceDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<AtomDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDoc {
    pub curve: CurveDoc,
    pub p: Num,
    pub k: usize,
    pub components: Vec<ComponentDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    DyadicCounterexample,
}

fn default_p() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub family: Family,
    pub depth: usize,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub tail: Tail,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Measure(MeasureDoc),
    Generator(GeneratorDoc),
}

/// A rejected document, with the place where it went wrong.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError {
    pub location: String,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for InputError {}

fn at(location: impl Into<String>, message: impl fmt::Display) -> InputError {
    InputError { location: location.into(), message: message.to_string() }
}

fn typed<T: serde::de::DeserializeOwned>(value: Value, prefix: &str) -> Result<T, InputError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let location = match (prefix.is_empty(), path == ".") {
            (true, _) => path,
            (false, true) => prefix.to_string(),
            (false, false) => format!("{prefix}.{path}"),
        };
        at(location, e.into_inner())
    })
}

/// Parses a document; syntax errors carry line and column, schema errors
/// the field path.
pub fn parse_document(text: &str) -> Result<Document, InputError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| at(format!("line {}, column {}", e.line(), e.column()), e))?;
    if value.get("family").is_some() {
        typed(value, "").map(Document::Generator)
    } else {
        typed(value, "").map(Document::Measure)
    }
}

/// A document turned into a measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub measure: VectorialMeasure,
    pub generator: Option<GeneratorDoc>,
}

impl Document {
    /// Builds the measure; `depth` overrides the truncation depth of a
    /// generator.
    pub fn build(&self, depth: Option<usize>) -> Result<Loaded, InputError> {
        match self {
            Document::Measure(m) => Ok(Loaded { measure: m.build()?, generator: None }),
            Document::Generator(g) => {
                let mut g = g.clone();
                if let Some(d) = depth {
                    g.depth = d;
                }
                let measure = match g.family {
                    Family::DyadicCounterexample => dyadic_counterexample(g.depth, g.p, g.tail),
                }
                .map_err(|e| at("depth", e))?;
                Ok(Loaded { measure, generator: Some(g) })
            }
        }
    }
}

fn num(n: &Num, path: String, exact: &mut Vec<(f64, BigRational)>) -> Result<f64, InputError> {
    let (x, r) = n.value().map_err(|m| at(path, m))?;
    if let Some(r) = r {
        exact.push((x, r));
    }
    Ok(x)
}

impl MeasureDoc {
    pub fn build(&self) -> Result<VectorialMeasure, InputError> {
        let mut params = self.curve.params.clone();
        params.insert("kind".into(), Value::String(self.curve.kind.clone()));
        let kind: CurveKind = typed(Value::Object(params), "curve.params")?;
        let curve = Curve::new(kind).map_err(|e| at("curve", e))?;
        let mut exact = Vec::new();
        let p = num(&self.p, "p".into(), &mut exact)?;
        let mut comps = vec![None; self.k + 1];
        for (i, c) in self.components.iter().enumerate() {
            let base = format!("components[{i}]");
            if c.j > self.k {
                return Err(at(format!("{base}.j"), format!("j = {} exceeds k = {}", c.j, self.k)));
            }
            if comps[c.j].is_some() {
                return Err(at(format!("{base}.j"), format!("component j = {} given twice", c.j)));
            }
            let mut pieces = Vec::with_capacity(c.pieces.len());
            for (n, piece) in c.pieces.iter().enumerate() {
                let t0 = num(&piece.arc[0], format!("{base}.pieces[{n}].arc[0]"), &mut exact)?;
                let t1 = num(&piece.arc[1], format!("{base}.pieces[{n}].arc[1]"), &mut exact)?;
                pieces.push(WeightPiece::new(t0, t1, piece.form.clone()));
            }
            let mut atoms = Vec::with_capacity(c.atoms.len());
            for (n, a) in c.atoms.iter().enumerate() {
                let t = num(&a.t, format!("{base}.atoms[{n}].t"), &mut exact)?;
                let mass = num(&a.mass, format!("{base}.atoms[{n}].mass"), &mut exact)?;
                atoms.push(Atom { t, mass });
            }
            comps[c.j] = Some(MeasureComponent::new(pieces, atoms));
        }
        let comps = comps.into_iter().map(Option::unwrap_or_default).collect();
        let mu = VectorialMeasure::new(curve, p, comps).map_err(|e| {
            let location = match &e {
                sobolev_curves::Error::InvalidMeasure { path, .. }
                | sobolev_curves::Error::InfiniteMass { path, .. } => path.replace("components[", "components[j="),
                _ => "measure".into(),
            };
            at(location, e)
        })?;
        // Only values that survive normalisation keep their exact form.
        let mut used = std::collections::BTreeSet::from([mu.p().to_bits()]);
        for c in mu.components() {
            used.extend(c.pieces.iter().flat_map(|p| [p.arc.t0.to_bits(), p.arc.t1.to_bits()]));
            used.extend(c.atoms.iter().flat_map(|a| [a.t.to_bits(), a.mass.to_bits()]));
        }
        exact.retain(|(x, _)| used.contains(&x.to_bits()));
        Ok(mu.with_exact_points(exact))
    }

    /// The document of a measure. Parameters with a recorded exact value
    /// are written as fractions.
    pub fn from_measure(mu: &VectorialMeasure) -> MeasureDoc {
        let exact: std::collections::BTreeMap<u64, String> =
            mu.exact_points().map(|(x, r)| (x.to_bits(), r.to_string())).collect();
        let n = |x: f64| match exact.get(&x.to_bits()) {
            Some(s) => Num::Text(s.clone()),
            None => Num::Float(x),
        };
        let mut params = match serde_json::to_value(mu.curve().kind()) {
            Ok(Value::Object(m)) => m,
            _ => unreachable!("curve kinds serialize to objects"),
        };
        let kind = match params.remove("kind") {
            Some(Value::String(s)) => s,
            _ => unreachable!("curve kinds are tagged"),
        };
        let components = mu
            .components()
            .iter()
            .enumerate()
            .map(|(j, c)| ComponentDoc {
                j,
                pieces: c
                    .pieces
                    .iter()
                    .map(|p| PieceDoc { arc: [n(p.arc.t0), n(p.arc.t1)], form: p.form.clone() })
                    .collect(),
                atoms: c.atoms.iter().map(|a| AtomDoc { t: n(a.t), mass: n(a.mass) }).collect(),
            })
            .collect();
        MeasureDoc { curve: CurveDoc { kind, params }, p: n(mu.p()), k: mu.k(), components }
    }
}

/// Reads and builds a document from a file.
pub fn load(path: &std::path::Path, depth: Option<usize>) -> Result<Loaded, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| at(path.display().to_string(), e))?;
    parse_document(&text)?.build(depth)
}
