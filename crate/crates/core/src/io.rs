//! JSON curve and domain files.
//!
//! A curve is
//! `{"dimension": 2|3, "modes": M, "coeffs": {"x": {"a0": .., "a": [..], "b": [..]}, ...}}`
//! with one entry per coordinate.  A domain adds `{"outer": curve, "holes": [curve, ...]}`,
//! and a file may also hold `{"curves": [curve, ...]}` for a link or a pair.

use crate::curve::{ClosedCurve, Vec3};
use crate::domain::PlanarDomain;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CoordCoeffs {
    pub a0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Serialized form of a [`ClosedCurve`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CurveJson {
    pub dimension: usize,
    pub modes: usize,
    pub coeffs: BTreeMap<String, CoordCoeffs>,
}

/// Serialized form of a [`PlanarDomain`] with one component.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DomainJson {
    pub outer: CurveJson,
    #[serde(default)]
    pub holes: Vec<CurveJson>,
}

const AXES: [&str; 3] = ["x", "y", "z"];

impl CurveJson {
    pub fn from_curve(c: &ClosedCurve) -> Self {
        let coeffs = AXES[..c.dimension()]
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let cc = CoordCoeffs {
                    a0: c.a0()[i],
                    a: c.cos_coeffs().iter().map(|v| v[i]).collect(),
                    b: c.sin_coeffs().iter().map(|v| v[i]).collect(),
                };
                (name.to_string(), cc)
            })
            .collect();
        CurveJson { dimension: c.dimension(), modes: c.modes(), coeffs }
    }

    pub fn to_curve(&self) -> Result<ClosedCurve> {
        if self.dimension != 2 && self.dimension != 3 {
            return Err(Error::Schema(format!("dimension must be 2 or 3, got {}", self.dimension)));
        }
        if self.modes == 0 {
            return Err(Error::Schema("modes must be positive".into()));
        }
        let want = &AXES[..self.dimension];
        for key in self.coeffs.keys() {
            if !want.contains(&key.as_str()) {
                return Err(Error::Schema(format!("unexpected coordinate '{key}' for dimension {}", self.dimension)));
            }
        }
        let mut a0 = Vec3::zeros();
        let mut a = vec![Vec3::zeros(); self.modes];
        let mut b = vec![Vec3::zeros(); self.modes];
        for (i, name) in want.iter().enumerate() {
            let cc = self.coeffs.get(*name).ok_or_else(|| Error::Schema(format!("missing coordinate '{name}'")))?;
            if cc.a.len() != self.modes || cc.b.len() != self.modes {
                return Err(Error::Schema(format!(
                    "coordinate '{name}' has {} cosine and {} sine coefficients, expected {}",
                    cc.a.len(),
                    cc.b.len(),
                    self.modes
                )));
            }
            a0[i] = cc.a0;
            for k in 0..self.modes {
                a[k][i] = cc.a[k];
                b[k][i] = cc.b[k];
            }
        }
        ClosedCurve::new(self.dimension, a0, a, b)
    }
}

impl DomainJson {
    pub fn from_domain(d: &PlanarDomain) -> Result<Self> {
        let [c] = d.components() else {
            return Err(Error::Schema("only single-component domains have a file form".into()));
        };
        Ok(DomainJson { outer: CurveJson::from_curve(&c.outer), holes: c.holes.iter().map(CurveJson::from_curve).collect() })
    }

    pub fn to_domain(&self) -> Result<PlanarDomain> {
        let outer = self.outer.to_curve()?;
        let holes = self.holes.iter().map(CurveJson::to_curve).collect::<Result<Vec<_>>>()?;
        PlanarDomain::with_holes(outer, holes)
    }
}

/// Contents of one input file.
#[derive(Debug, Clone)]
pub enum Document {
    Curve(ClosedCurve),
    Curves(Vec<ClosedCurve>),
    Domain(PlanarDomain),
}

impl Document {
    /// Curves of the document; for a domain, its boundary curves.
    pub fn curves(&self) -> Vec<ClosedCurve> {
        match self {
            Document::Curve(c) => vec![c.clone()],
            Document::Curves(cs) => cs.clone(),
            Document::Domain(d) => d.boundaries().into_iter().cloned().collect(),
        }
    }

    /// The domain, if the document describes one or is a single planar curve.
    pub fn domain(&self) -> Result<PlanarDomain> {
        match self {
            Document::Domain(d) => Ok(d.clone()),
            Document::Curve(c) if c.is_planar() => PlanarDomain::simple(c.clone()),
            _ => Err(Error::Schema("a planar domain or a single planar curve is required".into())),
        }
    }

    pub fn to_json(&self) -> Result<Value> {
        Ok(match self {
            Document::Curve(c) => serde_json::to_value(CurveJson::from_curve(c))?,
            Document::Curves(cs) => {
                serde_json::json!({ "curves": cs.iter().map(CurveJson::from_curve).collect::<Vec<_>>() })
            }
            Document::Domain(d) => serde_json::to_value(DomainJson::from_domain(d)?)?,
        })
    }
}

fn schema(e: serde_json::Error) -> Error {
    Error::Schema(e.to_string())
}

/// Parse a document from JSON text.
pub fn parse_document(text: &str) -> Result<Document> {
    let v: Value = serde_json::from_str(text).map_err(schema)?;
    let obj = v.as_object().ok_or_else(|| Error::Schema("top level must be an object".into()))?;
    if obj.contains_key("outer") {
        let d: DomainJson = serde_json::from_value(v).map_err(schema)?;
        Ok(Document::Domain(d.to_domain()?))
    } else if obj.contains_key("curves") {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Many {
            curves: Vec<CurveJson>,
        }
        let m: Many = serde_json::from_value(v).map_err(schema)?;
        if m.curves.is_empty() {
            return Err(Error::Schema("'curves' must not be empty".into()));
        }
        Ok(Document::Curves(m.curves.iter().map(CurveJson::to_curve).collect::<Result<_>>()?))
    } else {
        let c: CurveJson = serde_json::from_value(v).map_err(schema)?;
        Ok(Document::Curve(c.to_curve()?))
    }
}

/// An input file with its content hash.
#[derive(Debug, Clone)]
pub struct Input {
    pub path: String,
    pub sha: String,
    pub document: Document,
}

pub fn read_input(path: &Path) -> Result<Input> {
    let bytes = std::fs::read(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    let document = parse_document(text)?;
    Ok(Input { path: path.display().to_string(), sha: content_hash(&bytes), document })
}

/// Git-style object hash: SHA-256 of `"blob <len>\0" ++ content`, in hex.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}
