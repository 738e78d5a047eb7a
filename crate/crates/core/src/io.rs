//! LAR-JSON documents, Wavefront OBJ import and coordinate-format export.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chain::{SignedChain, SignedOperator};
use crate::error::{Error, Result};
use crate::lar::{ChainComplexResult, GeometricComplex};

/// Sparse operator as stored in LAR-JSON: shape and 0-based `[i, j, v]` triples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub shape: [usize; 2],
    pub coo: Vec<[i64; 3]>,
}

impl OperatorJson {
    pub fn from_operator(op: &SignedOperator) -> Self {
        let coo = op
            .to_coo()
            .into_iter()
            .map(|(i, j, v)| [i as i64, j as i64, i64::from(v)])
            .collect();
        Self {
            shape: [op.rows(), op.cols()],
            coo,
        }
    }

    pub fn to_operator(&self, domain_dim: u8) -> Result<SignedOperator> {
        let triples = self
            .coo
            .iter()
            .map(|&[i, j, v]| {
                if i < 0 || j < 0 {
                    return Err(Error::Parse(format!("negative index in [{i}, {j}, {v}]")));
                }
                Ok((i as usize, j as usize, v))
            })
            .collect::<Result<Vec<_>>>()?;
        SignedOperator::from_coo(
            domain_dim,
            domain_dim.saturating_sub(1),
            self.shape[0],
            self.shape[1],
            &triples,
        )
    }
}

/// On-disk complex: `dim`, `V`, `EV`, `FV`, optional `CV` and operators.
///
/// Operators are keyed `d1`, `d2`, `d3` for boundary maps and `outer` for
/// the boundary of the unbounded cell (a single column).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LarDocument {
    pub dim: usize,
    #[serde(rename = "V")]
    pub verts: Vec<Vec<f64>>,
    #[serde(rename = "EV", default)]
    pub ev: Vec<[usize; 2]>,
    #[serde(rename = "FV", default)]
    pub fv: Vec<Vec<usize>>,
    #[serde(rename = "CV", default, skip_serializing_if = "Vec::is_empty")]
    pub cv: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub boundary: BTreeMap<String, OperatorJson>,
}

impl LarDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn from_complex(g: &GeometricComplex) -> Self {
        let width = g.dim();
        Self {
            dim: g.dim(),
            verts: g.verts().iter().map(|p| p[..width].to_vec()).collect(),
            ev: g.ev().to_vec(),
            fv: g.fv().to_vec(),
            cv: g.cv().to_vec(),
            boundary: BTreeMap::new(),
        }
    }

    pub fn from_result(r: &ChainComplexResult) -> Self {
        let mut doc = Self::from_complex(&r.complex);
        for (k, op) in r.boundaries.iter().enumerate() {
            doc.boundary
                .insert(format!("d{}", k + 1), OperatorJson::from_operator(op));
        }
        let outer = SignedOperator::from_chains(
            r.dim() as u8,
            r.outer.len(),
            std::slice::from_ref(&r.outer),
        )
        .expect("outer chain has the top operator's row count");
        doc.boundary
            .insert("outer".into(), OperatorJson::from_operator(&outer));
        doc
    }

    /// Coordinate width check against `dim`, then full validation.
    pub fn to_complex(&self) -> Result<GeometricComplex> {
        if self.dim != 2 && self.dim != 3 {
            return Err(Error::Validation(format!(
                "dim must be 2 or 3, got {}",
                self.dim
            )));
        }
        let mut verts = Vec::with_capacity(self.verts.len());
        for (k, row) in self.verts.iter().enumerate() {
            if row.len() != self.dim {
                return Err(Error::Validation(format!(
                    "vertex {k} has {} coordinates, expected {}",
                    row.len(),
                    self.dim
                )));
            }
            verts.push([row[0], row[1], row.get(2).copied().unwrap_or(0.0)]);
        }
        GeometricComplex::new(
            self.dim,
            verts,
            self.ev.clone(),
            self.fv.clone(),
            self.cv.clone(),
        )
    }

    /// Stored operators in key order, or operators derived from the cells
    /// when none are stored.
    pub fn operators(&self) -> Result<Vec<(String, SignedOperator)>> {
        if !self.boundary.is_empty() {
            return self
                .boundary
                .iter()
                .map(|(name, op)| {
                    let domain = match name.as_str() {
                        "outer" => self.dim as u8,
                        other => other
                            .strip_prefix('d')
                            .and_then(|p| p.parse::<u8>().ok())
                            .ok_or_else(|| Error::Parse(format!("unknown operator '{other}'")))?,
                    };
                    Ok((name.clone(), op.to_operator(domain)?))
                })
                .collect();
        }
        let g = self.to_complex()?;
        let mut ops = vec![("d1".to_string(), g.signed_boundary_1()?)];
        if !g.fv().is_empty() {
            ops.push(("d2".to_string(), g.oriented_face_boundary()?));
        }
        Ok(ops)
    }
}

/// Reads `v` and `f` records of a Wavefront OBJ file. Face vertex lists are
/// kept verbatim (0-based); their edges, deduplicated, become `EV`.
pub fn parse_obj(text: &str) -> Result<LarDocument> {
    let mut verts: Vec<Vec<f64>> = Vec::new();
    let mut fv: Vec<Vec<usize>> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords = tokens
                    .take(3)
                    .map(|t| {
                        t.parse::<f64>().map_err(|_| {
                            Error::Parse(format!("line {}: bad coordinate '{t}'", n + 1))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                if coords.len() != 3 {
                    return Err(Error::Parse(format!(
                        "line {}: vertex needs three coordinates",
                        n + 1
                    )));
                }
                verts.push(coords);
            }
            Some("f") => {
                let face = tokens
                    .map(|t| {
                        let head = t.split('/').next().unwrap_or("");
                        let k: i64 = head.parse().map_err(|_| {
                            Error::Parse(format!("line {}: bad index '{t}'", n + 1))
                        })?;
                        let idx = if k > 0 { k - 1 } else { verts.len() as i64 + k };
                        if k == 0 || idx < 0 || idx >= verts.len() as i64 {
                            return Err(Error::Parse(format!(
                                "line {}: index {k} out of range",
                                n + 1
                            )));
                        }
                        Ok(idx as usize)
                    })
                    .collect::<Result<Vec<_>>>()?;
                if face.len() < 3 {
                    return Err(Error::Parse(format!(
                        "line {}: face needs at least three vertices",
                        n + 1
                    )));
                }
                fv.push(face);
            }
            _ => {}
        }
    }
    let mut seen = HashSet::new();
    let mut ev = Vec::new();
    for face in &fv {
        for k in 0..face.len() {
            let (a, b) = (face[k], face[(k + 1) % face.len()]);
            let e = [a.min(b), a.max(b)];
            if seen.insert(e) {
                ev.push(e);
            }
        }
    }
    Ok(LarDocument {
        dim: 3,
        verts,
        ev,
        fv,
        cv: Vec::new(),
        boundary: BTreeMap::new(),
    })
}

/// Loads a complex by extension: `.obj` or LAR-JSON otherwise.
pub fn read_document(path: &Path) -> Result<LarDocument> {
    let text = fs::read_to_string(path)?;
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_lowercase)
        .as_deref()
    {
        Some("obj") => parse_obj(&text),
        _ => LarDocument::from_json(&text),
    }
}

/// Writes each operator as `<name>.mtx` under `dir`.
pub fn export_matrix_market(dir: &Path, ops: &[(String, SignedOperator)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (name, op) in ops {
        fs::write(dir.join(format!("{name}.mtx")), op.to_matrix_market())?;
    }
    Ok(())
}

/// Reads `<name>.mtx` written by [`export_matrix_market`].
pub fn import_matrix_market(dir: &Path, name: &str, domain_dim: u8) -> Result<SignedOperator> {
    let text = fs::read_to_string(dir.join(format!("{name}.mtx")))?;
    SignedOperator::from_matrix_market(&text, domain_dim, domain_dim.saturating_sub(1))
}

/// Outer boundary chain stored as the single column of the `outer` operator.
pub fn outer_chain(doc: &LarDocument) -> Result<Option<SignedChain>> {
    match doc.boundary.get("outer") {
        None => Ok(None),
        Some(op) => {
            let op = op.to_operator(doc.dim as u8)?;
            if op.cols() != 1 {
                return Err(Error::Validation(
                    "outer operator must have one column".into(),
                ));
            }
            Ok(Some(op.column_chain(0)))
        }
    }
}
