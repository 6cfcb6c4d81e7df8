//! JSON interchange format for decompositions.
//!
//! ```json
//! {"params":{"lambda":2,"k":4,"u":5,"g":2},
//!  "factors":[{"hole":0,"cycles":[[[1,0],[2,1],[3,0],[4,1]]]}],
//!  "provenance":["..."]}
//! ```
//!
//! Vertices are `[part, slot]` arrays and cycles are written in canonical form,
//! so equal decompositions serialise to identical bytes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arcs::Params;
use crate::graphs::{Cycle, Decomposition, GraphError, Host, PartialFactor, Vertex};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("factor {factor}, cycle {cycle}: {source}")]
    BadCycle { factor: usize, cycle: usize, source: GraphError },
    #[error("{factors} factors but {tags} provenance tags")]
    ProvenanceLength { factors: usize, tags: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub lambda: u32,
    pub k: u32,
    pub u: u32,
    pub g: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorRecord {
    pub hole: Option<u32>,
    pub cycles: Vec<Vec<Vertex>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcsDocument {
    pub params: ParamsRecord,
    pub factors: Vec<FactorRecord>,
    pub provenance: Vec<String>,
}

impl From<&PartialFactor> for FactorRecord {
    fn from(f: &PartialFactor) -> Self {
        FactorRecord { hole: f.hole, cycles: f.cycles.iter().map(|c| c.vertices().to_vec()).collect() }
    }
}

pub(crate) fn factors_from_records(records: &[FactorRecord], k: usize) -> Result<Vec<PartialFactor>, IoError> {
    records
        .iter()
        .enumerate()
        .map(|(fi, record)| {
            let cycles = record
                .cycles
                .iter()
                .enumerate()
                .map(|(ci, vs)| {
                    Cycle::new(vs.clone()).map_err(|source| IoError::BadCycle { factor: fi, cycle: ci, source })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PartialFactor::new(record.hole, k, cycles))
        })
        .collect()
}

pub fn to_document(d: &Decomposition, p: &Params) -> ArcsDocument {
    ArcsDocument {
        params: ParamsRecord { lambda: p.lambda, k: p.k, u: p.u, g: p.g },
        factors: d.factors.iter().map(FactorRecord::from).collect(),
        provenance: d.provenance.clone(),
    }
}

/// Compact canonical JSON followed by a newline.
pub fn to_json(d: &Decomposition, p: &Params) -> String {
    let mut s = serde_json::to_string(&to_document(d, p)).expect("documents always serialise");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<(Params, Decomposition), IoError> {
    let doc: ArcsDocument = serde_json::from_str(text)?;
    let ParamsRecord { lambda, k, u, g } = doc.params;
    let factors = factors_from_records(&doc.factors, k as usize)?;
    if doc.provenance.len() != factors.len() {
        return Err(IoError::ProvenanceLength { factors: factors.len(), tags: doc.provenance.len() });
    }
    let d = Decomposition { host: Host::Tensor { u, g, lambda }, factors, provenance: doc.provenance };
    Ok((Params { lambda, k, u, g }, d))
}
