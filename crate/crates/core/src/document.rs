//! The JSON mesh document shared by the library and the command line tool.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "name": "example",
//!   "vertices": 10,
//!   "edges": [{"id": 0, "endpoints": [3, 8]}, ...],
//!   "faces": [[{"vertex": 3, "edge": 0}, {"vertex": 8, "edge": 14, "reversed": true}, ...], ...],
//!   "weights": {"0": 0.6283185307179586, ...}
//! }
//! ```
//!
//! A corner's side runs along its edge from its vertex to the next corner's
//! vertex, in the edge's direction unless `reversed` is true. Cell complexes
//! use `cells` instead of `faces`. Unknown fields are rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::{validate_cell_complex, validate_triangulation, CellComplex, Corner, RawComplex, Triangulation};
use crate::conditions::WeightFunction;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub id: usize,
    /// `[tail, head]`
    pub endpoints: [usize; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CornerRecord {
    pub vertex: usize,
    pub edge: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub reversed: bool,
}

impl From<CornerRecord> for Corner {
    fn from(c: CornerRecord) -> Corner {
        Corner::new(c.vertex, c.edge, c.reversed)
    }
}

impl From<Corner> for CornerRecord {
    fn from(c: Corner) -> CornerRecord {
        CornerRecord { vertex: c.vertex, edge: c.edge, reversed: c.reversed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshDocument {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vertices: usize,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub faces: Vec<Vec<CornerRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<Vec<CornerRecord>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<usize, f64>>,
}

impl MeshDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: MeshDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema_version {}", doc.schema_version)));
        }
        if doc.cells.is_some() && !doc.faces.is_empty() {
            return Err(Error::Parse("a document holds either faces or cells, not both".into()));
        }
        for (i, e) in doc.edges.iter().enumerate() {
            if e.id != i {
                return Err(Error::Parse(format!("edge ids must be 0..{} in order; position {i} has id {}", doc.edges.len(), e.id)));
            }
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("mesh documents always serialize")
    }

    pub fn from_triangulation(tri: &Triangulation, w: Option<&WeightFunction>, name: Option<String>) -> Self {
        let raw = tri.to_raw();
        MeshDocument {
            schema_version: SCHEMA_VERSION,
            name,
            vertices: raw.vertex_count,
            edges: raw.edges.iter().enumerate().map(|(id, &endpoints)| EdgeRecord { id, endpoints }).collect(),
            faces: raw.polygons.iter().map(|p| p.iter().map(|&c| c.into()).collect()).collect(),
            cells: None,
            weights: w.map(WeightFunction::to_map),
        }
    }

    pub fn is_cell_complex(&self) -> bool {
        self.cells.is_some()
    }

    fn raw(&self, polygons: &[Vec<CornerRecord>]) -> RawComplex {
        RawComplex {
            vertex_count: self.vertices,
            edges: self.edges.iter().map(|e| e.endpoints).collect(),
            polygons: polygons.iter().map(|p| p.iter().map(|&c| c.into()).collect()).collect(),
        }
    }

    pub fn triangulation(&self) -> Result<Triangulation> {
        if self.is_cell_complex() {
            return Err(Error::Incidence("document describes a cell complex, not a triangulation".into()));
        }
        validate_triangulation(&self.raw(&self.faces))
    }

    pub fn cell_complex(&self) -> Result<CellComplex> {
        let cells = self.cells.as_deref().unwrap_or(&self.faces);
        validate_cell_complex(&self.raw(cells))
    }

    /// The document's weights as a total function on its edges.
    pub fn weight_function(&self) -> Result<WeightFunction> {
        match &self.weights {
            Some(map) => WeightFunction::from_map(self.edges.len(), map),
            None => Err(Error::MissingWeight { edge: 0 }),
        }
    }
}
