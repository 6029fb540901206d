//! JSON graph and family files.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{FamilySpec, GraphFamily};
use crate::graph::{GraphInput, VertexSpec, WeightedGraph};

/// Vertex ids may be written as strings or integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum Id {
    Str(String),
    Int(i64),
}

fn id_string<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<String, D::Error> {
    Ok(match Id::deserialize(d)? {
        Id::Str(s) => s,
        Id::Int(i) => i.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    #[serde(deserialize_with = "id_string")]
    pub id: String,
    pub c: f64,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    #[serde(deserialize_with = "id_string")]
    pub u: String,
    #[serde(deserialize_with = "id_string")]
    pub v: String,
    pub b: f64,
}

/// `{"vertices":[{"id","c","m"}],"edges":[{"u","v","b"}]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<VertexRecord>,
    #[serde(default)]
    pub edges: Vec<EdgeRecord>,
}

impl GraphFile {
    /// Raw input, axioms not yet checked. Fails only on structural problems
    /// (repeated vertex ids, edges naming unknown vertices).
    pub fn to_input(&self) -> Result<GraphInput> {
        let mut index = HashMap::new();
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            if index.insert(v.id.as_str(), vertices.len()).is_some() {
                return Err(Error::InvalidArgument(format!("vertex id {} listed twice", v.id)));
            }
            vertices.push(VertexSpec { label: v.id.clone(), c: v.c, m: v.m });
        }
        let lookup = |id: &str| index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()));
        let entries = self
            .edges
            .iter()
            .map(|e| Ok((lookup(&e.u)?, lookup(&e.v)?, e.b)))
            .collect::<Result<Vec<_>>>()?;
        Ok(GraphInput { vertices, entries })
    }

    pub fn to_graph(&self) -> Result<WeightedGraph> {
        WeightedGraph::from_input(&self.to_input()?)
    }

    pub fn from_graph(g: &WeightedGraph) -> Self {
        GraphFile {
            vertices: (0..g.len())
                .map(|x| VertexRecord { id: g.label(x).to_string(), c: g.killing()[x], m: g.measure()[x] })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|&(x, y, b)| EdgeRecord { u: g.label(x).to_string(), v: g.label(y).to_string(), b })
                .collect(),
        }
    }
}

/// Contents of an input file: either an explicit graph or a family spec.
#[derive(Debug, Clone, PartialEq)]
pub enum InputFile {
    Graph(GraphFile),
    Family(FamilySpec),
}

impl InputFile {
    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("kind").is_some() {
            Ok(InputFile::Family(serde_json::from_value(value)?))
        } else {
            Ok(InputFile::Graph(serde_json::from_value(value)?))
        }
    }

    pub fn family(&self) -> Result<GraphFamily> {
        match self {
            InputFile::Graph(g) => Ok(GraphFamily::explicit(g.to_graph()?)),
            InputFile::Family(spec) => GraphFamily::from_spec(spec),
        }
    }
}

pub fn read_input(path: &Path) -> Result<InputFile> {
    InputFile::parse(&fs::read_to_string(path)?)
}

pub fn read_family(path: &Path) -> Result<GraphFamily> {
    read_input(path)?.family()
}

pub fn read_graph(path: &Path) -> Result<WeightedGraph> {
    let text = fs::read_to_string(path)?;
    let file: GraphFile = serde_json::from_str(&text)?;
    file.to_graph()
}
