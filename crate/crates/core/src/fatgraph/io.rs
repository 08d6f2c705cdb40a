use serde::{Deserialize, Serialize};

use super::{Edge, Spine, SpineError, Surface, Vertex};

#[derive(Debug, thiserror::Error)]
pub enum SpineFileError {
    #[error("spine file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("spine file: {0}")]
    Spine(#[from] SpineError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexFile {
    Cyclic { cyclic: [usize; 3] },
    Pending { pending: usize, order: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeFile {
    pub halves: [usize; 2],
    pub label: u32,
    #[serde(rename = "Z")]
    pub z: f64,
}

/// JSON spine description. Half-edges are numbered `0..2E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpineFile {
    pub vertices: Vec<VertexFile>,
    pub edges: Vec<EdgeFile>,
    pub surface: Surface,
}

impl SpineFile {
    pub fn from_json(text: &str) -> Result<Self, SpineFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spine file serializes")
    }

    pub fn to_spine(&self) -> Result<Spine, SpineFileError> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| match *v {
                VertexFile::Cyclic { cyclic } => Vertex::Trivalent(cyclic),
                VertexFile::Pending { pending, order } => Vertex::Pending { half: pending, order },
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                label: e.label,
                z: e.z,
                halves: e.halves,
            })
            .collect();
        Ok(Spine::new(vertices, edges, self.surface)?)
    }

    pub fn from_spine(spine: &Spine) -> SpineFile {
        SpineFile {
            vertices: spine
                .vertices()
                .iter()
                .map(|v| match *v {
                    Vertex::Trivalent(cyclic) => VertexFile::Cyclic { cyclic },
                    Vertex::Pending { half, order } => VertexFile::Pending { pending: half, order },
                })
                .collect(),
            edges: spine
                .edges()
                .iter()
                .map(|e| EdgeFile {
                    halves: e.halves,
                    label: e.label,
                    z: e.z,
                })
                .collect(),
            surface: spine.surface(),
        }
    }
}
