//! Spines: ribbon graphs whose 1-valent vertices are orbifold points.
//!
//! Half-edge `h` points away from `vertex(h)`. Cyclic orders are
//! counterclockwise, `next(h)` is the counterclockwise successor at the
//! vertex, and faces are orbits of `h -> next(twin(h))`.

mod io;
pub mod library;
pub mod random;

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use io::{SpineFile, SpineFileError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpineError {
    #[error("half-edge {0} is missing or used twice")]
    HalfEdge(usize),
    #[error("edge {label} joins two orbifold points")]
    PendingPair { label: u32 },
    #[error("pending vertex has order {0} < 2")]
    Order(u32),
    #[error("no edge with label {0}")]
    UnknownLabel(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surface {
    pub g: u32,
    pub s: u32,
    pub r: u32,
}

impl Surface {
    pub fn edge_count(&self) -> i64 {
        6 * self.g as i64 - 6 + 3 * self.s as i64 + 2 * self.r as i64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Vertex {
    /// Three half-edges in counterclockwise order.
    Trivalent([usize; 3]),
    /// Terminal of a pending edge at an orbifold point of order `order`.
    Pending { half: usize, order: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub label: u32,
    pub z: f64,
    pub halves: [usize; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spine {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    surface: Surface,
    edge_of: Vec<usize>,
    vertex_of: Vec<usize>,
}

impl Spine {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>, surface: Surface) -> Result<Spine, SpineError> {
        let nh = 2 * edges.len();
        let mut edge_of = vec![usize::MAX; nh];
        for (e, edge) in edges.iter().enumerate() {
            for &h in &edge.halves {
                if h >= nh || edge_of[h] != usize::MAX {
                    return Err(SpineError::HalfEdge(h));
                }
                edge_of[h] = e;
            }
        }
        let mut vertex_of = vec![usize::MAX; nh];
        for (v, vertex) in vertices.iter().enumerate() {
            let halves: &[usize] = match vertex {
                Vertex::Trivalent(hs) => hs,
                Vertex::Pending { half, order } => {
                    if *order < 2 {
                        return Err(SpineError::Order(*order));
                    }
                    std::slice::from_ref(half)
                }
            };
            for &h in halves {
                if h >= nh || vertex_of[h] != usize::MAX {
                    return Err(SpineError::HalfEdge(h));
                }
                vertex_of[h] = v;
            }
        }
        if let Some(h) = vertex_of.iter().position(|&v| v == usize::MAX) {
            return Err(SpineError::HalfEdge(h));
        }
        let spine = Spine {
            vertices,
            edges,
            surface,
            edge_of,
            vertex_of,
        };
        for edge in &spine.edges {
            if edge.halves.iter().all(|&h| spine.is_terminal(h)) {
                return Err(SpineError::PendingPair { label: edge.label });
            }
        }
        Ok(spine)
    }

    /// Builds a spine and infers `(g, s, r)` from its faces and terminals.
    pub fn with_inferred_surface(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Spine, SpineError> {
        let mut spine = Spine::new(vertices, edges, Surface { g: 0, s: 0, r: 0 })?;
        let s = spine.boundary_walks().len() as i64;
        let chi = spine.vertices.len() as i64 - spine.edges.len() as i64;
        spine.surface = Surface {
            g: ((2 - chi - s) / 2) as u32,
            s: s as u32,
            r: spine.pending_edges().len() as u32,
        };
        Ok(spine)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn n_halves(&self) -> usize {
        self.edge_of.len()
    }

    pub fn twin(&self, h: usize) -> usize {
        let [a, b] = self.edges[self.edge_of[h]].halves;
        if a == h {
            b
        } else {
            a
        }
    }

    pub fn edge(&self, h: usize) -> usize {
        self.edge_of[h]
    }

    pub fn vertex(&self, h: usize) -> usize {
        self.vertex_of[h]
    }

    /// Counterclockwise successor of `h` at its vertex; a terminal half is
    /// its own successor.
    pub fn next(&self, h: usize) -> usize {
        match &self.vertices[self.vertex_of[h]] {
            Vertex::Trivalent(hs) => {
                let i = hs.iter().position(|&x| x == h).unwrap();
                hs[(i + 1) % 3]
            }
            Vertex::Pending { .. } => h,
        }
    }

    pub fn is_terminal(&self, h: usize) -> bool {
        matches!(self.vertices[self.vertex_of[h]], Vertex::Pending { .. })
    }

    /// Order of the orbifold point at the end of edge `e`, if it is pending.
    pub fn pending_order(&self, e: usize) -> Option<u32> {
        self.edges[e].halves.iter().find_map(|&h| match self.vertices[self.vertex_of[h]] {
            Vertex::Pending { order, .. } => Some(order),
            _ => None,
        })
    }

    pub fn pending_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.pending_order(e).is_some()).collect()
    }

    /// Half of pending edge `e` at its trivalent end.
    pub fn pending_base(&self, e: usize) -> Option<usize> {
        self.pending_order(e)?;
        self.edges[e].halves.iter().copied().find(|&h| !self.is_terminal(h))
    }

    pub fn index_of_label(&self, label: u32) -> Result<usize, SpineError> {
        self.edges
            .iter()
            .position(|e| e.label == label)
            .ok_or(SpineError::UnknownLabel(label))
    }

    pub fn shears(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.z).collect()
    }

    pub fn with_shears(&self, z: &[f64]) -> Spine {
        let mut out = self.clone();
        for (e, &v) in out.edges.iter_mut().zip(z) {
            e.z = v;
        }
        out
    }

    pub fn set_shear(&mut self, e: usize, z: f64) {
        self.edges[e].z = z;
    }

    /// Replaces the combinatorial data, keeping labels and the surface.
    pub(crate) fn rewired(&self, vertices: Vec<Vertex>, edges: Vec<Edge>) -> Spine {
        Spine::new(vertices, edges, self.surface).expect("moves keep spines well formed")
    }

    /// Face walks as sequences of traversed half-edges.
    pub fn boundary_walks(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n_halves()];
        let mut faces = Vec::new();
        for start in 0..self.n_halves() {
            if seen[start] {
                continue;
            }
            let mut walk = Vec::new();
            let mut h = start;
            while !seen[h] {
                seen[h] = true;
                walk.push(h);
                h = self.next(self.twin(h));
            }
            faces.push(walk);
        }
        faces
    }

    /// Edge multiplicities of each face walk.
    pub fn poisson_center(&self) -> Vec<Vec<i64>> {
        self.boundary_walks()
            .iter()
            .map(|walk| {
                let mut v = vec![0i64; self.edges.len()];
                for &h in walk {
                    v[self.edge(h)] += 1;
                }
                v
            })
            .collect()
    }

    /// `B[a][b]` counts the times edge `b` follows edge `a` counterclockwise
    /// at a trivalent vertex, minus the reverse.
    pub fn poisson_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.edges.len();
        let mut b = vec![vec![0i64; n]; n];
        for v in &self.vertices {
            if let Vertex::Trivalent(hs) = v {
                for i in 0..3 {
                    let (x, y) = (self.edge(hs[i]), self.edge(hs[(i + 1) % 3]));
                    b[x][y] += 1;
                    b[y][x] -= 1;
                }
            }
        }
        b
    }

    pub fn validate(&self) -> ValidationReport {
        self.validate_as(self.surface)
    }

    pub fn validate_as(&self, surface: Surface) -> ValidationReport {
        let mut issues = Vec::new();
        let e = self.edges.len() as i64;
        let expected = surface.edge_count();
        if e != expected {
            issues.push(format!("edge count {e}, expected 6g-6+3s+2r = {expected}"));
        }
        let r = self.pending_edges().len() as u32;
        if r != surface.r {
            issues.push(format!("{r} pending vertices, expected r = {}", surface.r));
        }
        let mut labels: Vec<u32> = self.edges.iter().map(|e| e.label).collect();
        labels.sort_unstable();
        if labels != (1..=self.edges.len() as u32).collect::<Vec<_>>() {
            issues.push("edge labels are not 1..E".to_string());
        }
        let faces = self.boundary_walks().len();
        if faces as u32 != surface.s {
            issues.push(format!("{faces} boundary walks, expected s = {}", surface.s));
        }
        if !self.is_connected() {
            issues.push("graph is disconnected".to_string());
        }
        let chi = self.vertices.len() as i64 - e;
        let expected_chi = 2 - 2 * surface.g as i64 - surface.s as i64;
        if chi != expected_chi {
            issues.push(format!("V - E = {chi}, expected 2 - 2g - s = {expected_chi}"));
        }
        ValidationReport {
            surface,
            edges: self.edges.len(),
            faces,
            valid: issues.is_empty(),
            issues,
        }
    }

    fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut seen = HashSet::from([0usize]);
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            let halves: Vec<usize> = match &self.vertices[v] {
                Vertex::Trivalent(hs) => hs.to_vec(),
                Vertex::Pending { half, .. } => vec![*half],
            };
            for h in halves {
                let w = self.vertex(self.twin(h));
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    /// Same spine with labels permuted: edge with label `l` gets `perm[l - 1]`.
    pub fn relabeled(&self, perm: &[u32]) -> Spine {
        let mut out = self.clone();
        for e in &mut out.edges {
            e.label = perm[e.label as usize - 1];
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub surface: Surface,
    pub edges: usize,
    pub faces: usize,
    pub valid: bool,
    pub issues: Vec<String>,
}

pub fn matrix_rank(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|row| row.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let inv = BigRational::one() / &a[rank][c];
        for i in rank + 1..a.len() {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..cols {
                let t = &f * &a[rank][j];
                a[i][j] -= t;
            }
        }
        rank += 1;
    }
    rank
}

pub fn mat_vec(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

