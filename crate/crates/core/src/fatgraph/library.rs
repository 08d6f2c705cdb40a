//! Small spines used as examples and test beds. Edge labels are `1..E` in
//! the order listed; all shears start at zero.

use super::{Edge, Spine, Surface, Vertex};

fn build(vertices: Vec<Vertex>, n_edges: usize, surface: Surface) -> Spine {
    let edges = (0..n_edges)
        .map(|e| Edge {
            label: e as u32 + 1,
            z: 0.0,
            halves: [2 * e, 2 * e + 1],
        })
        .collect();
    Spine::new(vertices, edges, surface).expect("library spines are well formed")
}

fn tri(a: usize, b: usize, c: usize) -> Vertex {
    Vertex::Trivalent([a, b, c])
}

/// Two vertices joined by three edges, embedded with one face.
pub fn torus_with_hole() -> Spine {
    build(vec![tri(0, 2, 4), tri(1, 3, 5)], 3, Surface { g: 1, s: 1, r: 0 })
}

/// Planar theta graph: a sphere with three holes.
pub fn theta() -> Spine {
    build(vec![tri(0, 2, 4), tri(1, 5, 3)], 3, Surface { g: 0, s: 3, r: 0 })
}

/// Two loops (edges 1 and 3) joined by a stem (edge 2): a sphere with three
/// holes, two of them bounded by a single loop.
pub fn pants_dumbbell() -> Spine {
    build(vec![tri(0, 1, 2), tri(3, 4, 5)], 3, Surface { g: 0, s: 3, r: 0 })
}

/// One vertex carrying three pending edges: a disc with three orbifold
/// points of orders 2, 3 and 4.
pub fn tripod() -> Spine {
    build(
        vec![
            tri(0, 2, 4),
            Vertex::Pending { half: 1, order: 2 },
            Vertex::Pending { half: 3, order: 3 },
            Vertex::Pending { half: 5, order: 4 },
        ],
        3,
        Surface { g: 0, s: 1, r: 3 },
    )
}

/// Torus with one hole and two orbifold points of order 3.
///
/// Edges: 1 = Z1, 2 = Z2 (pending), 3 = A, 4 = B, 5 = Y2, 6 = Y3, 7 = Y4.
/// The chain Y2 - Y3 - Y4 carries the pending edges and closes up through
/// the handle A, B.
pub fn treegraph() -> Spine {
    build(
        vec![
            tri(8, 4, 6),
            tri(9, 10, 0),
            tri(11, 12, 2),
            tri(13, 5, 7),
            Vertex::Pending { half: 1, order: 3 },
            Vertex::Pending { half: 3, order: 3 },
        ],
        7,
        Surface { g: 1, s: 1, r: 2 },
    )
}

/// Torus with two holes: the one-holed torus with a loop (edge 6) on a stem
/// (edge 5) grafted onto edge 3, which is split into edges 3 and 4.
pub fn torus_two_holes() -> Spine {
    build(
        vec![tri(0, 2, 4), tri(1, 3, 7), tri(5, 6, 8), tri(9, 10, 11)],
        6,
        Surface { g: 1, s: 2, r: 0 },
    )
}

/// Every library spine with its name.
pub fn all() -> Vec<(&'static str, Spine)> {
    vec![
        ("torus-with-hole", torus_with_hole()),
        ("theta", theta()),
        ("pants-dumbbell", pants_dumbbell()),
        ("tripod", tripod()),
        ("treegraph", treegraph()),
        ("torus-two-holes", torus_two_holes()),
    ]
}

pub fn by_name(name: &str) -> Option<Spine> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, s)| s)
}
