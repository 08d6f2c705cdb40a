//! Moves on spines: Whitehead flips of inner edges, flips of pending edges
//! and inversion of the spiraling direction at a hole, with their action on
//! shear coordinates and on paths.

mod invariance;
mod transport;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::fatgraph::{Spine, SpineError, Vertex};

pub use invariance::{
    bracket_residual, check_move_invariance, exchange_matrix, is_self_folded, poisson_compatible, InvarianceReport,
    WordCheck, BRACKET_TOL,
};
pub use transport::transport_path;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MoveError {
    #[error(transparent)]
    Spine(#[from] SpineError),
    #[error("edge {0} is pending")]
    Pending(u32),
    #[error("edge {0} is not pending")]
    NotPending(u32),
    #[error("edge {0} is a loop")]
    Loop(u32),
    #[error("edge {0} is not a loop bounding a hole on a stem")]
    NotSpiral(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    InnerFlip,
    PendingFlip,
    PendingFlipViaHole,
    InvertSpiral,
}

/// One step of a move script. `target` is an edge label; for
/// `InvertSpiral` it is the loop around the hole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub target: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShearUpdate {
    pub label: u32,
    pub before: f64,
    pub after: f64,
}

/// Half-edges around the moved edge, needed to transport paths.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Local {
    /// `[zu, h1, h2]` and `[zv, h3, h4]` became `[zu, h4, h1]`, `[zv, h2, h3]`.
    Inner { zu: usize, zv: usize, h: [usize; 4] },
    /// `[z, y2, y1]` became `[z, y1, y2]`.
    Pending { z: usize, y1: usize, y2: usize, p: u32 },
    Spiral,
}

#[derive(Debug, Clone)]
pub struct MoveRecord {
    pub mv: Move,
    pub updates: Vec<ShearUpdate>,
    pub before: Spine,
    pub after: Spine,
    pub(crate) local: Local,
}

impl MoveRecord {
    /// The move undoing this one: every move here is its own inverse.
    pub fn inverse(&self) -> Move {
        self.mv
    }
}

fn log1p_exp(x: f64) -> f64 {
    if x > 30.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn record(mv: Move, before: &Spine, after: Spine, local: Local) -> MoveRecord {
    let updates = before
        .edges()
        .iter()
        .zip(after.edges())
        .filter(|(a, b)| a.z != b.z)
        .map(|(a, b)| ShearUpdate {
            label: a.label,
            before: a.z,
            after: b.z,
        })
        .collect();
    MoveRecord {
        mv,
        updates,
        before: before.clone(),
        after,
        local,
    }
}

fn trivalent(spine: &Spine, h: usize) -> [usize; 3] {
    match spine.vertices()[spine.vertex(h)] {
        Vertex::Trivalent(hs) => hs,
        Vertex::Pending { .. } => unreachable!("half {h} is terminal"),
    }
}

/// `[h, next(h), next(next(h))]`.
fn around(spine: &Spine, h: usize) -> [usize; 3] {
    let n = spine.next(h);
    [h, n, spine.next(n)]
}

/// Whitehead move on an inner edge with distinct endpoints.
///
/// With `phi(Z) = log(1 + e^Z)` the edges after `Z` on either side (`A`,
/// `C`) gain `phi(Z)`, the ones before it (`B`, `D`) lose `phi(-Z)`, and `Z`
/// changes sign. Contributions add up when edges coincide.
pub fn flip_inner(spine: &Spine, label: u32) -> Result<MoveRecord, MoveError> {
    let e = spine.index_of_label(label)?;
    if spine.pending_order(e).is_some() {
        return Err(MoveError::Pending(label));
    }
    let [zu, zv] = spine.edges()[e].halves;
    if spine.vertex(zu) == spine.vertex(zv) {
        return Err(MoveError::Loop(label));
    }
    let [_, h1, h2] = around(spine, zu);
    let [_, h3, h4] = around(spine, zv);
    let (u, v) = (spine.vertex(zu), spine.vertex(zv));
    let mut vertices = spine.vertices().to_vec();
    vertices[u] = Vertex::Trivalent([zu, h4, h1]);
    vertices[v] = Vertex::Trivalent([zv, h2, h3]);
    let z = spine.edges()[e].z;
    let mut shears = spine.shears();
    for (h, delta) in [(h1, log1p_exp(z)), (h2, -log1p_exp(-z)), (h3, log1p_exp(z)), (h4, -log1p_exp(-z))] {
        shears[spine.edge(h)] += delta;
    }
    shears[e] = -z;
    let after = spine.rewired(vertices, spine.edges().to_vec()).with_shears(&shears);
    let local = Local::Inner {
        zu,
        zv,
        h: [h1, h2, h3, h4],
    };
    Ok(record(
        Move {
            kind: MoveKind::InnerFlip,
            target: label,
        },
        spine,
        after,
        local,
    ))
}

struct PendingSite {
    e: usize,
    z: usize,
    y1: usize,
    y2: usize,
    p: u32,
}

fn pending_site(spine: &Spine, label: u32) -> Result<PendingSite, MoveError> {
    let e = spine.index_of_label(label)?;
    let p = spine.pending_order(e).ok_or(MoveError::NotPending(label))?;
    let z = spine.pending_base(e).unwrap();
    let [_, y2, y1] = around(spine, z);
    Ok(PendingSite { e, z, y1, y2, p })
}

fn pending_result(spine: &Spine, site: &PendingSite, shears: Vec<f64>, kind: MoveKind, label: u32) -> MoveRecord {
    let c = spine.vertex(site.z);
    let mut vertices = spine.vertices().to_vec();
    debug_assert_eq!(trivalent(spine, site.z).len(), 3);
    vertices[c] = Vertex::Trivalent([site.z, site.y1, site.y2]);
    let after = spine.rewired(vertices, spine.edges().to_vec()).with_shears(&shears);
    record(
        Move { kind, target: label },
        spine,
        after,
        Local::Pending {
            z: site.z,
            y1: site.y1,
            y2: site.y2,
            p: site.p,
        },
    )
}

/// Flip of a pending edge of order `p` at the vertex `[Z, Y2, Y1]`
/// (counterclockwise): with `w = 2 cos(pi / p)`,
/// `Y1 -= log(1 + w e^{-Z} + e^{-2Z})`, `Y2 += log(1 + w e^Z + e^{2Z})`,
/// `Z -> -Z`, and the pending edge moves to the other side of the vertex.
pub fn flip_pending(spine: &Spine, label: u32) -> Result<MoveRecord, MoveError> {
    let site = pending_site(spine, label)?;
    let w = 2.0 * (PI / site.p as f64).cos();
    let z = spine.edges()[site.e].z;
    let mut shears = spine.shears();
    shears[spine.edge(site.y1)] -= (1.0 + w * (-z).exp() + (-2.0 * z).exp()).ln();
    shears[spine.edge(site.y2)] += (1.0 + w * z.exp() + (2.0 * z).exp()).ln();
    shears[site.e] = -z;
    Ok(pending_result(spine, &site, shears, MoveKind::PendingFlip, label))
}

/// The pending flip realized by two standard flips after replacing the
/// orbifold point by a hole of perimeter `P = 2 pi i / p`, so that
/// `e^{P/2} + e^{-P/2} = w_p`. The pending shear is `Z + P/2` in terms of
/// the edge `Z` leading to the hole.
pub fn pending_flip_via_hole(spine: &Spine, label: u32) -> Result<MoveRecord, MoveError> {
    let site = pending_site(spine, label)?;
    let p_hole = Complex64::new(0.0, 2.0 * PI / site.p as f64);
    let phi = |x: Complex64| (Complex64::new(1.0, 0.0) + x.exp()).ln();
    let mut y2 = Complex64::new(spine.edges()[spine.edge(site.y2)].z, 0.0);
    let mut y1 = Complex64::new(spine.edges()[spine.edge(site.y1)].z, 0.0);
    let z = Complex64::new(spine.edges()[site.e].z, 0.0) - p_hole / 2.0;
    // Flip the edge to the hole; the loop around it becomes the edge P + Z.
    y2 += phi(z);
    y1 -= phi(-z);
    let w = p_hole + z;
    // Flip that edge; -Z absorbs it and closes up into the loop again.
    y2 += phi(w);
    y1 -= phi(-w);
    let z_new = -w + p_hole / 2.0;
    let mut shears = spine.shears();
    let ey1 = spine.edge(site.y1);
    let ey2 = spine.edge(site.y2);
    if ey1 == ey2 {
        let start = Complex64::new(shears[ey1], 0.0);
        shears[ey1] = (y1 + y2 - start).re;
    } else {
        shears[ey1] = y1.re;
        shears[ey2] = y2.re;
    }
    shears[site.e] = z_new.re;
    Ok(pending_result(spine, &site, shears, MoveKind::PendingFlipViaHole, label))
}

/// Loop `P` bounding a hole by itself, attached by the stem `Y`:
/// `(Y, P) -> (Y + P, -P)`.
pub fn invert_spiral(spine: &Spine, loop_label: u32) -> Result<MoveRecord, MoveError> {
    let e = spine.index_of_label(loop_label)?;
    let [a, b] = spine.edges()[e].halves;
    if spine.pending_order(e).is_some() || spine.vertex(a) != spine.vertex(b) {
        return Err(MoveError::NotSpiral(loop_label));
    }
    let bounds_hole = spine.boundary_walks().iter().any(|w| w.len() == 1 && spine.edge(w[0]) == e);
    let stem = trivalent(spine, a).into_iter().find(|&h| h != a && h != b).unwrap();
    let ys = spine.edge(stem);
    if !bounds_hole || spine.vertex(spine.twin(stem)) == spine.vertex(stem) {
        return Err(MoveError::NotSpiral(loop_label));
    }
    let mut shears = spine.shears();
    let p = shears[e];
    shears[ys] += p;
    shears[e] = -p;
    let after = spine.with_shears(&shears);
    Ok(record(
        Move {
            kind: MoveKind::InvertSpiral,
            target: loop_label,
        },
        spine,
        after,
        Local::Spiral,
    ))
}

pub fn apply_move(spine: &Spine, mv: Move) -> Result<MoveRecord, MoveError> {
    match mv.kind {
        MoveKind::InnerFlip => flip_inner(spine, mv.target),
        MoveKind::PendingFlip => flip_pending(spine, mv.target),
        MoveKind::PendingFlipViaHole => pending_flip_via_hole(spine, mv.target),
        MoveKind::InvertSpiral => invert_spiral(spine, mv.target),
    }
}

/// Every move applicable to the spine.
pub fn available_moves(spine: &Spine) -> Vec<Move> {
    let mut out = Vec::new();
    for e in spine.edges() {
        for kind in [MoveKind::InnerFlip, MoveKind::PendingFlip, MoveKind::InvertSpiral] {
            let mv = Move { kind, target: e.label };
            if apply_move(spine, mv).is_ok() {
                out.push(mv);
            }
        }
    }
    out
}
