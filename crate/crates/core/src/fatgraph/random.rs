//! Random connected spines.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Edge, Spine, Vertex};

/// A random connected ribbon graph with `trivalent` 3-valent vertices and
/// `orders.len()` orbifold points, shears uniform in `[-2, 2]`. The surface
/// is read off the embedding. `3 * trivalent + orders.len()` must be even.
pub fn random_spine<R: Rng + ?Sized>(rng: &mut R, trivalent: usize, orders: &[u32]) -> Spine {
    let r = orders.len();
    let nh = 3 * trivalent + r;
    assert!(nh % 2 == 0 && trivalent > 0, "no spine with {trivalent} trivalent vertices and {r} pending edges");
    loop {
        let mut halves: Vec<usize> = (0..nh).collect();
        halves.shuffle(rng);
        // Half-edges 3 * trivalent.. are terminals; they must pair with a
        // trivalent half.
        let pairs: Vec<[usize; 2]> = halves.chunks(2).map(|c| [c[0], c[1]]).collect();
        if pairs.iter().any(|p| p.iter().all(|&h| h >= 3 * trivalent)) {
            continue;
        }
        let mut vertices: Vec<Vertex> = (0..trivalent)
            .map(|v| Vertex::Trivalent([3 * v, 3 * v + 1, 3 * v + 2]))
            .collect();
        vertices.extend(orders.iter().enumerate().map(|(i, &order)| Vertex::Pending {
            half: 3 * trivalent + i,
            order,
        }));
        let mut labels: Vec<u32> = (1..=pairs.len() as u32).collect();
        labels.shuffle(rng);
        let mut edges: Vec<Edge> = pairs
            .into_iter()
            .zip(labels)
            .map(|(halves, label)| Edge {
                label,
                z: rng.gen_range(-2.0..2.0),
                halves,
            })
            .collect();
        edges.sort_by_key(|e| e.label);
        let spine = Spine::with_inferred_surface(vertices, edges).expect("valid by construction");
        if spine.validate().valid {
            return spine;
        }
    }
}
