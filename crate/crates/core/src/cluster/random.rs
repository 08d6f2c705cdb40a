//! Random seeds and mutation sequences for property sweeps.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{ClusterError, Coefficient, CoefficientMode, ExchangeMatrix, GenSeed};
use crate::laurent::PolyRing;
use crate::ring::{CyclotomicField, FieldElem};

/// Bounds for [`random_seed`].
#[derive(Clone, Debug)]
pub struct SeedShape {
    pub rank: usize,
    pub max_entry: i64,
    pub max_degree: u32,
    /// Orders `p` whose `w_p` may appear in coefficient tuples.
    pub orders: Vec<u32>,
}

/// Random `d` and a matrix `b_ij = d_i c_ij` with `c` skew-symmetric, so that
/// `d` symmetrizes `B` and row `i` is divisible by `d_i`.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, max_entry: i64, max_degree: u32) -> ExchangeMatrix {
    let d: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=max_degree)).collect();
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let bound = max_entry / d[i].max(d[j]) as i64;
            let c = rng.gen_range(-bound..=bound);
            rows[i][j] = d[i] as i64 * c;
            rows[j][i] = -(d[j] as i64) * c;
        }
    }
    ExchangeMatrix::new(rows, d).expect("symmetrized by construction")
}

fn random_coefficient<R: Rng + ?Sized>(rng: &mut R, field: &CyclotomicField, omegas: &[FieldElem]) -> FieldElem {
    let mut c = field.int(rng.gen_range(1..=2));
    if let Some(w) = omegas.choose(rng) {
        if rng.gen_bool(0.5) {
            c = &c + w;
        }
    }
    c
}

/// Random fixed-mode seed with reciprocal tuples `(1, .., 1)` whose inner
/// entries are small positive combinations of `1` and the `w_p`.
pub fn random_seed<R: Rng + ?Sized>(rng: &mut R, shape: &SeedShape) -> Result<GenSeed, ClusterError> {
    let field = CyclotomicField::for_orders(&shape.orders)?;
    let omegas = shape.orders.iter().map(|&p| field.omega(p)).collect::<Result<Vec<_>, _>>()?;
    let n = shape.rank;
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let ring = PolyRing::new(field.clone(), names);
    let matrix = random_matrix(rng, n, shape.max_entry, shape.max_degree);
    let coeffs = matrix
        .d()
        .iter()
        .map(|&di| {
            let di = di as usize;
            let half: Vec<FieldElem> = (0..=di / 2)
                .map(|l| if l == 0 { field.one() } else { random_coefficient(rng, &field, &omegas) })
                .collect();
            (0..=di)
                .map(|l| Coefficient::scalar(half[l.min(di - l)].clone(), 0))
                .collect()
        })
        .collect();
    GenSeed::new(ring, matrix, coeffs, CoefficientMode::Fixed)
}

/// Directions in `0..n` with no immediate repeats.
pub fn random_directions<R: Rng + ?Sized>(rng: &mut R, n: usize, len: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(len);
    while out.len() < len {
        let k = rng.gen_range(0..n);
        if n == 1 || out.last() != Some(&k) {
            out.push(k);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_seeds_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let shape = SeedShape {
            rank: 4,
            max_entry: 3,
            max_degree: 3,
            orders: vec![4, 5],
        };
        for _ in 0..50 {
            let seed = random_seed(&mut rng, &shape).unwrap();
            seed.matrix().check_symmetrized_by_d().unwrap();
            let m = seed.matrix();
            assert!((0..4).all(|i| (0..4).all(|j| m.get(i, j).abs() <= 3)));
        }
        let dirs = random_directions(&mut rng, 3, 20);
        assert!(dirs.windows(2).all(|w| w[0] != w[1]));
    }
}
