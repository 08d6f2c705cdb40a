//! Seeds, exchange matrices and (generalized) mutations.
//!
//! Directions are 0-based in this API. A seed's polynomial ring holds the `n`
//! initial cluster variables followed by the coefficient generators.

mod analysis;
pub mod golden;
mod io;
pub mod random;

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::Serialize;

use crate::laurent::{LaurentError, LaurentPoly, Monomial, PolyRing};
use crate::ring::{FieldElem, RingError};

pub use analysis::{
    check_laurent, check_laurent_bounded, finite_type_probe, geometric_rank2_seed, positivity_search, FiniteTypeReport, LaurentFailure,
    LaurentReport, PositivityFinding, PositivitySearchReport,
};
pub use io::{SeedFile, SeedFileError};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error("exchange matrix must be square with {0} rows")]
    Shape(usize),
    #[error("d entries must be positive")]
    NonPositiveDegree,
    #[error("matrix is not skew-symmetrizable")]
    NotSkewSymmetrizable,
    #[error("d does not symmetrize B: b[{i}][{j}] d[{j}] != -b[{j}][{i}] d[{i}]")]
    NotSymmetrizedByD { i: usize, j: usize },
    #[error("row {row} entry b[{row}][{col}] = {value} is not divisible by d[{row}] = {d}")]
    MalformedExchange { row: usize, col: usize, value: i64, d: u32 },
    #[error("direction {k} out of range for rank {n}")]
    Direction { k: usize, n: usize },
    #[error("standard mutation needs all d_i = 1")]
    NotBinomial,
    #[error("coefficient tuple {i} has length {got}, expected {expected}")]
    TupleLength { i: usize, got: usize, expected: usize },
    #[error("coefficient tuple {0} is not reciprocal, as fixed mode requires")]
    NotReciprocal(usize),
    #[error("fixed-mode tuple {0} must start and end with 1")]
    NotMonic(usize),
    #[error("extreme coefficient of tuple {0} is zero")]
    ZeroCoefficient(usize),
    #[error("finite-type probing needs fixed coefficients")]
    RequiresFixedMode,
    #[error("fixed-mode coefficients cannot carry generators")]
    GeneratorsInFixedMode,
    #[error("Laurent violation mutating in direction {k}: {source}")]
    Laurent { k: usize, source: LaurentError },
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Integer exchange matrix `B` with exchange degrees `d`.
///
/// `B` must be skew-symmetrizable and row `k` divisible by `d_k`. When some
/// `d_k > 1`, generalized mutation further needs `b_ij d_j = -b_ji d_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ExchangeMatrix {
    n: usize,
    b: Vec<i64>,
    d: Vec<u32>,
}

impl ExchangeMatrix {
    pub fn new(rows: Vec<Vec<i64>>, d: Vec<u32>) -> Result<Self, ClusterError> {
        let m = Self::new_unchecked(rows, d)?;
        if m.d.iter().any(|&x| x == 0) {
            return Err(ClusterError::NonPositiveDegree);
        }
        if m.symmetrizer().is_none() {
            return Err(ClusterError::NotSkewSymmetrizable);
        }
        m.check_divisibility()?;
        Ok(m)
    }

    /// Builds the matrix checking only its shape.
    pub fn new_unchecked(rows: Vec<Vec<i64>>, d: Vec<u32>) -> Result<Self, ClusterError> {
        let n = rows.len();
        if d.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(ClusterError::Shape(n));
        }
        Ok(ExchangeMatrix {
            n,
            b: rows.into_iter().flatten().collect(),
            d,
        })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.b[i * self.n + j]
    }

    pub fn d(&self) -> &[u32] {
        &self.d
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.b.chunks(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn check_divisibility(&self) -> Result<(), ClusterError> {
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                if v % self.d[i] as i64 != 0 {
                    return Err(ClusterError::MalformedExchange {
                        row: i,
                        col: j,
                        value: v,
                        d: self.d[i],
                    });
                }
            }
        }
        Ok(())
    }

    pub fn check_symmetrized_by_d(&self) -> Result<(), ClusterError> {
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) * self.d[j] as i64 != -self.get(j, i) * self.d[i] as i64 {
                    return Err(ClusterError::NotSymmetrizedByD { i, j });
                }
            }
        }
        Ok(())
    }

    /// Smallest positive integer `D` with `b_ij D_j = -b_ji D_i`, if any.
    pub fn symmetrizer(&self) -> Option<Vec<u64>> {
        let n = self.n;
        let mut ratio: Vec<Option<Ratio<i128>>> = vec![None; n];
        for start in 0..n {
            if ratio[start].is_some() {
                continue;
            }
            ratio[start] = Some(Ratio::from_integer(1));
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                let ri = ratio[i].expect("visited");
                for j in 0..n {
                    let (bij, bji) = (self.get(i, j) as i128, self.get(j, i) as i128);
                    if (bij == 0) != (bji == 0) || bij.signum() == bji.signum() && bij != 0 {
                        return None;
                    }
                    if bij == 0 {
                        continue;
                    }
                    // b_ij D_j = -b_ji D_i
                    let rj = ri * Ratio::new(-bji, bij);
                    match ratio[j] {
                        Some(existing) if existing != rj => return None,
                        Some(_) => {}
                        None => {
                            ratio[j] = Some(rj);
                            stack.push(j);
                        }
                    }
                }
            }
        }
        let lcm = ratio
            .iter()
            .map(|r| *r.expect("all assigned").denom())
            .fold(1i128, num_integer::lcm);
        let ints: Vec<i128> = ratio.iter().map(|r| (r.unwrap() * lcm).to_integer()).collect();
        let g = ints.iter().fold(0i128, |a, &b| num_integer::gcd(a, b));
        Some(ints.iter().map(|&x| (x / g) as u64).collect())
    }

    /// `beta_kj = b_kj / d_k`.
    pub fn beta(&self, k: usize, j: usize) -> Result<i64, ClusterError> {
        let v = self.get(k, j);
        let dk = self.d[k] as i64;
        if v % dk != 0 {
            return Err(ClusterError::MalformedExchange {
                row: k,
                col: j,
                value: v,
                d: self.d[k],
            });
        }
        Ok(v / dk)
    }

    /// Matrix mutation in direction `k`.
    pub fn mutate(&self, k: usize) -> ExchangeMatrix {
        let n = self.n;
        let mut b = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let bij = self.get(i, j);
                b[i * n + j] = if i == k || j == k {
                    -bij
                } else {
                    let (bik, bkj) = (self.get(i, k), self.get(k, j));
                    bij + (bik.abs() * bkj + bik * bkj.abs()) / 2
                };
            }
        }
        ExchangeMatrix {
            n,
            b,
            d: self.d.clone(),
        }
    }

    fn all_binomial(&self) -> bool {
        self.d.iter().all(|&x| x == 1)
    }
}

pub fn matrix_mutate(m: &ExchangeMatrix, k: usize) -> ExchangeMatrix {
    m.mutate(k)
}

impl fmt::Display for ExchangeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} d={:?}", self.rows(), self.d)
    }
}

/// A coefficient `scalar * g^exps` in `K* x Z^m` (generators `g`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coefficient {
    pub scalar: FieldElem,
    pub exps: Vec<i32>,
}

impl Coefficient {
    pub fn scalar(s: FieldElem, m: usize) -> Self {
        Coefficient { scalar: s, exps: vec![0; m] }
    }

    pub fn mul(&self, other: &Coefficient) -> Coefficient {
        Coefficient {
            scalar: &self.scalar * &other.scalar,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn powi(&self, e: i64) -> Result<Coefficient, RingError> {
        Ok(Coefficient {
            scalar: self.scalar.powi(e)?,
            exps: self.exps.iter().map(|&x| x * e as i32).collect(),
        })
    }

    /// As a polynomial in `ring`, whose generator variables start at `offset`.
    pub fn to_poly(&self, ring: &Arc<PolyRing>, offset: usize) -> LaurentPoly {
        let mut e = vec![0; ring.nvars()];
        e[offset..offset + self.exps.len()].copy_from_slice(&self.exps);
        LaurentPoly::monomial(ring, self.scalar.clone(), Monomial(e))
    }
}

/// Divides a tuple by the monomial whose exponent in each generator is the
/// minimum over the tuple's nonzero entries.
fn normalize_tuple(tuple: &mut [Coefficient]) {
    let Some(m) = tuple.first().map(|c| c.exps.len()) else {
        return;
    };
    for g in 0..m {
        let min = tuple
            .iter()
            .filter(|c| !c.scalar.is_zero())
            .map(|c| c.exps[g])
            .min()
            .unwrap_or(0);
        for c in tuple.iter_mut() {
            c.exps[g] -= min;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientMode {
    /// Reciprocal tuples kept as they are.
    Fixed,
    /// Tuples in a free abelian group on declared generators.
    Tracked,
}

/// Cluster, coefficient tuples and exchange matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GenSeed {
    ring: Arc<PolyRing>,
    cluster: Vec<LaurentPoly>,
    coeffs: Vec<Vec<Coefficient>>,
    matrix: ExchangeMatrix,
    mode: CoefficientMode,
}

impl GenSeed {
    /// Initial seed: cluster variables are the first `B.rank()` variables of
    /// `ring`, the remaining variables are coefficient generators.
    pub fn new(
        ring: Arc<PolyRing>,
        matrix: ExchangeMatrix,
        coeffs: Vec<Vec<Coefficient>>,
        mode: CoefficientMode,
    ) -> Result<Self, ClusterError> {
        let n = matrix.rank();
        let cluster = (0..n).map(|i| LaurentPoly::var(&ring, i)).collect();
        Self::with_cluster(ring, cluster, matrix, coeffs, mode)
    }

    pub fn with_cluster(
        ring: Arc<PolyRing>,
        cluster: Vec<LaurentPoly>,
        matrix: ExchangeMatrix,
        coeffs: Vec<Vec<Coefficient>>,
        mode: CoefficientMode,
    ) -> Result<Self, ClusterError> {
        let n = matrix.rank();
        assert!(ring.nvars() >= n, "ring too small for the cluster");
        let m = ring.nvars() - n;
        if cluster.len() != n || coeffs.len() != n {
            return Err(ClusterError::Shape(n));
        }
        for (i, t) in coeffs.iter().enumerate() {
            let expected = matrix.d[i] as usize + 1;
            if t.len() != expected {
                return Err(ClusterError::TupleLength { i, got: t.len(), expected });
            }
            if t[0].scalar.is_zero() || t[expected - 1].scalar.is_zero() {
                return Err(ClusterError::ZeroCoefficient(i));
            }
            if t.iter().any(|c| c.exps.len() != m) {
                return Err(ClusterError::Shape(n));
            }
            if mode == CoefficientMode::Fixed {
                if t.iter().any(|c| c.exps.iter().any(|&e| e != 0)) {
                    return Err(ClusterError::GeneratorsInFixedMode);
                }
                if (0..expected).any(|l| t[l] != t[expected - 1 - l]) {
                    return Err(ClusterError::NotReciprocal(i));
                }
                // Otherwise the ratio rule rescales the other tuples.
                if !t[0].scalar.is_one() {
                    return Err(ClusterError::NotMonic(i));
                }
            }
        }
        Ok(GenSeed {
            ring,
            cluster,
            coeffs,
            matrix,
            mode,
        })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn cluster(&self) -> &[LaurentPoly] {
        &self.cluster
    }

    pub fn coefficients(&self) -> &[Vec<Coefficient>] {
        &self.coeffs
    }

    pub fn matrix(&self) -> &ExchangeMatrix {
        &self.matrix
    }

    pub fn mode(&self) -> CoefficientMode {
        self.mode
    }

    fn check_direction(&self, k: usize) -> Result<(), ClusterError> {
        if k >= self.rank() {
            Err(ClusterError::Direction { k, n: self.rank() })
        } else {
            Ok(())
        }
    }

    fn coeff_poly(&self, c: &Coefficient) -> LaurentPoly {
        c.to_poly(&self.ring, self.rank())
    }

    /// The exchange polynomial `theta_k(u_{k;>0}, u_{k;<0})` in the current cluster.
    pub fn exchange_polynomial(&self, k: usize) -> Result<LaurentPoly, ClusterError> {
        self.check_direction(k)?;
        let n = self.rank();
        let dk = self.matrix.d[k];
        let mut u_pos = LaurentPoly::one(&self.ring);
        let mut u_neg = LaurentPoly::one(&self.ring);
        for l in 0..n {
            let beta = self.matrix.beta(k, l)?;
            if beta > 0 {
                u_pos = &u_pos * &self.cluster[l].pow(beta as u32);
            } else if beta < 0 {
                u_neg = &u_neg * &self.cluster[l].pow((-beta) as u32);
            }
        }
        let mut pos_pows = vec![LaurentPoly::one(&self.ring)];
        let mut neg_pows = vec![LaurentPoly::one(&self.ring)];
        for j in 1..=dk as usize {
            pos_pows.push(&pos_pows[j - 1] * &u_pos);
            neg_pows.push(&neg_pows[j - 1] * &u_neg);
        }
        let mut theta = LaurentPoly::zero(&self.ring);
        for (l, c) in self.coeffs[k].iter().enumerate() {
            if c.scalar.is_zero() {
                continue;
            }
            let term = &(&self.coeff_poly(c) * &pos_pows[l]) * &neg_pows[dk as usize - l];
            theta = &theta + &term;
        }
        Ok(theta)
    }

    /// Number of lattice points in the exponent box of `theta_k` expanded in
    /// the initial variables; an upper bound on its term count.
    pub fn exchange_extent(&self, k: usize) -> Result<f64, ClusterError> {
        self.check_direction(k)?;
        let nv = self.ring.nvars();
        let boxes: Vec<(Vec<i64>, Vec<i64>)> = self
            .cluster
            .iter()
            .map(|x| {
                let lo = x.min_exponents().0.iter().map(|&e| e as i64).collect();
                let hi = x.max_exponents().0.iter().map(|&e| e as i64).collect();
                (lo, hi)
            })
            .collect();
        let dk = self.matrix.d[k] as i64;
        let mut pos = (vec![0i64; nv], vec![0i64; nv]);
        let mut neg = (vec![0i64; nv], vec![0i64; nv]);
        for (l, (lo, hi)) in boxes.iter().enumerate() {
            let beta = self.matrix.beta(k, l)?;
            let target = if beta > 0 { &mut pos } else { &mut neg };
            for v in 0..nv {
                target.0[v] += beta.abs() * lo[v];
                target.1[v] += beta.abs() * hi[v];
            }
        }
        let mut volume = 1.0;
        for v in 0..nv {
            let (mut lo, mut hi) = (i64::MAX, i64::MIN);
            for l in 0..=dk {
                lo = lo.min(l * pos.0[v] + (dk - l) * neg.0[v]);
                hi = hi.max(l * pos.1[v] + (dk - l) * neg.1[v]);
            }
            volume *= (hi - lo + 1) as f64;
        }
        Ok(volume)
    }

    /// Tracked-mode coefficient update for direction `k` with exponent row `beta`.
    fn mutate_coefficients(&self, k: usize, beta: &[i64]) -> Result<Vec<Vec<Coefficient>>, ClusterError> {
        let mut out = self.coeffs.clone();
        if self.mode == CoefficientMode::Fixed {
            return Ok(out);
        }
        let pk = &self.coeffs[k];
        let dk = pk.len() - 1;
        for i in 0..self.rank() {
            if i == k || beta[i] == 0 {
                continue;
            }
            let base = if beta[i] > 0 { &pk[0] } else { &pk[dk] };
            let f = base.powi(beta[i])?;
            let di = out[i].len() - 1;
            for (j, c) in out[i].iter_mut().enumerate() {
                if c.scalar.is_zero() {
                    continue;
                }
                *c = c.mul(&f.powi((di - j) as i64)?);
            }
            normalize_tuple(&mut out[i]);
        }
        out[k].reverse();
        Ok(out)
    }

    /// Generalized mutation `x_k x'_k = theta_k(u_{k;>0}, u_{k;<0})`.
    pub fn generalized_mutate(&self, k: usize) -> Result<GenSeed, ClusterError> {
        self.check_direction(k)?;
        self.matrix.check_divisibility()?;
        if !self.matrix.all_binomial() {
            self.matrix.check_symmetrized_by_d()?;
        }
        let theta = self.exchange_polynomial(k)?;
        let new_x = theta
            .exact_divide(&self.cluster[k])
            .map_err(|source| ClusterError::Laurent { k, source })?;
        let beta: Vec<i64> = (0..self.rank())
            .map(|i| self.matrix.beta(k, i))
            .collect::<Result<_, _>>()?;
        let coeffs = self.mutate_coefficients(k, &beta)?;
        let mut cluster = self.cluster.clone();
        cluster[k] = new_x;
        Ok(GenSeed {
            ring: self.ring.clone(),
            cluster,
            coeffs,
            matrix: self.matrix.mutate(k),
            mode: self.mode,
        })
    }

    /// Binomial mutation
    /// `x'_k = (p+ prod_{b_jk>0} x_j^{b_jk} + p- prod_{b_jk<0} x_j^{-b_jk}) / x_k`
    /// with `(p+, p-) = (p_{k;0}, p_{k;1})`.
    pub fn standard_mutate(&self, k: usize) -> Result<GenSeed, ClusterError> {
        self.check_direction(k)?;
        if !self.matrix.all_binomial() {
            return Err(ClusterError::NotBinomial);
        }
        let mut pos = self.coeff_poly(&self.coeffs[k][0]);
        let mut neg = self.coeff_poly(&self.coeffs[k][1]);
        for j in 0..self.rank() {
            let b = self.matrix.get(j, k);
            if b > 0 {
                pos = &pos * &self.cluster[j].pow(b as u32);
            } else if b < 0 {
                neg = &neg * &self.cluster[j].pow((-b) as u32);
            }
        }
        let new_x = (&pos + &neg)
            .exact_divide(&self.cluster[k])
            .map_err(|source| ClusterError::Laurent { k, source })?;
        let beta: Vec<i64> = (0..self.rank()).map(|i| self.matrix.get(k, i)).collect();
        let coeffs = self.mutate_coefficients(k, &beta)?;
        let mut cluster = self.cluster.clone();
        cluster[k] = new_x;
        Ok(GenSeed {
            ring: self.ring.clone(),
            cluster,
            coeffs,
            matrix: self.matrix.mutate(k),
            mode: self.mode,
        })
    }

    /// Standard mutation when every `d_i = 1`, generalized otherwise.
    pub fn mutate(&self, k: usize) -> Result<GenSeed, ClusterError> {
        if self.matrix.all_binomial() {
            self.standard_mutate(k)
        } else {
            self.generalized_mutate(k)
        }
    }

    /// Canonical text used for deduplication and equality reports.
    pub fn canonical_key(&self) -> String {
        let cl: Vec<String> = self.cluster.iter().map(|x| x.to_string()).collect();
        let co: Vec<String> = self
            .coeffs
            .iter()
            .map(|t| {
                let parts: Vec<String> = t.iter().map(|c| self.coeff_poly(c).to_string()).collect();
                parts.join(", ")
            })
            .collect();
        format!("[{}] [{}] {}", cl.join("; "), co.join("; "), self.matrix)
    }

    /// Coefficient tuple `i` as polynomials in the seed ring.
    pub fn coefficient_polys(&self, i: usize) -> Vec<LaurentPoly> {
        self.coeffs[i].iter().map(|c| self.coeff_poly(c)).collect()
    }
}

/// Failure of a mutation sequence, with the seeds reached before it.
#[derive(Debug, thiserror::Error)]
#[error("mutation {step} (direction {k}) failed: {error}")]
pub struct SequenceError {
    pub step: usize,
    pub k: usize,
    pub error: ClusterError,
    pub prefix: Vec<GenSeed>,
}

/// Applies [`GenSeed::mutate`] along `dirs`; the result starts with `seed`.
pub fn mutation_sequence(seed: &GenSeed, dirs: &[usize]) -> Result<Vec<GenSeed>, Box<SequenceError>> {
    let mut out = vec![seed.clone()];
    for (step, &k) in dirs.iter().enumerate() {
        let last = out.last().expect("nonempty");
        match last.mutate(k) {
            Ok(s) => out.push(s),
            Err(error) => {
                return Err(Box::new(SequenceError {
                    step,
                    k,
                    error,
                    prefix: out,
                }))
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::CyclotomicField;

    #[test]
    fn matrix_mutation_examples() {
        let b = ExchangeMatrix::new(vec![vec![0, 2], vec![-1, 0]], vec![2, 1]).unwrap();
        assert_eq!(b.mutate(0).rows(), vec![vec![0, -2], vec![1, 0]]);
        let a3 = ExchangeMatrix::new(vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]], vec![1, 1, 1]).unwrap();
        assert_eq!(a3.mutate(1).rows(), vec![vec![0, -1, 1], vec![1, 0, -1], vec![-1, 1, 0]]);
        assert_eq!(a3.mutate(1).mutate(1), a3);
    }

    #[test]
    fn symmetrizers() {
        let b = ExchangeMatrix::new(vec![vec![0, 4], vec![-1, 0]], vec![1, 1]).unwrap();
        assert_eq!(b.symmetrizer(), Some(vec![4, 1]));
        assert!(b.check_symmetrized_by_d().is_err());
        assert!(ExchangeMatrix::new(vec![vec![0, 1], vec![1, 0]], vec![1, 1]).is_err());
        assert!(matches!(
            ExchangeMatrix::new(vec![vec![0, 3], vec![-1, 0]], vec![2, 1]),
            Err(ClusterError::MalformedExchange { .. })
        ));
    }

    #[test]
    fn corrupted_beta_is_a_precondition_error() {
        let field = CyclotomicField::new(1);
        let ring = PolyRing::new(field.clone(), ["x", "y"]);
        let b = ExchangeMatrix::new_unchecked(vec![vec![0, 3], vec![-1, 0]], vec![2, 1]).unwrap();
        let one = Coefficient::scalar(field.one(), 0);
        let seed = GenSeed::new(ring, b, vec![vec![one.clone(); 3], vec![one; 2]], CoefficientMode::Fixed).unwrap();
        assert!(matches!(seed.mutate(0), Err(ClusterError::MalformedExchange { .. })));
    }

    #[test]
    fn simple_exchange() {
        let field = CyclotomicField::new(1);
        let ring = PolyRing::new(field.clone(), ["x", "y"]);
        let b = ExchangeMatrix::new(vec![vec![0, 1], vec![-1, 0]], vec![1, 1]).unwrap();
        let one = Coefficient::scalar(field.one(), 0);
        let seed = GenSeed::new(ring.clone(), b, vec![vec![one.clone(); 2]; 2], CoefficientMode::Fixed).unwrap();
        let s1 = seed.standard_mutate(0).unwrap();
        assert_eq!(s1.cluster()[0], LaurentPoly::parse(&ring, "(1 + y)/x").unwrap());
        assert_eq!(s1.generalized_mutate(0).unwrap().cluster()[0], seed.cluster()[0]);
    }
}
