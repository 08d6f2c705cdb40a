use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::{ClusterError, Coefficient, CoefficientMode, ExchangeMatrix, GenSeed};
use crate::laurent::{LaurentPoly, PolyRing};
use crate::ring::CyclotomicField;

#[derive(Debug, Clone, Serialize)]
pub struct LaurentFailure {
    pub step: usize,
    pub direction: usize,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LaurentReport {
    pub directions: Vec<usize>,
    pub steps_completed: usize,
    pub laurent: bool,
    pub failure: Option<LaurentFailure>,
    /// Step at which an expansion budget stopped the run.
    pub truncated: Option<usize>,
    pub max_terms: usize,
    pub max_height: String,
}

/// Mutates along `dirs`, recording term counts and coefficient heights.
///
/// An inexact division is reported in the payload; malformed input
/// (bad direction, broken divisibility) is an error.
pub fn check_laurent(seed: &GenSeed, dirs: &[usize]) -> Result<LaurentReport, ClusterError> {
    check_laurent_bounded(seed, dirs, f64::INFINITY)
}

/// As [`check_laurent`], but stops before any mutation whose exchange
/// polynomial has an exponent box larger than `max_extent` (see
/// [`GenSeed::exchange_extent`]); `truncated` then records the step.
pub fn check_laurent_bounded(seed: &GenSeed, dirs: &[usize], max_extent: f64) -> Result<LaurentReport, ClusterError> {
    let mut current = seed.clone();
    let mut max_terms = seed.cluster().iter().map(LaurentPoly::nterms).max().unwrap_or(0);
    let mut max_height = BigInt::zero();
    for (step, &k) in dirs.iter().enumerate() {
        if current.exchange_extent(k)? > max_extent {
            return Ok(LaurentReport {
                directions: dirs.to_vec(),
                steps_completed: step,
                laurent: true,
                failure: None,
                truncated: Some(step),
                max_terms,
                max_height: max_height.to_string(),
            });
        }
        match current.mutate(k) {
            Ok(next) => {
                let x = &next.cluster()[k];
                max_terms = max_terms.max(x.nterms());
                max_height = max_height.max(x.height());
                current = next;
            }
            Err(ClusterError::Laurent { k, source }) => {
                return Ok(LaurentReport {
                    directions: dirs.to_vec(),
                    steps_completed: step,
                    laurent: false,
                    failure: Some(LaurentFailure {
                        step,
                        direction: k,
                        message: source.to_string(),
                    }),
                    truncated: None,
                    max_terms,
                    max_height: max_height.to_string(),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(LaurentReport {
        directions: dirs.to_vec(),
        steps_completed: dirs.len(),
        laurent: true,
        failure: None,
        truncated: None,
        max_terms,
        max_height: max_height.to_string(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FiniteTypeReport {
    /// `Some(true)` when the exchange graph closed within the bounds,
    /// `None` when a bound was hit first.
    pub finite: Option<bool>,
    pub variable_count: usize,
    pub seeds_visited: usize,
    pub depth_reached: usize,
    pub variables: Vec<String>,
}

/// Breadth-first exploration of the labeled exchange graph.
///
/// Counts distinct cluster variables, the initial ones included.
pub fn finite_type_probe(
    seed: &GenSeed,
    max_variables: usize,
    max_depth: usize,
) -> Result<FiniteTypeReport, ClusterError> {
    if seed.mode() != CoefficientMode::Fixed {
        return Err(ClusterError::RequiresFixedMode);
    }
    let n = seed.rank();
    let mut seen: HashSet<String> = HashSet::new();
    let mut variables: Vec<String> = Vec::new();
    let add_vars = |s: &GenSeed, variables: &mut Vec<String>| {
        for x in s.cluster() {
            let key = x.to_string();
            if !variables.contains(&key) {
                variables.push(key);
            }
        }
    };
    seen.insert(seed.canonical_key());
    add_vars(seed, &mut variables);
    // Frontier entries remember the direction they came from; mutating back
    // along it only revisits the parent.
    let mut frontier: Vec<(GenSeed, Option<usize>)> = vec![(seed.clone(), None)];
    let mut depth = 0;
    while !frontier.is_empty() {
        if depth >= max_depth || variables.len() > max_variables {
            return Ok(FiniteTypeReport {
                finite: None,
                variable_count: variables.len(),
                seeds_visited: seen.len(),
                depth_reached: depth,
                variables,
            });
        }
        let children: Vec<(GenSeed, usize)> = frontier
            .par_iter()
            .flat_map_iter(|(s, from)| {
                (0..n)
                    .filter(move |k| Some(*k) != *from)
                    .map(move |k| s.mutate(k).map(|c| (c, k)))
            })
            .collect::<Result<_, _>>()?;
        let mut next = Vec::new();
        for (child, k) in children {
            if seen.insert(child.canonical_key()) {
                add_vars(&child, &mut variables);
                next.push((child, Some(k)));
            }
        }
        frontier = next;
        depth += 1;
    }
    Ok(FiniteTypeReport {
        finite: Some(true),
        variable_count: variables.len(),
        seeds_visited: seen.len(),
        depth_reached: depth,
        variables,
    })
}

/// Rank-2 seed with reciprocal tuple `(1, w_p, 1)` in the degree-2
/// directions and `(1, 1)` in degree-1 ones.
///
/// `d` is `(2, 1)` (matrix `[[0,2],[-1,0]]`) or `(2, 2)` (`[[0,2],[-2,0]]`).
pub fn geometric_rank2_seed(p: u32, d: (u32, u32)) -> Result<GenSeed, ClusterError> {
    let field = CyclotomicField::for_orders(&[p])?;
    let w = field.omega(p)?;
    let ring = PolyRing::new(field.clone(), ["x", "y"]);
    let matrix = ExchangeMatrix::new(vec![vec![0, d.0 as i64], vec![-(d.1 as i64), 0]], vec![d.0, d.1])?;
    let tuple = |deg: u32| -> Vec<Coefficient> {
        match deg {
            1 => vec![Coefficient::scalar(field.one(), 0); 2],
            _ => {
                let mut t = vec![Coefficient::scalar(field.one(), 0); deg as usize + 1];
                for c in &mut t[1..deg as usize] {
                    *c = Coefficient::scalar(w.clone(), 0);
                }
                t
            }
        }
    };
    GenSeed::new(ring, matrix, vec![tuple(d.0), tuple(d.1)], CoefficientMode::Fixed)
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityFinding {
    pub directions: Vec<usize>,
    pub variable: String,
    pub monomial: String,
    pub coefficient: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivitySearchReport {
    pub p: u32,
    pub d: (u32, u32),
    pub depth: usize,
    pub variables_checked: usize,
    pub all_embed_positive: bool,
    /// Report only: whether every coefficient is a nonnegative integer
    /// combination of `w`-monomials.
    pub all_integer_cone: bool,
    /// Coefficients that are not positive under the real embedding.
    pub counterexamples: Vec<PositivityFinding>,
}

/// Explores every mutation sequence up to `depth` (in rank 2 these are the
/// two alternating ones) and reports the sign of every coefficient.
pub fn positivity_search(seed: &GenSeed, depth: usize) -> Result<PositivitySearchReport, ClusterError> {
    let n = seed.rank();
    let mut reached: HashMap<String, (Vec<usize>, LaurentPoly)> = HashMap::new();
    let mut frontier: Vec<(GenSeed, Vec<usize>)> = vec![(seed.clone(), Vec::new())];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (s, path) in &frontier {
            for k in 0..n {
                if path.last() == Some(&k) {
                    continue;
                }
                let child = s.mutate(k)?;
                let mut p = path.clone();
                p.push(k);
                let x = child.cluster()[k].clone();
                reached.entry(x.to_string()).or_insert((p.clone(), x));
                next.push((child, p));
            }
        }
        frontier = next;
    }
    let mut keys: Vec<&String> = reached.keys().collect();
    keys.sort();
    let mut all_embed_positive = true;
    let mut all_integer_cone = true;
    let mut counterexamples = Vec::new();
    for key in keys {
        let (path, x) = &reached[key];
        let report = x.positivity_report();
        all_embed_positive &= report.all_embed_positive;
        all_integer_cone &= report.all_integer_cone;
        for t in report.terms.iter().filter(|t| !t.embed_positive) {
            counterexamples.push(PositivityFinding {
                directions: path.clone(),
                variable: key.clone(),
                monomial: t.monomial.clone(),
                coefficient: t.coefficient.clone(),
                value: t.value,
            });
        }
    }
    let d = seed.matrix().d();
    let p = seed.ring().field().orders().first().copied().unwrap_or(0);
    Ok(PositivitySearchReport {
        p,
        d: (d[0], d.get(1).copied().unwrap_or(0)),
        depth,
        variables_checked: reached.len(),
        all_embed_positive,
        all_integer_cone,
        counterexamples,
    })
}
