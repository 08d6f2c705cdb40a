//! Closed paths on spines and their geodesic functions.
//!
//! A path alternates edge crossings with connectors: a right or left turn
//! at a trivalent vertex, or a rotation by `k` around an orbifold point
//! between two crossings of the same pending edge. Its matrix is the
//! ordered product `X_Z` per crossing, `R` or `L` per turn and
//! `(-1)^{k+1} F_p^k` per rotation.

mod matrix;
mod pgon;
mod word;

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::fatgraph::Spine;
use crate::laurent::{LaurentPoly, Monomial, PolyRing, PositivityReport};
use crate::ring::CyclotomicField;

pub use matrix::{fp_power_is_scalar, Mat2, SymMat2};
pub use pgon::{
    pgon_shear_data, pgon_sweep, phi_for_shear, unrolled_rotation,     verify_pgon_identities, PgonIdentity, PgonReport, PgonShears,
};
pub use word::{Conn, PathWord, Route, Step, Token, WordError};

/// Numeric generator for one token.
pub fn generator(token: &Token, spine: &Spine) -> Result<Mat2, WordError> {
    Ok(match *token {
        Token::Edge(label) => Mat2::x(spine.edges()[spine.index_of_label(label)?].z),
        Token::R => Mat2::r(),
        Token::L => Mat2::l(),
        Token::Rotate { edge, k } => {
            let e = spine.index_of_label(edge)?;
            let p = spine.pending_order(e).ok_or(WordError::RotateAtInnerEdge(edge))?;
            if k == 0 || k >= p {
                return Err(WordError::Winding { edge, k, p });
            }
            Mat2::rotate(p, k)
        }
    })
}

pub fn evaluate_word(word: &PathWord, spine: &Spine) -> Result<Mat2, WordError> {
    word.realize(spine)?;
    word.tokens
        .iter()
        .try_fold(Mat2::identity(), |acc, t| Ok(acc.mul(&generator(t, spine)?)))
}

/// Evaluates a closed word with every `X_Z F_p^k X_Z` around an orbifold
/// point replaced by its rotation-free chain from the covering polygon.
pub fn evaluate_word_unrolled(word: &PathWord, spine: &Spine) -> Result<Mat2, WordError> {
    word.realize(spine)?;
    // Start right after a turn so no rotation straddles the ends.
    let t = &word.tokens;
    let start = (0..t.len())
        .find(|&i| matches!(t[i], Token::Edge(_)) && (i == 0 || !matches!(t[i - 1], Token::Rotate { .. })))
        .unwrap_or(0);
    let mut tokens = t.clone();
    tokens.rotate_left(start);
    let mut acc = Mat2::identity();
    let mut i = 0;
    while i < tokens.len() {
        if let (Token::Edge(label), Some(Token::Rotate { k, .. })) = (tokens[i], tokens.get(i + 1)) {
            let e = spine.index_of_label(label)?;
            let p = spine.pending_order(e).ok_or(WordError::RotateAtInnerEdge(label))?;
            acc = acc.mul(&unrolled_rotation(p, *k, spine.edges()[e].z));
            i += 3;
            continue;
        }
        acc = acc.mul(&generator(&tokens[i], spine)?);
        i += 1;
    }
    Ok(acc)
}

/// Polynomial ring in `l<label> = e^{Z/2}` over a field containing every
/// `w_p` of the spine's orbifold points.
pub fn lambda_ring(spine: &Spine) -> Arc<PolyRing> {
    let mut orders: Vec<u32> = spine.pending_edges().iter().filter_map(|&e| spine.pending_order(e)).collect();
    orders.sort_unstable();
    orders.dedup();
    let field = CyclotomicField::for_orders(&orders).expect("orders are at least 2");
    PolyRing::new(field, spine.edges().iter().map(|e| format!("l{}", e.label)))
}

pub fn evaluate_word_symbolic(word: &PathWord, spine: &Spine, ring: &Arc<PolyRing>) -> Result<SymMat2, WordError> {
    word.realize(spine)?;
    let mut acc = SymMat2::identity(ring);
    for t in &word.tokens {
        let g = match *t {
            Token::Edge(label) => SymMat2::x(ring, spine.index_of_label(label)?),
            Token::R => SymMat2::r(ring),
            Token::L => SymMat2::l(ring),
            Token::Rotate { edge, k } => {
                let e = spine.index_of_label(edge)?;
                let p = spine.pending_order(e).ok_or(WordError::RotateAtInnerEdge(edge))?;
                SymMat2::rotate(ring, p, k)?
            }
        };
        acc = acc.mul(&g);
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Hyperbolicity {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeodesicValue {
    pub trace: f64,
    /// `2 arccosh(G / 2)` when `G >= 2`.
    pub length: Option<f64>,
    pub kind: Hyperbolicity,
}

/// `|G - 2|` below this counts as parabolic.
pub const PARABOLIC_TOL: f64 = 1e-9;

pub fn classify(trace: f64) -> Hyperbolicity {
    let g = trace.abs();
    if (g - 2.0).abs() < PARABOLIC_TOL {
        Hyperbolicity::Parabolic
    } else if g < 2.0 {
        Hyperbolicity::Elliptic
    } else {
        Hyperbolicity::Hyperbolic
    }
}

pub fn geodesic_function(word: &PathWord, spine: &Spine) -> Result<GeodesicValue, WordError> {
    if !word.closed {
        return Err(WordError::Open);
    }
    let trace = evaluate_word(word, spine)?.trace();
    Ok(GeodesicValue {
        trace,
        length: (trace >= 2.0).then(|| 2.0 * (trace / 2.0).max(1.0).acosh()),
        kind: classify(trace),
    })
}

#[derive(Debug, Clone)]
pub struct SymbolicGeodesic {
    pub trace: LaurentPoly,
    pub positivity: PositivityReport,
    /// `e^{+-sum Z / 2}` over the crossings of the word both occur with
    /// coefficient one.
    pub has_extreme_terms: bool,
}

pub fn geodesic_function_symbolic(
    word: &PathWord,
    spine: &Spine,
    ring: &Arc<PolyRing>,
) -> Result<SymbolicGeodesic, WordError> {
    if !word.closed {
        return Err(WordError::Open);
    }
    let trace = evaluate_word_symbolic(word, spine, ring)?.trace();
    let mut exps = vec![0i32; ring.nvars()];
    for t in &word.tokens {
        if let Token::Edge(label) = t {
            exps[spine.index_of_label(*label)?] += 1;
        }
    }
    let top = Monomial(exps.clone());
    let bottom = Monomial(exps.iter().map(|e| -e).collect());
    let has_extreme_terms = [top, bottom]
        .iter()
        .all(|m| trace.coefficient(m).is_some_and(|c| c.is_one()));
    Ok(SymbolicGeodesic {
        positivity: trace.positivity_report(),
        trace,
        has_extreme_terms,
    })
}

/// Random closed route of at least `min_len` crossings. Rotation-free
/// routes never enter pending edges.
pub fn random_closed_route<R: Rng + ?Sized>(
    rng: &mut R,
    spine: &Spine,
    min_len: usize,
    rotations: bool,
) -> Option<Route> {
    let allowed = |h: usize| rotations || spine.pending_order(spine.edge(h)).is_none();
    let starts: Vec<usize> = (0..spine.n_halves())
        .filter(|&h| allowed(h) && !spine.is_terminal(h))
        .collect();
    if starts.is_empty() {
        return None;
    }
    for _ in 0..64 {
        let start = starts[rng.gen_range(0..starts.len())];
        let mut steps: Vec<Step> = Vec::new();
        let mut h = start;
        let mut stuck = false;
        while steps.len() < min_len {
            let options = word::connectors(spine, h);
            let options: Vec<(Conn, usize)> = options.into_iter().filter(|&(_, n)| allowed(n)).collect();
            if options.is_empty() {
                stuck = true;
                break;
            }
            let (c, n) = options[rng.gen_range(0..options.len())];
            steps.push(Step { half: h, after: c });
            h = n;
        }
        if stuck {
            continue;
        }
        // Close up along a shortest continuation back to `start`.
        let Some(tail) = word::shortest_continuation(spine, h, start, &allowed) else {
            continue;
        };
        steps.extend(tail);
        return Some(Route { steps, closed: true });
    }
    None
}

pub fn random_closed_word<R: Rng + ?Sized>(
    rng: &mut R,
    spine: &Spine,
    min_len: usize,
    rotations: bool,
) -> Option<PathWord> {
    random_closed_route(rng, spine, min_len, rotations).map(|r| r.to_word(spine))
}

/// The boundary walk of face `f` as a closed word. Going around an orbifold
/// point on the hole side is a rotation by `p - 1`; with it every factor
/// `X_Z R` stays lower triangular and the trace is `2 cosh(P / 2)` for the
/// perimeter `P` (pending edges counted twice).
pub fn face_word(spine: &Spine, f: usize) -> PathWord {
    let walk = &spine.boundary_walks()[f];
    let mut steps: Vec<Step> = Vec::new();
    for &h in walk {
        if spine.is_terminal(h) {
            // Leaving the orbifold point: the rotation was recorded on the way in.
            continue;
        }
        let order = spine.pending_order(spine.edge(h));
        let after = order.map_or(Conn::R, |p| Conn::Rotate(p - 1));
        steps.push(Step { half: h, after });
        if order.is_some() {
            steps.push(Step {
                half: spine.twin(h),
                after: Conn::R,
            });
        }
    }
    Route { steps, closed: true }.to_word(spine)
}
