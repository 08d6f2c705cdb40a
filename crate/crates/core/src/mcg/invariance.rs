use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cluster::ExchangeMatrix;
use crate::fatgraph::{matrix_rank, Spine};
use crate::geodesics::{evaluate_word, PathWord};

use super::{apply_move, transport_path, Move, MoveKind, MoveRecord};

#[derive(Debug, Clone, Serialize)]
pub struct WordCheck {
    pub before: String,
    pub after: Option<String>,
    /// Largest `|G - G'| / max(|G|, 1)` over the shear samples.
    pub max_rel_err: f64,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    #[serde(rename = "move")]
    pub mv: Move,
    pub samples: usize,
    pub words: Vec<WordCheck>,
    /// `None` for spiral inversions, which leave the matrix alone.
    pub poisson_compatible: Option<bool>,
    /// A loop edge sits next to the flipped edge before or after the flip.
    pub self_folded: bool,
    /// Largest entry of `J B J^T - B'` at the spine's shears.
    pub bracket_residual: f64,
    pub center_dim_before: usize,
    pub center_dim_after: usize,
    pub pass: bool,
}

/// Poisson matrix with the rows of pending edges doubled, so that row `k`
/// is divisible by the degree `d_k = 2` of its exchange polynomial.
pub fn exchange_matrix(spine: &Spine) -> ExchangeMatrix {
    let mut b = spine.poisson_matrix();
    let mut d = vec![1; b.len()];
    for e in spine.pending_edges() {
        d[e] = 2;
        b[e].iter_mut().for_each(|x| *x *= 2);
    }
    ExchangeMatrix::new_unchecked(b, d).expect("square")
}

/// Whether the exchange matrix after a flip is the mutation of the one
/// before at the flipped edge.
pub fn poisson_compatible(record: &MoveRecord) -> Option<bool> {
    if record.mv.kind == MoveKind::InvertSpiral {
        return None;
    }
    let k = record.before.index_of_label(record.mv.target).ok()?;
    Some(exchange_matrix(&record.before).mutate(k) == exchange_matrix(&record.after))
}

fn has_loop_next_to(spine: &Spine, label: u32) -> bool {
    let Ok(e) = spine.index_of_label(label) else {
        return false;
    };
    spine.edges()[e].halves.iter().filter(|&&h| !spine.is_terminal(h)).any(|&h| {
        [spine.next(h), spine.next(spine.next(h))].iter().any(|&x| {
            let [a, b] = spine.edges()[spine.edge(x)].halves;
            spine.edge(x) != e && spine.vertex(a) == spine.vertex(b)
        })
    })
}

/// Whether an inner flip sits next to a self-folded configuration, where
/// the Poisson matrix does not follow matrix mutation.
pub fn is_self_folded(record: &MoveRecord) -> bool {
    record.mv.kind == MoveKind::InnerFlip
        && (has_loop_next_to(&record.before, record.mv.target) || has_loop_next_to(&record.after, record.mv.target))
}

/// Largest entry of `J B J^T - B'`, with `J` the Jacobian of the shear update
/// by central differences at the spine's shears.
pub fn bracket_residual(spine: &Spine, mv: Move) -> Result<f64, super::MoveError> {
    let n = spine.edges().len();
    let z0 = spine.shears();
    let h = 1e-6;
    let image = |z: &[f64]| apply_move(&spine.with_shears(z), mv).map(|r| r.after.shears());
    let mut jac = vec![vec![0.0; n]; n];
    for c in 0..n {
        let (mut up, mut down) = (z0.clone(), z0.clone());
        up[c] += h;
        down[c] -= h;
        let (a, b) = (image(&up)?, image(&down)?);
        for r in 0..n {
            jac[r][c] = (a[r] - b[r]) / (2.0 * h);
        }
    }
    let b0 = spine.poisson_matrix();
    let b1 = apply_move(spine, mv)?.after.poisson_matrix();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            let mut v = 0.0;
            for a in 0..n {
                for b in 0..n {
                    v += jac[r][a] * b0[a][b] as f64 * jac[c][b];
                }
            }
            worst = worst.max((v - b1[r][c] as f64).abs());
        }
    }
    Ok(worst)
}

/// Residual below which the bracket counts as preserved; central
/// differences at step `1e-6` are good to about `1e-8`.
pub const BRACKET_TOL: f64 = 1e-5;

fn center_dim(spine: &Spine) -> usize {
    spine.edges().len() - matrix_rank(&spine.poisson_matrix())
}

/// Applies `mv` at the spine's own shears and at `samples` uniform draws
/// from `[-2, 2]^E`, comparing the trace of every word with the trace of
/// its transport.
pub fn check_move_invariance<R: Rng + ?Sized>(
    rng: &mut R,
    spine: &Spine,
    words: &[PathWord],
    mv: Move,
    samples: usize,
    tol: f64,
) -> Result<InvarianceReport, super::MoveError> {
    let record = apply_move(spine, mv)?;
    let mut shear_sets = vec![spine.shears()];
    for _ in 0..samples {
        shear_sets.push((0..spine.edges().len()).map(|_| rng.gen_range(-2.0..2.0)).collect());
    }
    let records: Vec<MoveRecord> = shear_sets
        .iter()
        .map(|z| apply_move(&spine.with_shears(z), mv))
        .collect::<Result<_, _>>()?;
    let words: Vec<WordCheck> = words
        .par_iter()
        .map(|w| {
            let fail = |after: Option<String>, e: String| WordCheck {
                before: w.to_string(),
                after,
                max_rel_err: f64::INFINITY,
                pass: false,
                error: Some(e),
            };
            let moved = match transport_path(w, &record) {
                Ok(m) => m,
                Err(e) => return fail(None, e.to_string()),
            };
            let mut worst = 0.0f64;
            for r in &records {
                let g = evaluate_word(w, &r.before).map(|m| m.trace());
                let h = evaluate_word(&moved, &r.after).map(|m| m.trace());
                match (g, h) {
                    (Ok(g), Ok(h)) => worst = worst.max((g - h).abs() / g.abs().max(1.0)),
                    (Err(e), _) | (_, Err(e)) => return fail(Some(moved.to_string()), e.to_string()),
                }
            }
            WordCheck {
                before: w.to_string(),
                after: Some(moved.to_string()),
                max_rel_err: worst,
                pass: worst < tol,
                error: None,
            }
        })
        .collect();
    let poisson = poisson_compatible(&record);
    let self_folded = is_self_folded(&record);
    let bracket = bracket_residual(spine, mv)?;
    let (cb, ca) = (center_dim(&record.before), center_dim(&record.after));
    let pass = words.iter().all(|w| w.pass)
        && (poisson != Some(false) || self_folded)
        && bracket < BRACKET_TOL
        && cb == ca;
    Ok(InvarianceReport {
        mv,
        samples: records.len(),
        words,
        poisson_compatible: poisson,
        self_folded,
        bracket_residual: bracket,
        center_dim_before: cb,
        center_dim_after: ca,
        pass,
    })
}
