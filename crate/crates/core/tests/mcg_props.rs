use std::f64::consts::PI;

use orbiteich::fatgraph::library;
use orbiteich::fatgraph::random::random_spine;
use orbiteich::fatgraph::{Spine, Vertex};
use orbiteich::geodesics::{evaluate_word, random_closed_word, Mat2, PathWord, Token};
use orbiteich::mcg::{
    apply_move, available_moves, check_move_invariance, flip_inner, flip_pending, invert_spiral, pending_flip_via_hole,
    bracket_residual, is_self_folded, poisson_compatible, transport_path, Move, MoveKind, BRACKET_TOL,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn shear(s: &Spine, label: u32) -> f64 {
    s.edges()[s.index_of_label(label).unwrap()].z
}

fn randomized<R: Rng>(rng: &mut R, s: &Spine) -> Spine {
    let z: Vec<f64> = (0..s.edges().len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
    s.with_shears(&z)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn inner_flip_at_zero() {
    // Edge 4 of the two-holed torus has four distinct neighbours.
    let s = library::torus_two_holes();
    let rec = flip_inner(&s, 4).unwrap();
    let mut d: Vec<f64> = rec.updates.iter().map(|u| u.after - u.before).collect();
    d.sort_by(f64::total_cmp);
    let l2 = 2f64.ln();
    assert!(max_diff(&d, &[-l2, -l2, l2, l2]) < 1e-15, "{d:?}");
    assert!(rec.after.validate().valid);
}

#[test]
fn inner_flip_with_coinciding_neighbours() {
    // On the theta graph A = D and B = C, so both gain Z.
    let s = library::theta().with_shears(&[1.0, 0.25, -0.5]);
    let rec = flip_inner(&s, 1).unwrap();
    assert!(max_diff(&rec.after.shears(), &[-1.0, 1.25, 0.5]) < 1e-15);
}

/// Cyclic edge sequences at the vertices, up to rotation and order.
fn shape(s: &Spine) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = s
        .vertices()
        .iter()
        .map(|v| match v {
            Vertex::Trivalent(hs) => {
                let e: Vec<usize> = hs.iter().map(|&h| s.edge(h)).collect();
                (0..3).map(|i| [e[i], e[(i + 1) % 3], e[(i + 2) % 3]].to_vec()).min().unwrap()
            }
            Vertex::Pending { half, order } => vec![s.edge(*half), 1000 + *order as usize],
        })
        .collect();
    out.sort();
    out
}

#[test]
fn torus_flip_keeps_the_boundary_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let s = randomized(&mut rng, &library::torus_with_hole());
        for label in 1..=3 {
            let rec = flip_inner(&s, label).unwrap();
            let sum = |t: &Spine| 2.0 * t.shears().iter().sum::<f64>();
            assert!((sum(&s) - sum(&rec.after)).abs() < 1e-12);
        }
    }
}

#[test]
fn moves_are_involutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (name, s) in library::all() {
        for _ in 0..10 {
            let s = randomized(&mut rng, &s);
            for mv in available_moves(&s) {
                let once = apply_move(&s, mv).unwrap();
                let twice = apply_move(&once.after, once.inverse()).unwrap();
                assert!(max_diff(&s.shears(), &twice.after.shears()) < 1e-12, "{name} {mv:?}");
                assert_eq!(shape(&s), shape(&twice.after), "{name} {mv:?}");
            }
        }
    }
}

#[test]
fn pending_flip_examples() {
    let s = library::treegraph();
    for (label, p) in [(1u32, 3u32), (2, 3)] {
        let rec = flip_pending(&s, label).unwrap();
        let mut shifts: Vec<f64> = rec.updates.iter().map(|u| u.after - u.before).collect();
        shifts.sort_by(f64::total_cmp);
        assert_eq!(p, 3);
        assert!(max_diff(&shifts, &[-3f64.ln(), 3f64.ln()]) < 1e-15, "{shifts:?}");
    }
    let tri = library::tripod();
    let rec = flip_pending(&tri, 1).unwrap();
    let two: Vec<f64> = rec.updates.iter().map(|u| u.after - u.before).collect();
    assert!(two.iter().all(|d| (d.abs() - 2f64.ln()).abs() < 1e-15), "{two:?}");
}

#[test]
fn via_hole_matches_pending_flip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, s) in library::all() {
        for e in s.pending_edges() {
            let label = s.edges()[e].label;
            for _ in 0..20 {
                let s = randomized(&mut rng, &s);
                let a = flip_pending(&s, label).unwrap();
                let b = pending_flip_via_hole(&s, label).unwrap();
                assert!(max_diff(&a.after.shears(), &b.after.shears()) < 1e-12, "{name} {label}");
            }
        }
    }
}

#[test]
fn via_hole_order_six() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let s = random_spine(&mut rng, 3, &[6]);
    let e = s.pending_edges()[0];
    let label = s.edges()[e].label;
    let mut z = vec![0.0; s.edges().len()];
    z[e] = 1.0;
    let s = s.with_shears(&z);
    let rec = pending_flip_via_hole(&s, label).unwrap();
    let want = (1.0 + 3f64.sqrt() * 1f64.exp() + 2f64.exp()).ln();
    assert!(rec.updates.iter().any(|u| (u.after - u.before - want).abs() < 1e-12));
}

#[test]
fn spiral_inversion() {
    let s = library::torus_two_holes();
    let stem_of = |s: &Spine| {
        let rec = invert_spiral(s, 6).unwrap();
        rec.updates.iter().find(|u| u.label != 6).map(|u| u.label)
    };
    assert_eq!(stem_of(&s), None, "P = 0 is the identity");
    let mut z = vec![0.0; 6];
    z[5] = 2.0;
    let s = s.with_shears(&z);
    let stem = stem_of(&s).unwrap();
    let mut z = s.shears();
    z[s.index_of_label(stem).unwrap()] = 1.0;
    let s = s.with_shears(&z);
    let once = invert_spiral(&s, 6).unwrap().after;
    assert_eq!((shear(&once, stem), shear(&once, 6)), (3.0, -2.0));
    let twice = invert_spiral(&once, 6).unwrap().after;
    assert_eq!((shear(&twice, stem), shear(&twice, 6)), (1.0, 2.0));
    assert!(invert_spiral(&library::torus_with_hole(), 1).is_err());

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let (y, p) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let lhs = Mat2::product(&[Mat2::x(y), Mat2::l(), Mat2::x(p), Mat2::l(), Mat2::x(y)]);
        let rhs = Mat2::product(&[Mat2::x(y + p), Mat2::l(), Mat2::x(-p), Mat2::l(), Mat2::x(y + p)]);
        assert!(lhs.max_abs_diff(&rhs) < 1e-12 * lhs.max_abs_diff(&Mat2([[0.0; 2]; 2])).max(1.0));
    }
}

#[test]
fn words_away_from_the_edge_are_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let s = library::torus_two_holes();
    let mut seen = 0;
    for label in 1..=6 {
        let Ok(rec) = flip_inner(&s, label) else { continue };
        let [zu, zv] = s.edges()[s.index_of_label(label).unwrap()].halves;
        let near = |h: usize| [zu, zv].iter().any(|&z| s.vertex(z) == s.vertex(h) || s.vertex(z) == s.vertex(s.twin(h)));
        for _ in 0..200 {
            let w = random_closed_word(&mut rng, &s, 3, false).unwrap();
            if w.realize(&s).unwrap().steps.iter().any(|st| near(st.half)) {
                continue;
            }
            assert_eq!(transport_path(&w, &rec).unwrap(), w);
            seen += 1;
        }
    }
    assert!(seen > 0);
}

fn words_for<R: Rng>(rng: &mut R, s: &Spine, n: usize) -> Vec<PathWord> {
    let mut out = Vec::new();
    for i in 0..4 * n {
        if out.len() == n {
            break;
        }
        let len = rng.gen_range(2..10);
        if let Some(w) = random_closed_word(rng, s, len, i % 2 == 0) {
            out.push(w);
        }
    }
    out
}

#[test]
fn torus_inner_flips_preserve_geodesics() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let s = randomized(&mut rng, &library::torus_with_hole());
    let words = words_for(&mut rng, &s, 20);
    for label in 1..=3 {
        let mv = Move {
            kind: MoveKind::InnerFlip,
            target: label,
        };
        let rep = check_move_invariance(&mut rng, &s, &words, mv, 25, 1e-9).unwrap();
        for w in &rep.words {
            assert!(w.pass, "{label}: {w:?}");
        }
        assert!(rep.pass, "{rep:?}");
    }
}

#[test]
fn treegraph_moves_preserve_windings() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let s = randomized(&mut rng, &library::treegraph());
    let mut words = words_for(&mut rng, &s, 20);
    // Each orbifold point wound by k = 1 and k = 2.
    let mut wanted: Vec<(u32, u32)> = vec![(1, 1), (1, 2), (2, 1), (2, 2)];
    for _ in 0..10_000 {
        if wanted.is_empty() {
            break;
        }
        let Some(w) = random_closed_word(&mut rng, &s, 3, true) else { continue };
        let hit = wanted.iter().position(|&(e, k)| w.tokens.contains(&Token::Rotate { edge: e, k }));
        if let Some(i) = hit {
            wanted.remove(i);
            words.push(w);
        }
    }
    assert!(wanted.is_empty(), "{wanted:?}");
    for mv in available_moves(&s) {
        let rep = check_move_invariance(&mut rng, &s, &words, mv, 25, 1e-9).unwrap();
        for w in &rep.words {
            assert!(w.pass, "{mv:?}: {w:?}");
        }
        assert_eq!(rep.center_dim_before, rep.center_dim_after);
    }
}

#[test]
fn every_library_move_preserves_geodesics() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for (name, s) in library::all() {
        let s = randomized(&mut rng, &s);
        let words = words_for(&mut rng, &s, 12);
        for mv in available_moves(&s) {
            let rep = check_move_invariance(&mut rng, &s, &words, mv, 10, 1e-9).unwrap();
            for w in &rep.words {
                assert!(w.pass, "{name} {mv:?}: {w:?}");
            }
        }
    }
}

#[test]
fn self_folded_flip_breaks_matrix_mutation() {
    // Edge 2 of the dumbbell sits between two loops.
    let s = library::pants_dumbbell();
    let rec = flip_inner(&s, 2).unwrap();
    assert!(is_self_folded(&rec));
    assert!(bracket_residual(&s, rec.mv).unwrap() < BRACKET_TOL);
}

#[test]
fn inner_flips_mutate_the_poisson_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let t = 2 * rng.gen_range(1..4) + 1;
        let s = random_spine(&mut rng, t, &[3]);
        for mv in available_moves(&s) {
            let rec = apply_move(&s, mv).unwrap();
            assert!(bracket_residual(&s, mv).unwrap() < BRACKET_TOL, "{mv:?}");
            match mv.kind {
                MoveKind::InvertSpiral => assert_eq!(poisson_compatible(&rec), None),
                _ if is_self_folded(&rec) => {}
                _ => assert_eq!(poisson_compatible(&rec), Some(true), "{mv:?}"),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_spines_random_moves(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let orders: Vec<u32> = (0..rng.gen_range(0..3)).map(|_| rng.gen_range(2..6)).collect();
        let t = 2 * rng.gen_range(1..3) + orders.len() % 2;
        let s = random_spine(&mut rng, t, &orders);
        let words = words_for(&mut rng, &s, 4);
        let moves = available_moves(&s);
        prop_assume!(!moves.is_empty());
        let mv = moves[rng.gen_range(0..moves.len())];
        let rep = check_move_invariance(&mut rng, &s, &words, mv, 5, 1e-9).unwrap();
        for w in &rep.words {
            prop_assert!(w.pass, "{:?}: {:?}", mv, w);
        }
        prop_assert_eq!(rep.center_dim_before, rep.center_dim_after);
    }

    #[test]
    fn composite_moves_keep_traces(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = randomized(&mut rng, &library::treegraph());
        let words = words_for(&mut rng, &s, 4);
        let mut cur = s.clone();
        let mut moved = words.clone();
        for _ in 0..4 {
            let moves = available_moves(&cur);
            let rec = apply_move(&cur, moves[rng.gen_range(0..moves.len())]).unwrap();
            moved = moved.iter().map(|w| transport_path(w, &rec).unwrap()).collect();
            cur = rec.after;
        }
        for (w, m) in words.iter().zip(&moved) {
            let g = evaluate_word(w, &s).unwrap().trace();
            let h = evaluate_word(m, &cur).unwrap().trace();
            prop_assert!((g - h).abs() / g.abs().max(1.0) < 1e-9, "{} -> {}: {} vs {}", w, m, g, h);
        }
    }
}

/// Pass from `Y2` round the orbifold point `k` times and out through `Y1`,
/// before and after the pending flip. The winding drops to `k - 1`; the
/// printed `p - k + 1` only agrees once `F_p` is read in the other direction.
#[test]
fn pending_flip_winding_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for p in 3..=7u32 {
        let w = 2.0 * (PI / p as f64).cos();
        for k in 2..p {
            let (y1, y2, z): (f64, f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let ny1 = y1 - (1.0 + w * (-z).exp() + (-2.0 * z).exp()).ln();
            let ny2 = y2 + (1.0 + w * z.exp() + (2.0 * z).exp()).ln();
            let x = Mat2::x;
            let lhs = Mat2::product(&[x(y2), Mat2::l(), x(z), Mat2::rotate(p, k), x(z), Mat2::l(), x(y1)]);
            let ours = Mat2::product(&[x(ny2), Mat2::r(), x(-z), Mat2::rotate(p, k - 1), x(-z), Mat2::r(), x(ny1)]);
            assert!(lhs.max_abs_diff(&ours) < 1e-9, "p = {p}, k = {k}");
            if p - k + 1 < p && p - k + 1 != k - 1 {
                let printed =
                    Mat2::product(&[x(ny2), Mat2::r(), x(-z), Mat2::rotate(p, p - k + 1), x(-z), Mat2::r(), x(ny1)]);
                assert!(lhs.max_abs_diff(&printed) > 1e-6, "p = {p}, k = {k}");
            }
        }
    }
}
