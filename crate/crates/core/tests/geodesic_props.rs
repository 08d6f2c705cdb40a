use std::f64::consts::PI;

use orbiteich::fatgraph::library;
use orbiteich::fatgraph::random::random_spine;
use orbiteich::geodesics::{
    evaluate_word, evaluate_word_symbolic, evaluate_word_unrolled, face_word, fp_power_is_scalar, geodesic_function,
    geodesic_function_symbolic, lambda_ring, pgon_shear_data, pgon_sweep, random_closed_word, verify_pgon_identities,
    Hyperbolicity, Mat2, PathWord, WordError,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
    a.max_abs_diff(b) < tol
}

#[test]
fn generator_relations() {
    assert!(close(&Mat2::l(), &Mat2::r().mul(&Mat2::r()), 0.0 + 1e-15));
    let s = Mat2::x(0.83);
    assert!(close(&s.mul(&s), &Mat2::identity().scale(-1.0), 1e-15));
    for p in 2..=8 {
        assert!(fp_power_is_scalar(p), "p = {p}");
        let sign = if p % 2 == 1 { 1.0 } else { -1.0 };
        assert!(close(&Mat2::f(p).pow(p), &Mat2::identity().scale(sign), 1e-12));
    }
}

#[test]
fn full_winding_avoids_the_orbifold_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in 2..=8u32 {
        let (x, z, y) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let sign = if (p - 1) % 2 == 0 { 1.0 } else { -1.0 };
        let lhs = Mat2::product(&[
            Mat2::x(x),
            Mat2::l(),
            Mat2::x(z),
            Mat2::f(p).pow(p).scale(sign),
            Mat2::x(z),
            Mat2::l(),
            Mat2::x(y),
        ]);
        let rhs = Mat2::product(&[Mat2::x(x), Mat2::r(), Mat2::x(y)]);
        assert!(close(&lhs, &rhs, 1e-9));
    }
}

#[test]
fn open_words() {
    let torus = library::torus_with_hole();
    let w: PathWord = "1 R 2 .".parse().unwrap();
    let m = evaluate_word(&w, &torus).unwrap();
    assert!((m.det() - 1.0).abs() < 1e-15);
    assert!(close(&m, &Mat2::product(&[Mat2::x(0.0), Mat2::r(), Mat2::x(0.0)]), 1e-15));
    assert!(matches!(geodesic_function(&w, &torus), Err(WordError::Open)));

    // Pattern (a): a single rotation around the first orbifold point.
    let tree = library::treegraph().with_shears(&[0.3, -0.2, 0.5, 0.1, -0.7, 0.4, 0.9]);
    let w: PathWord = "5 L 1 F1 1 L 6 .".parse().unwrap();
    let m = evaluate_word(&w, &tree).unwrap();
    let expected = Mat2::product(&[
        Mat2::x(-0.7),
        Mat2::l(),
        Mat2::x(0.3),
        Mat2::f(3),
        Mat2::x(0.3),
        Mat2::l(),
        Mat2::x(0.4),
    ]);
    assert!(close(&m, &expected, 1e-15));
    assert!(matches!(
        "5 L 1 F3 1 L 6 .".parse::<PathWord>().unwrap().realize(&tree),
        Err(WordError::Winding { .. })
    ));
    assert!(matches!(
        "5 R 1 F1 1 L 6 .".parse::<PathWord>().unwrap().realize(&tree),
        Err(WordError::Unrealizable(_))
    ));
    assert!("5 L 6 F1 6 L 6 .".parse::<PathWord>().unwrap().realize(&tree).is_err());
}

#[test]
fn face_words_measure_perimeters() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (name, spine) in library::all() {
        for _ in 0..5 {
            let z: Vec<f64> = (0..spine.edges().len()).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let spine = spine.with_shears(&z);
            for (f, center) in spine.poisson_center().iter().enumerate() {
                let perimeter: f64 = center.iter().zip(&z).map(|(&m, z)| m as f64 * z).sum();
                let g = geodesic_function(&face_word(&spine, f), &spine).unwrap();
                assert!((g.trace - 2.0 * (perimeter / 2.0).cosh()).abs() < 1e-9, "{name} face {f}");
            }
        }
    }
    // Zero perimeter: a puncture.
    let torus = library::torus_with_hole().with_shears(&[1.0, -0.25, -0.75]);
    let g = geodesic_function(&face_word(&torus, 0), &torus).unwrap();
    assert_eq!(g.kind, Hyperbolicity::Parabolic);
}

#[test]
fn torus_a_cycle_at_zero() {
    let torus = library::torus_with_hole();
    let w: PathWord = "1 R 2 L".parse().unwrap();
    let g = geodesic_function(&w, &torus).unwrap();
    let ring = lambda_ring(&torus);
    let sym = geodesic_function_symbolic(&w, &torus, &ring).unwrap();
    assert!((sym.trace.eval_real(&[1.0, 1.0, 1.0]).unwrap() - g.trace).abs() < 1e-12);
    assert_eq!(g.trace, 3.0);
}

#[test]
fn pgon_data() {
    let d = pgon_shear_data(3, PI / 3.0).unwrap();
    assert!(d.z.abs() < 1e-15);
    let d = pgon_shear_data(4, 0.4).unwrap();
    assert!(d.ys[0].abs() < 1e-15);
    let d = pgon_shear_data(5, 0.5).unwrap();
    assert!(d.zs.iter().chain(&d.ys).all(|x| x.is_finite()) && d.z.is_finite());
    assert!(pgon_shear_data(5, 2.0).is_err());
    assert!(verify_pgon_identities(3, 0.9).unwrap().max_residual < 1e-12);
    assert_eq!(verify_pgon_identities(2, 0.9).unwrap().identities.len(), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for p in 2..=8 {
        for r in pgon_sweep(&mut rng, p, 100).unwrap() {
            assert!(r.max_residual < 1e-9, "{r:?}");
            assert_eq!(r.identities.len(), if p == 2 { 1 } else { p as usize - 1 });
        }
    }
}

#[test]
fn rotation_free_words_are_hyperbolic() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (name, base) in library::all() {
        if name == "tripod" {
            // Every edge is pending: no rotation-free closed paths.
            assert!(random_closed_word(&mut rng, &base, 3, false).is_none());
            continue;
        }
        let ring = lambda_ring(&base);
        for _ in 0..20 {
            let z: Vec<f64> = (0..base.edges().len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let spine = base.with_shears(&z);
            let len = rng.gen_range(1..8);
            let w = random_closed_word(&mut rng, &spine, len, false).unwrap();
            assert!(!w.has_rotations());
            let g = geodesic_function(&w, &spine).unwrap();
            assert!(g.trace >= 2.0 - 1e-9, "{name}: {w} -> {}", g.trace);
            let sym = geodesic_function_symbolic(&w, &spine, &ring).unwrap();
            assert!(sym.positivity.all_integer_cone && sym.positivity.all_embed_positive, "{name}: {w}");
            assert!(sym.has_extreme_terms, "{name}: {w}");
            let lam: Vec<f64> = z.iter().map(|z| (z / 2.0).exp()).collect();
            let s = sym.trace.eval_real(&lam).unwrap();
            assert!((s - g.trace).abs() / g.trace.abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn symbolic_matches_numeric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spine = if rng.gen_bool(0.5) { library::treegraph() } else { random_spine(&mut rng, 4, &[3, 4]) };
        let z: Vec<f64> = (0..spine.edges().len()).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let spine = spine.with_shears(&z);
        let ring = lambda_ring(&spine);
        let w = random_closed_word(&mut rng, &spine, 6, true).unwrap();
        prop_assert_eq!(w.realize(&spine).unwrap().to_word(&spine), w.clone());
        let m = evaluate_word(&w, &spine).unwrap();
        let sm = evaluate_word_symbolic(&w, &spine, &ring).unwrap();
        let det = sm.det();
        prop_assert!(det.as_constant().is_some_and(|c| c.is_one()), "det = {}", det);
        let lam: Vec<f64> = z.iter().map(|z| (z / 2.0).exp()).collect();
        for i in 0..2 {
            for j in 0..2 {
                let s = sm.0[i][j].eval_real(&lam).unwrap();
                prop_assert!((s - m.0[i][j]).abs() <= 1e-9 * m.0[i][j].abs().max(1.0));
            }
        }
        // Trace is invariant under cyclic rotation and under unrolling the
        // rotations into chains of turns.
        let g = m.trace();
        let rotated = w.rotated(rng.gen_range(0..w.crossings()));
        prop_assert!((evaluate_word(&rotated, &spine).unwrap().trace() - g).abs() <= 1e-9 * g.abs().max(1.0));
        let unrolled = evaluate_word_unrolled(&w, &spine).unwrap().trace();
        prop_assert!((unrolled - g).abs() <= 1e-9 * g.abs().max(1.0), "{} vs {}", unrolled, g);
    }

    #[test]
    fn word_text_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spine = library::treegraph();
        let w = random_closed_word(&mut rng, &spine, 5, true).unwrap();
        prop_assert_eq!(w.to_string().parse::<PathWord>().unwrap(), w.clone());
        let json = serde_json::to_string(&w).unwrap();
        prop_assert_eq!(serde_json::from_str::<PathWord>(&json).unwrap(), w);
    }
}
