use orbiteich::cluster::golden::{golden_seed, verify_cycle, Rank2Type};
use orbiteich::cluster::random::{random_directions, random_matrix, random_seed, SeedShape};
use orbiteich::cluster::{
    check_laurent, check_laurent_bounded, finite_type_probe, mutation_sequence, Coefficient, CoefficientMode,
    ExchangeMatrix, GenSeed,
};
use orbiteich::{CyclotomicField, LaurentPoly, PolyRing};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shape(rank: usize) -> SeedShape {
    SeedShape {
        rank,
        max_entry: 3,
        max_degree: 3,
        orders: vec![4, 5],
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matrix_mutation_preserves_invariants(seed in any::<u64>(), n in 2usize..=5, steps in prop::collection::vec(0usize..5, 0..6)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = random_matrix(&mut rng, n, 3, 3);
        for k in steps.into_iter().map(|k| k % n) {
            let next = m.mutate(k);
            prop_assert_eq!(&next.mutate(k), &m);
            next.check_divisibility().unwrap();
            next.check_symmetrized_by_d().unwrap();
            prop_assert!(next.symmetrizer().is_some());
            m = next;
        }
    }

    #[test]
    fn seed_mutation_is_an_involution(seed in any::<u64>(), n in 1usize..=3, k in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_seed(&mut rng, &shape(n)).unwrap();
        let k = k % n;
        let back = s.mutate(k).unwrap().mutate(k).unwrap();
        prop_assert_eq!(back.canonical_key(), s.canonical_key());
        prop_assert_eq!(back, s);
    }

    #[test]
    fn fixed_tuples_stay_reciprocal(seed in any::<u64>(), dirs in prop::collection::vec(0usize..3, 1..5)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_seed(&mut rng, &shape(3)).unwrap();
        let mut cur = s.clone();
        for k in dirs {
            if cur.exchange_extent(k).unwrap() > 2e3 {
                break;
            }
            cur = cur.mutate(k).unwrap();
            for t in cur.coefficients() {
                let rev: Vec<_> = t.iter().rev().cloned().collect();
                prop_assert_eq!(&rev, t);
            }
        }
    }
}

#[test]
fn tracked_involution_on_golden_seeds() {
    for t in [Rank2Type::B2, Rank2Type::G2] {
        let s = golden_seed(t);
        for k in 0..2 {
            assert_eq!(s.mutate(k).unwrap().mutate(k).unwrap(), s);
        }
    }
}

#[test]
fn golden_cycles() {
    for t in [Rank2Type::A2, Rank2Type::B2, Rank2Type::G2] {
        let report = verify_cycle(t).unwrap();
        assert!(report.pass, "{report:#?}");
    }
}

#[test]
fn empty_sequence_is_identity() {
    let s = golden_seed(Rank2Type::B2);
    assert_eq!(mutation_sequence(&s, &[]).unwrap(), vec![s]);
}

#[test]
fn sequence_errors_carry_the_prefix() {
    let field = CyclotomicField::new(1);
    let ring = PolyRing::new(field.clone(), ["x", "y"]);
    let b = ExchangeMatrix::new_unchecked(vec![vec![0, 3], vec![-1, 0]], vec![2, 1]).unwrap();
    let one = Coefficient::scalar(field.one(), 0);
    let s = GenSeed::new(
        ring,
        b,
        vec![vec![one.clone(); 3], vec![one; 2]],
        CoefficientMode::Fixed,
    )
    .unwrap();
    let err = mutation_sequence(&s, &[1, 0]).unwrap_err();
    assert_eq!((err.step, err.prefix.len()), (0, 1));
    assert!(check_laurent(&s, &[0]).is_err());
}

#[test]
fn rank2_finite_types_stay_laurent_at_depth_20() {
    for t in [Rank2Type::A2, Rank2Type::B2, Rank2Type::G2] {
        let s = golden_seed(t);
        let dirs: Vec<usize> = (0..20).map(|i| i % 2).collect();
        let r = check_laurent(&s, &dirs).unwrap();
        assert!(r.laurent && r.steps_completed == 20, "{t}: {r:?}");
    }
}

#[test]
fn rank3_sequences_stay_laurent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let field = CyclotomicField::for_orders(&[4, 5]).unwrap();
    let ring = PolyRing::new(field.clone(), ["x1", "x2", "x3"]);
    // d = (2, 1, 1) with b_ij = d_i c_ij, c skew.
    let b = ExchangeMatrix::new(vec![vec![0, 2, -2], vec![-1, 0, 1], vec![1, -1, 0]], vec![2, 1, 1]).unwrap();
    let c = |e| Coefficient::scalar(e, 0);
    let w = field.omega(5).unwrap();
    let coeffs = vec![
        vec![c(field.one()), c(w), c(field.one())],
        vec![c(field.one()); 2],
        vec![c(field.one()); 2],
    ];
    let s = GenSeed::new(ring, b, coeffs, CoefficientMode::Fixed).unwrap();
    let mut exact = 0;
    for _ in 0..200 {
        let dirs = random_directions(&mut rng, 3, 10);
        let r = check_laurent_bounded(&s, &dirs, 2e4).unwrap();
        assert!(r.laurent, "{r:?}");
        exact += r.steps_completed;
    }
    assert!(exact > 1000, "only {exact} mutations were checked");
}

#[test]
fn substituting_the_printed_x1_into_the_local_y1() {
    let s = golden_seed(Rank2Type::B2);
    let ring = s.ring();
    let after = s.mutate(0).unwrap();
    // Same exchange data, but with a fresh cluster (x, y) standing for (x1, y).
    let local = GenSeed::new(ring.clone(), after.matrix().clone(), after.coefficients().to_vec(), after.mode())
        .unwrap()
        .mutate(1)
        .unwrap();
    let x1 = LaurentPoly::parse(ring, "(a + b y + c y^2)/x").unwrap();
    assert_eq!(after.cluster()[0], x1);
    let y1 = local.cluster()[1].substitute_partial(&[(0, x1)]).unwrap();
    let printed = LaurentPoly::parse(ring, "(p x + q a + b q y + c q y^2)/(x y)").unwrap();
    assert_eq!(y1, printed);
}

#[test]
fn wild_rank2_is_not_finite() {
    let field = CyclotomicField::new(1);
    let ring = PolyRing::new(field.clone(), ["x", "y"]);
    let b = ExchangeMatrix::new(vec![vec![0, 4], vec![-1, 0]], vec![1, 1]).unwrap();
    let one = Coefficient::scalar(field.one(), 0);
    let s = GenSeed::new(ring, b, vec![vec![one.clone(); 2]; 2], CoefficientMode::Fixed)
        .unwrap();
    let r = finite_type_probe(&s, 1000, 20).unwrap();
    assert_eq!(r.finite, None);
    assert!(r.variable_count > 20);
}
